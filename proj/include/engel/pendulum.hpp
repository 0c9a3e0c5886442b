#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string_view>

#include "elliptic.hpp"
#include "errors.hpp"

/**
 * Vertical part of the normal Hamiltonian system: the pendulum
 *
 *   theta' = c,   c' = -alpha sin(theta),   alpha' = 0
 *
 * on the phase cylinder, its stratification by trajectory type, the
 * rectifying elliptic coordinates and the exact flow.
 */
namespace engel {

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r                = std::remainder(a, two_pi);  // [-pi, pi]
  if (r <= -std::numbers::pi) { r += two_pi; }
  return r;
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

/// Initial momentum (theta, c, alpha) on the level surface H = 1/2.
struct Covector
{
  double theta = 0.0;
  double c     = 0.0;
  double alpha = 0.0;

  Covector() = default;
  Covector(double theta_, double c_, double alpha_) : theta(wrap_angle(theta_)), c(c_), alpha(alpha_) {}

  /// h1, h2 of the left-invariant frame.
  double h1() const { return -std::sin(theta); }
  double h2() const { return std::cos(theta); }
};

enum class StratumTag { C1, C2, C3, C4, C5, C6, C7 };

struct Stratum
{
  StratumTag tag;
  int sign_alpha;  // +1, -1, or 0 exactly for C6, C7

  bool operator==(const Stratum &) const = default;
};

inline std::string_view to_string(StratumTag tag)
{
  switch (tag) {
  case StratumTag::C1: return "C1";
  case StratumTag::C2: return "C2";
  case StratumTag::C3: return "C3";
  case StratumTag::C4: return "C4";
  case StratumTag::C5: return "C5";
  case StratumTag::C6: return "C6";
  case StratumTag::C7: return "C7";
  }
  return "?";
}

/// Relative band in which the stratum equalities E = +-|alpha|, c = 0, alpha = 0 are taken to hold.
inline constexpr double default_strat_tol = 1e-12;

inline double energy(const Covector & l) { return 0.5 * l.c * l.c - l.alpha * std::cos(l.theta); }

namespace detail {

// E + |alpha| and E - |alpha| written without cancellation:
//   E + |a| = c^2/2 + 2|a| sin^2(th/2),   E - |a| = c^2/2 - 2|a| cos^2(th/2)
// with th = theta for alpha > 0 and theta - pi for alpha < 0.
struct EnergyGaps
{
  double above_min;
  double above_sep;
};

inline EnergyGaps energy_gaps(const Covector & l)
{
  const double a    = std::abs(l.alpha);
  const double th   = l.alpha >= 0.0 ? l.theta : l.theta - std::numbers::pi;
  const double s    = std::sin(0.5 * th);
  const double co   = std::cos(0.5 * th);
  const double half = 0.5 * l.c * l.c;
  return {half + 2.0 * a * s * s, half - 2.0 * a * co * co};
}

}  // namespace detail

/**
 * Stratum of a covector. Values inside the relative band `tol` snap to the
 * singular stratum; the band is scaled by max(c^2, |alpha|) so that the
 * classification commutes with dilations. Near the stable equilibrium the
 * band applies to the amplitude rather than to the energy.
 */
inline Stratum classify(const Covector & l, double tol = default_strat_tol)
{
  const double scale = std::max(l.c * l.c, std::abs(l.alpha));
  if (scale == 0.0) { return {StratumTag::C7, 0}; }
  const double band = tol * scale;

  const bool alpha_zero = std::abs(l.alpha) <= band;
  const bool c_zero     = std::abs(l.c) <= tol * std::sqrt(scale);
  if (alpha_zero) { return c_zero ? Stratum{StratumTag::C7, 0} : Stratum{StratumTag::C6, 0}; }

  const int sa   = sign(l.alpha);
  const auto gap = detail::energy_gaps(l);
  // above_min is quadratic in the swing amplitude; the band bounds the amplitude
  if (gap.above_min <= tol * band) { return {StratumTag::C4, sa}; }
  if (std::abs(gap.above_sep) <= band) { return {c_zero ? StratumTag::C5 : StratumTag::C3, sa}; }
  return {gap.above_sep < 0.0 ? StratumTag::C1 : StratumTag::C2, sa};
}

/**
 * Rectifying coordinates in C1 and C2. phi is a time (phi' = 1 along the
 * flow); the elliptic argument is sigma * phi in C1 and sigma * phi / k in C2.
 */
struct EllipticCoords
{
  double phi;
  elliptic::Modulus k;
  double sigma;
  Stratum stratum;
  int sgn_c;  // C2 only, +1 otherwise
};

/// Covector with alpha < 0 mapped to alpha > 0 by (theta, c, alpha) -> (theta - pi, c, -alpha).
inline Covector to_positive_alpha(const Covector & l)
{
  return l.alpha < 0.0 ? Covector(l.theta - std::numbers::pi, l.c, -l.alpha) : l;
}

inline EllipticCoords to_elliptic(const Covector & l, double tol = default_strat_tol)
{
  const Stratum st = classify(l, tol);
  if (st.tag != StratumTag::C1 && st.tag != StratumTag::C2) {
    throw UnsupportedStratum(std::string("elliptic coordinates need C1 or C2, got ") + std::string(to_string(st.tag)));
  }
  const Covector p   = to_positive_alpha(l);
  const double sigma = std::sqrt(p.alpha);
  const double s     = std::sin(0.5 * p.theta);
  const double co    = std::cos(0.5 * p.theta);  // >= 0 for theta in (-pi, pi]
  const double w     = 0.5 * p.c / sigma;

  if (st.tag == StratumTag::C1) {
    const double k  = std::hypot(s, w);
    const double kc = std::sqrt(std::max(0.0, (co - std::abs(w)) * (co + std::abs(w))));
    const auto m    = elliptic::Modulus::with_complement(std::min(k, std::nextafter(1.0, 0.0)), kc);
    // sin(am) = s / k, cos(am) = w / k
    const double u  = std::atan2(s, w);
    const double K  = elliptic::complete_integrals(m).K;
    double arg      = elliptic::incomplete_integrals(u, m).F;
    if (arg < 0.0) { arg += 4.0 * K; }
    if (arg >= 4.0 * K) { arg -= 4.0 * K; }
    return {arg / sigma, m, sigma, st, 1};
  }

  const double r2 = s * s + w * w;
  const double k  = 1.0 / std::sqrt(r2);
  const double kc = std::sqrt(std::max(0.0, (std::abs(w) - co) * (std::abs(w) + co) / r2));
  const auto m    = elliptic::Modulus::with_complement(std::min(k, std::nextafter(1.0, 0.0)), kc);
  const int sgn_c = p.c >= 0.0 ? 1 : -1;
  // sin(am) = sgn c sin(theta/2), cos(am) = cos(theta/2)
  const double K = elliptic::complete_integrals(m).K;
  double psi     = elliptic::incomplete_integrals(sgn_c * 0.5 * p.theta, m).F;
  psi            = psi - 2.0 * K * std::floor(psi / (2.0 * K));
  if (psi >= 2.0 * K) { psi -= 2.0 * K; }
  return {m.k() * psi / sigma, m, sigma, st, sgn_c};
}

/// Inverse of to_elliptic: the covector with the given rectified time.
inline Covector from_elliptic(const EllipticCoords & e)
{
  const double alpha = e.stratum.sign_alpha * e.sigma * e.sigma;
  double theta = 0.0, c = 0.0;
  if (e.stratum.tag == StratumTag::C1) {
    const auto j = elliptic::jacobi(e.sigma * e.phi, e.k);
    theta        = 2.0 * std::atan2(e.k.k() * j.sn, j.dn);
    c            = 2.0 * e.k.k() * e.sigma * j.cn;
  } else if (e.stratum.tag == StratumTag::C2) {
    const auto j = elliptic::jacobi(e.sigma * e.phi / e.k.k(), e.k);
    theta        = 2.0 * std::atan2(e.sgn_c * j.sn, j.cn);
    c            = 2.0 * e.sgn_c * e.sigma * j.dn / e.k.k();
  } else {
    throw UnsupportedStratum("from_elliptic needs C1 or C2");
  }
  if (alpha < 0.0) { theta -= std::numbers::pi; }
  return {theta, c, alpha};
}

/**
 * Exact pendulum flow e^{s H_v}(lambda), any real s.
 *
 * C1, C2 shift the rectified time; the separatrix C3 uses the hyperbolic
 * closed form; C4, C5, C7 are fixed points and C6 rotates uniformly.
 */
inline Covector flow(const Covector & l, double s, double tol = default_strat_tol)
{
  const Stratum st = classify(l, tol);
  switch (st.tag) {
  case StratumTag::C1:
  case StratumTag::C2: {
    auto e = to_elliptic(l, tol);
    e.phi += s;
    return from_elliptic(e);
  }
  case StratumTag::C3: {
    const Covector p   = to_positive_alpha(l);
    const double sigma = std::sqrt(p.alpha);
    const int sc       = sign(p.c);
    // sin(theta/2) = sgn c tanh(sigma phi), cos(theta/2) = sech(sigma phi)
    const double arg = std::asinh(sc * std::tan(0.5 * p.theta)) + sigma * s;
    double theta     = 2.0 * std::atan2(sc * std::tanh(arg), 1.0 / std::cosh(arg));
    const double c   = 2.0 * sc * sigma / std::cosh(arg);
    if (l.alpha < 0.0) { theta -= std::numbers::pi; }
    return {theta, c, l.alpha};
  }
  case StratumTag::C6: return {l.theta + l.c * s, l.c, l.alpha};
  case StratumTag::C4:
  case StratumTag::C5:
  case StratumTag::C7: return l;
  }
  return l;
}

/// Point nu = (lambda, t) of the preimage N = C x R+.
struct TimedCovector
{
  Covector lambda;
  double t = 0.0;
};

struct Midpoint
{
  double theta_half;
  double c_half;
};

/// (theta, c) at half the time of a timed covector.
inline Midpoint midpoint(const TimedCovector & nu, double tol = default_strat_tol)
{
  const auto h = flow(nu.lambda, 0.5 * nu.t, tol);
  return {h.theta, h.c};
}

}  // namespace engel
