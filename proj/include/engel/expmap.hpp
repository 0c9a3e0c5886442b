#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include "pendulum.hpp"

/**
 * Exponential mapping of the Engel group, (lambda, t) -> q_t, started at the
 * identity, together with its discrete (reflections) and continuous
 * (dilations) symmetries.
 *
 * Horizontal dynamics in the coordinates (x, y, z, v):
 *
 *   x' = u1,  y' = u2,  z' = (x u2 - y u1) / 2,  v' = (x^2 + y^2) u2 / 2,
 *
 * with controls u1 = h1 = -sin(theta), u2 = h2 = cos(theta).
 */
namespace engel {

struct State
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double v = 0.0;

  bool operator==(const State &) const = default;
};

inline State operator-(const State & a, const State & b) { return {a.x - b.x, a.y - b.y, a.z - b.z, a.v - b.v}; }

inline double max_abs(const State & q)
{
  return std::max({std::abs(q.x), std::abs(q.y), std::abs(q.z), std::abs(q.v)});
}

/// Homogeneous size of a point: max(|x|, |y|, |z|^(1/2), |v|^(1/3)).
inline double homogeneous_norm(const State & q)
{
  return std::max({std::abs(q.x), std::abs(q.y), std::sqrt(std::abs(q.z)), std::cbrt(std::abs(q.v))});
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

namespace detail {

// Inflexional elastica, alpha = 1.
inline State exp_c1_unit(const EllipticCoords & e, double t)
{
  const auto & m  = e.k;
  const double k  = m.k();
  const double k2 = m.k2();
  const auto a    = elliptic::jacobi(e.phi, m);
  const auto b    = elliptic::jacobi(e.phi + t, m);
  const double dE = elliptic::incomplete_integrals(b.am, m).E - elliptic::incomplete_integrals(a.am, m).E;

  const double snd_a = a.sn * a.dn, snd_b = b.sn * b.dn;
  State q;
  q.x = 2.0 * k * (b.cn - a.cn);
  q.y = 2.0 * dE - t;
  q.z = 2.0 * k * (snd_b - snd_a - 0.5 * q.y * (b.cn + a.cn));
  q.v = q.y * q.y * q.y / 6.0 + 2.0 * k2 * a.cn * a.cn * q.y - 4.0 * k2 * a.cn * (snd_b - snd_a)
        + (4.0 / 3.0) * k2 * (b.cn * snd_b - a.cn * snd_a) + (2.0 / 3.0) * m.kc2() * t
        + (2.0 / 3.0) * (2.0 * k2 - 1.0) * dE;
  return q;
}

// Non-inflexional elastica, alpha = 1; elliptic argument psi = phi / k.
inline State exp_c2_unit(const EllipticCoords & e, double t)
{
  const auto & m  = e.k;
  const double k  = m.k();
  const double k2 = m.k2();
  const double sc = e.sgn_c;
  const double psi = e.phi / k;
  const auto a     = elliptic::jacobi(psi, m);
  const auto b     = elliptic::jacobi(psi + t / k, m);
  const double dE  = elliptic::incomplete_integrals(b.am, m).E - elliptic::incomplete_integrals(a.am, m).E;

  const double csn_a = a.cn * a.sn, csn_b = b.cn * b.sn;
  State q;
  q.x = 2.0 * sc / k * (b.dn - a.dn);
  q.y = (k2 - 2.0) / k2 * t + 2.0 / k * dE;
  q.z = -0.5 * q.x * q.y - 2.0 * sc * a.dn / k * q.y + 2.0 * sc * (csn_b - csn_a);
  q.v = 4.0 / k
          * ((b.dn * csn_b - a.dn * csn_a) / 3.0 - m.kc2() / (3.0 * k2 * k) * t - (k2 - 2.0) / (6.0 * k2) * dE)
        + q.y * q.y * q.y / 6.0 + 2.0 * q.y / k2 * a.dn * a.dn - 4.0 / k * a.dn * (csn_b - csn_a);
  return q;
}

// Critical elastica (separatrix), alpha = 1.
inline State exp_c3_unit(const Covector & l, double t)
{
  const double sc  = sign(l.c);
  const double phi = std::asinh(sc * std::tan(0.5 * l.theta));
  const double ta = std::tanh(phi), tb = std::tanh(phi + t);
  const double ha = 1.0 / std::cosh(phi), hb = 1.0 / std::cosh(phi + t);

  State q;
  q.x = 2.0 * sc * (hb - ha);
  q.y = 2.0 * (tb - ta) - t;
  q.z = -0.5 * q.x * q.y - 2.0 * sc * ha * q.y + 2.0 * sc * (tb * hb - ta * ha);
  q.v = 2.0 / 3.0 * (tb - ta + 2.0 * tb * hb * hb - 2.0 * ta * ha * ha) + q.y * q.y * q.y / 6.0
        + 2.0 * q.y * ha * ha - 4.0 * ha * (tb * hb - ta * ha);
  return q;
}

// Chebyshev-Lobatto indefinite integration on [-1, 1]: row j of `integrate`
// maps samples f(x_i) to the integral of the interpolant from -1 to x_j.
struct ChebyshevPanel
{
  static constexpr int degree = 32;
  static constexpr int nodes  = degree + 1;
  std::array<double, nodes> x{};
  Eigen::Matrix<double, nodes, nodes> integrate;

  ChebyshevPanel()
  {
    using Mat = Eigen::Matrix<double, nodes, nodes>;
    Mat values, antideriv;
    for (int j = 0; j < nodes; ++j) { x[j] = -std::cos(std::numbers::pi * j / degree); }
    // T_n and an antiderivative P_n at x; P_n(-1) is subtracted below
    auto eval = [](double s, int n, double & tn, double & pn) {
      const double th = std::acos(std::clamp(s, -1.0, 1.0));
      tn              = std::cos(n * th);
      if (n == 0) {
        pn = s;
      } else if (n == 1) {
        pn = 0.5 * s * s;
      } else {
        pn = 0.5 * (std::cos((n + 1) * th) / (n + 1) - std::cos((n - 1) * th) / (n - 1));
      }
    };
    for (int j = 0; j < nodes; ++j) {
      for (int n = 0; n < nodes; ++n) {
        double tn, pn, t0, p0;
        eval(x[j], n, tn, pn);
        eval(-1.0, n, t0, p0);
        values(j, n)    = tn;
        antideriv(j, n) = pn - p0;
      }
    }
    integrate = antideriv * values.inverse();
  }
};

inline const ChebyshevPanel & chebyshev_panel()
{
  static const ChebyshevPanel panel;
  return panel;
}

}  // namespace detail

/**
 * Exp(lambda, t) by spectral quadrature of the horizontal equations along the
 * exact pendulum flow. The interval is cut into panels on which theta varies
 * by at most half a radian; each panel is integrated with a degree-32
 * Chebyshev interpolant, twice nested for z and v.
 */
inline State exp_by_quadrature(const Covector & l, double t, double tol = default_strat_tol)
{
  if (t == 0.0) { return {}; }
  const auto & cheb = detail::chebyshev_panel();
  constexpr int n   = detail::ChebyshevPanel::nodes;
  using Vec         = Eigen::Matrix<double, n, 1>;

  const Stratum st = classify(l, tol);
  const bool rectified = st.tag == StratumTag::C1 || st.tag == StratumTag::C2;
  std::optional<EllipticCoords> ec;
  if (rectified) { ec = to_elliptic(l, tol); }
  auto theta_at = [&](double s) {
    if (!rectified) { return flow(l, s, tol).theta; }
    auto e = *ec;
    e.phi += s;
    return from_elliptic(e).theta;
  };

  // |theta'| = |c| <= sqrt(2 (E + |alpha|)) along the orbit
  const double c_max  = std::sqrt(std::max(0.0, 2.0 * detail::energy_gaps(l).above_min));
  const int panels    = std::max(1, static_cast<int>(std::ceil(2.0 * std::abs(t) * c_max)));
  const double h      = t / panels;

  State q;
  Vec u1, u2, X, Y, fz, fv;
  for (int p = 0; p < panels; ++p) {
    const double s0 = p * h;
    for (int j = 0; j < n; ++j) {
      const double th = theta_at(s0 + 0.5 * h * (cheb.x[j] + 1.0));
      u1[j]           = -std::sin(th);
      u2[j]           = std::cos(th);
    }
    X = q.x + 0.5 * h * (cheb.integrate * u1).array();
    Y = q.y + 0.5 * h * (cheb.integrate * u2).array();
    fz = 0.5 * (X.cwiseProduct(u2) - Y.cwiseProduct(u1));
    fv = 0.5 * (X.cwiseProduct(X) + Y.cwiseProduct(Y)).cwiseProduct(u2);
    const double dz = 0.5 * h * (cheb.integrate.row(n - 1) * fz)(0);
    const double dv = 0.5 * h * (cheb.integrate.row(n - 1) * fv)(0);
    q = {X[n - 1], Y[n - 1], q.z + dz, q.v + dv};
  }
  return q;
}

/// C2 moduli below this are evaluated by exp_by_quadrature.
inline constexpr double c2_quadrature_below_k = 0.5;
/// Arcs with t * max|c| below this are evaluated by exp_by_quadrature (C1, C2, C3, C6).
inline constexpr double quadrature_below_arc = 2.0;

/**
 * Exp(lambda, t) by the closed-form stratum formulas.
 *
 * C1-C3 are evaluated at alpha = 1 after the reflection
 * (theta, c, alpha) -> (theta - pi, c, -alpha) for alpha < 0 and the
 * dilation by sigma = sqrt(|alpha|).
 */
inline State exp(const Covector & l, double t, double tol = default_strat_tol)
{
  if (t == 0.0) { return {}; }
  const Stratum st = classify(l, tol);
  // short arcs: the closed forms difference quantities of order one
  const bool curved = st.tag == StratumTag::C1 || st.tag == StratumTag::C2 || st.tag == StratumTag::C3 || st.tag == StratumTag::C6;
  if (curved && std::abs(t) * std::sqrt(2.0 * detail::energy_gaps(l).above_min) < quadrature_below_arc) {
    return exp_by_quadrature(l, t, tol);
  }
  switch (st.tag) {
  case StratumTag::C4: {
    const double s = st.sign_alpha;
    return {0.0, s * t, 0.0, s * t * t * t / 6.0};
  }
  case StratumTag::C5: {
    const double s = st.sign_alpha;
    return {0.0, -s * t, 0.0, -s * t * t * t / 6.0};
  }
  case StratumTag::C6: {
    const double c = l.c, th = l.theta, ct = c * t;
    const double c2 = c * c;
    return {
      (std::cos(ct + th) - std::cos(th)) / c,
      (std::sin(ct + th) - std::sin(th)) / c,
      (ct - std::sin(ct)) / (2.0 * c2),
      (4.0 * std::sin(ct + th) - 3.0 * std::sin(th) - std::sin(2.0 * ct + th) - 2.0 * ct * std::cos(th))
        / (4.0 * c2 * c),
    };
  }
  case StratumTag::C7: {
    const double s = std::sin(l.theta), co = std::cos(l.theta);
    return {-t * s, t * co, 0.0, t * t * t / 6.0 * co};
  }
  default: break;
  }

  const Covector p   = to_positive_alpha(l);
  const double sigma = std::sqrt(p.alpha);
  const Covector unit(p.theta, p.c / sigma, 1.0);
  const double tu = sigma * t;

  State q;
  if (st.tag == StratumTag::C3) {
    q = detail::exp_c3_unit(unit, tu);
  } else {
    // coordinates are computed on the original covector so that the
    // modulus keeps the accuracy of the energy gap
    auto e = to_elliptic(l, tol);
    // the rotating closed form cancels like k^-6 near C6
    if (st.tag == StratumTag::C2 && e.k.k() < c2_quadrature_below_k) { return exp_by_quadrature(l, t, tol); }
    e.phi *= e.sigma;
    e.sigma = 1.0;
    q       = st.tag == StratumTag::C1 ? detail::exp_c1_unit(e, tu) : detail::exp_c2_unit(e, tu);
  }
  q = {q.x / sigma, q.y / sigma, q.z / (sigma * sigma), q.v / (sigma * sigma * sigma)};
  if (l.alpha < 0.0) { q = {-q.x, -q.y, q.z, -q.v}; }
  return q;
}

inline State exp(const TimedCovector & nu, double tol = default_strat_tol) { return exp(nu.lambda, nu.t, tol); }

// ---------------------------------------------------------------------------
// Test oracle
// ---------------------------------------------------------------------------

inline int default_oracle_steps(double t) { return std::max(1000, static_cast<int>(std::ceil(1000.0 * t))); }

/**
 * Classical fixed-step RK4 integration of the full normal Hamiltonian
 * system (pendulum plus horizontal dynamics). Independent of the closed
 * forms; intended as a reference in tests. Carried in extended precision:
 * near the separatrix the pendulum amplifies rounding like exp(sigma t).
 */
inline State integrate_oracle(const Covector & l, double t, int steps)
{
  if (steps < 1) { throw DomainError("integrate_oracle: steps must be >= 1"); }
  if (t == 0.0) { return {}; }
  using Real         = long double;
  using Vec          = std::array<Real, 6>;  // theta, c, x, y, z, v
  const Real alpha   = l.alpha;
  auto rhs           = [alpha](const Vec & s, Vec & ds, Real) {
    const Real u1 = -std::sin(s[0]), u2 = std::cos(s[0]);
    ds[0]         = s[1];
    ds[1]         = -alpha * std::sin(s[0]);
    ds[2]         = u1;
    ds[3]         = u2;
    ds[4]         = 0.5L * (s[2] * u2 - s[3] * u1);
    ds[5]         = 0.5L * (s[2] * s[2] + s[3] * s[3]) * u2;
  };
  boost::numeric::odeint::runge_kutta4<Vec, Real> stepper;
  Vec s{l.theta, l.c, 0.0L, 0.0L, 0.0L, 0.0L};
  const Real h = static_cast<Real>(t) / steps;
  for (int i = 0; i < steps; ++i) { stepper.do_step(rhs, s, i * h, h); }
  return {static_cast<double>(s[2]), static_cast<double>(s[3]), static_cast<double>(s[4]), static_cast<double>(s[5])};
}

inline State integrate_oracle(const Covector & l, double t) { return integrate_oracle(l, t, default_oracle_steps(t)); }

// ---------------------------------------------------------------------------
// Symmetries
// ---------------------------------------------------------------------------

/// Reflection epsilon^i acting on the state space, i = 1..7.
inline State reflect_state(int i, const State & q)
{
  const double x = q.x, y = q.y, z = q.z, v = q.v;
  switch (i) {
  case 1: return {x, y, -z, v - x * z};
  case 2: return {-x, y, z, v - x * z};
  case 3: return {-x, y, -z, v};
  case 4: return {-x, -y, z, -v};
  case 5: return {-x, -y, -z, -v + x * z};
  case 6: return {x, -y, z, -v + x * z};
  case 7: return {x, -y, -z, -v};
  default: throw DomainError("reflection index must be in 1..7");
  }
}

/// Reflection epsilon^i acting on the phase cylinder alone.
inline Covector reflect_lambda(int i, const Covector & l)
{
  constexpr double pi = std::numbers::pi;
  const double th = l.theta, c = l.c, a = l.alpha;
  switch (i) {
  case 1: return {th, -c, a};
  case 2: return {-th, c, a};
  case 3: return {-th, -c, a};
  case 4: return {th + pi, c, -a};
  case 5: return {th + pi, -c, -a};
  case 6: return {-th + pi, c, -a};
  case 7: return {-th + pi, -c, -a};
  default: throw DomainError("reflection index must be in 1..7");
  }
}

/// True for the reflections that reverse the direction of the pendulum field.
inline bool reverses_time(int i) { return i == 1 || i == 2 || i == 5 || i == 6; }

/// Reflection epsilon^i on N = C x R+; time-reversing ones act on the endpoint covector.
inline TimedCovector reflect_covector(int i, const TimedCovector & nu, double tol = default_strat_tol)
{
  const Covector base = reverses_time(i) ? flow(nu.lambda, nu.t, tol) : nu.lambda;
  return {reflect_lambda(i, base), nu.t};
}

inline TimedCovector dilate(double mu, const TimedCovector & nu)
{
  if (!(mu > 0.0)) { throw DomainError("dilation factor must be positive"); }
  return {Covector(nu.lambda.theta, nu.lambda.c / mu, nu.lambda.alpha / (mu * mu)), mu * nu.t};
}

inline State dilate_state(double mu, const State & q)
{
  if (!(mu > 0.0)) { throw DomainError("dilation factor must be positive"); }
  return {mu * q.x, mu * q.y, mu * mu * q.z, mu * mu * mu * q.v};
}

}  // namespace engel
