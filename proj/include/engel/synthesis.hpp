#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "expmap.hpp"
#include "maxwell.hpp"
#include "pendulum.hpp"

/**
 * Optimal synthesis: the globally optimal trajectories from the identity to
 * a given terminal point. Closed forms cover the abnormal set A, the set L
 * of straight-line projections and the fixed set S6 of the reflection
 * epsilon^6; the open quadrants M1..M4 are inverted by Newton iteration in
 * the preimage domains D1..D4, where Exp is a diffeomorphism.
 */
namespace engel {

enum class Region {
  Origin,
  M1,
  M2,
  M3,
  M4,
  A,
  L_minus_A,
  S6_pp,
  S6_pm,
  S6_mp,
  S6_mm,
  S6_0p,
  S6_0m,
  S6_p0,
  S6_m0,
  Mprime_other,
};

inline std::string_view to_string(Region r)
{
  switch (r) {
  case Region::Origin: return "Origin";
  case Region::M1: return "M1";
  case Region::M2: return "M2";
  case Region::M3: return "M3";
  case Region::M4: return "M4";
  case Region::A: return "A";
  case Region::L_minus_A: return "L_minus_A";
  case Region::S6_pp: return "S6_pp";
  case Region::S6_pm: return "S6_pm";
  case Region::S6_mp: return "S6_mp";
  case Region::S6_mm: return "S6_mm";
  case Region::S6_0p: return "S6_0p";
  case Region::S6_0m: return "S6_0m";
  case Region::S6_p0: return "S6_p0";
  case Region::S6_m0: return "S6_m0";
  case Region::Mprime_other: return "Mprime_other";
  }
  return "?";
}

/// 1..4 for M1..M4, 0 otherwise.
inline int quadrant_index(Region r)
{
  switch (r) {
  case Region::M1: return 1;
  case Region::M2: return 2;
  case Region::M3: return 3;
  case Region::M4: return 4;
  default: return 0;
  }
}

inline bool is_special(Region r) { return r != Region::Origin && r != Region::Mprime_other && quadrant_index(r) == 0; }

struct SynthesisResult
{
  std::vector<TimedCovector> trajectories;
  Region region = Region::Origin;
  /// max(|dx|/s, |dy|/s, |dz|/s^2, |dv|/s^3) over trajectories, s = homogeneous_norm(target)
  double residual    = 0.0;
  double sr_distance = 0.0;
  /// solve_generic only: number of extra converged starts compared with the accepted one
  int uniqueness_checks = 0;
  /// largest difference in (theta, c, alpha, t), normalized, between those starts
  double start_disagreement = 0.0;
};

inline constexpr double default_region_tol = 1e-9;

/// Residual of Exp(nu) against q, in the dilation-normalized scale of q.
inline double scaled_residual(const State & got, const State & q)
{
  const double s = homogeneous_norm(q);
  const State d  = got - q;
  if (s == 0.0) { return max_abs(d); }
  return std::max({std::abs(d.x) / s, std::abs(d.y) / s, std::abs(d.z) / (s * s), std::abs(d.v) / (s * s * s)});
}

/**
 * Region of a terminal point. The equalities defining A, L, S6 and x = 0,
 * z = 0 hold within tol relative to s = homogeneous_norm(q), weighted by s,
 * s^2, s^3 for lengths, areas and volumes. Precedence
 * Origin > A > L > S6 > M1..M4 > Mprime_other.
 */
inline Region classify_target(const State & q, double tol = default_region_tol)
{
  const double s = homogeneous_norm(q);
  if (s == 0.0) { return Region::Origin; }
  const double e1 = tol * s, e2 = tol * s * s, e3 = tol * s * s * s;

  const bool x0 = std::abs(q.x) <= e1;
  const bool y0 = std::abs(q.y) <= e1;
  const bool z0 = std::abs(q.z) <= e2;

  if (x0 && z0 && std::abs(q.v - q.y * q.y * q.y / 6.0) <= e3) { return Region::A; }
  if (z0 && std::abs(q.v - (q.x * q.x + q.y * q.y) * q.y / 6.0) <= e3) { return Region::L_minus_A; }
  if (y0 && std::abs(q.v - 0.5 * q.x * q.z) <= e3) {
    const int i = x0 ? 0 : sign(q.x);
    const int j = z0 ? 0 : sign(q.z);
    if (i > 0) { return j > 0 ? Region::S6_pp : j < 0 ? Region::S6_pm : Region::S6_p0; }
    if (i < 0) { return j > 0 ? Region::S6_mp : j < 0 ? Region::S6_mm : Region::S6_m0; }
    return j > 0 ? Region::S6_0p : Region::S6_0m;  // j = 0 here would be the origin or A
  }
  if (x0 || z0) { return Region::Mprime_other; }
  if (q.x < 0.0) { return q.z > 0.0 ? Region::M1 : Region::M2; }
  return q.z < 0.0 ? Region::M3 : Region::M4;
}

// ---------------------------------------------------------------------------
// Special terminal sets
// ---------------------------------------------------------------------------

namespace detail {

// 2p - sin(2p), by its series for small p
inline double two_p_minus_sin(double p)
{
  if (std::abs(p) > 0.1) { return 2.0 * p - std::sin(2.0 * p); }
  const double u = 2.0 * p, u2 = u * u;
  double term = u * u2 / 6.0, sum = 0.0;
  for (int n = 1; n < 12; ++n) {
    sum += term;
    term *= -u2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
  }
  return sum;
}

// z / x^2 along N_{++} as a function of p in (0, pi); increases from 0 to +inf
inline double s6_ratio(double p)
{
  const double s = std::sin(p);
  return two_p_minus_sin(p) / (8.0 * s * s);
}

inline SynthesisResult finish(SynthesisResult r, const State & q, double tol)
{
  for (const auto & nu : r.trajectories) { r.residual = std::max(r.residual, scaled_residual(exp(nu, tol), q)); }
  r.sr_distance = r.trajectories.empty() ? 0.0 : r.trajectories.front().t;
  return r;
}

}  // namespace detail

/// Closed-form synthesis on A, L and S6.
inline SynthesisResult solve_special(const State & q, double region_tol = default_region_tol,
                                     double strat_tol = default_strat_tol)
{
  const Region region = classify_target(q, region_tol);
  SynthesisResult r;
  r.region = region;
  constexpr double pi = std::numbers::pi;

  switch (region) {
  case Region::A: {
    // C4 with the sign of alpha selecting the direction along y
    const Covector l = q.y > 0.0 ? Covector(0.0, 0.0, 1.0) : Covector(pi, 0.0, -1.0);
    r.trajectories.push_back({l, std::abs(q.y)});
    break;
  }
  case Region::L_minus_A:
  case Region::S6_p0:
  case Region::S6_m0: {
    // C7: x1 = -t1 sin theta, y1 = t1 cos theta
    r.trajectories.push_back({Covector(std::atan2(-q.x, q.y), 0.0, 0.0), std::hypot(q.x, q.y)});
    break;
  }
  case Region::S6_pp:
  case Region::S6_pm:
  case Region::S6_mp:
  case Region::S6_mm: {
    // C6 with midpoint angle -i pi/2 and sgn c = j; solve z/x^2 = ratio(p) for |p| in (0, pi)
    const int i        = sign(q.x);
    const int j        = sign(q.z);
    const double ratio = std::abs(q.z) / (q.x * q.x);
    double lo = 0.0, hi = pi;
    // bracket away from the endpoints, ratio(p) ~ p/6 near 0 and blows up at pi
    double a = std::min(1e-3, 3.0 * ratio), b = pi - 1e-3;
    while (detail::s6_ratio(a) > ratio && a > 1e-300) { a *= 0.5; }
    while (detail::s6_ratio(b) < ratio && pi - b > 1e-15) { b = 0.5 * (b + pi); }
    lo = a;
    hi = b;
    auto g         = [&](double p) { return detail::s6_ratio(p) - ratio; };
    const double P = detail::toms748_root(g, lo, hi, g(lo), g(hi));
    const double C = 2.0 * std::sin(P) / std::abs(q.x);
    const double c = j * C;
    const double p = j * P;
    const double tau = -i * 0.5 * pi;
    r.trajectories.push_back({Covector(tau - p, c, 0.0), 2.0 * P / C});
    break;
  }
  case Region::S6_0p:
  case Region::S6_0m: {
    // two C6 trajectories closing after a full turn, midpoint angles +-pi/2
    const int j    = region == Region::S6_0p ? 1 : -1;
    const double C = std::sqrt(pi / std::abs(q.z));
    const double p = j * pi;
    for (double tau : {0.5 * pi, -0.5 * pi}) { r.trajectories.push_back({Covector(tau - p, j * C, 0.0), 2.0 * pi / C}); }
    break;
  }
  default:
    throw WrongRegion("solve_special: target in region " + std::string(to_string(region)) + " has no closed-form synthesis");
  }
  return detail::finish(std::move(r), q, strat_tol);
}

// ---------------------------------------------------------------------------
// Generic terminal points
// ---------------------------------------------------------------------------

/// Index i of the domain D_i containing nu, if any.
inline std::optional<int> in_domain(const TimedCovector & nu, double tol = default_strat_tol)
{
  if (!(nu.t > 0.0)) { return std::nullopt; }
  const Midpoint m = midpoint(nu, tol);
  const double s   = std::sin(m.theta_half);
  if (s == 0.0 || m.c_half == 0.0) { return std::nullopt; }
  if (!t_max1(nu.lambda, tol).exceeds(nu.t)) { return std::nullopt; }
  if (s > 0.0) { return m.c_half > 0.0 ? 1 : 2; }
  return m.c_half < 0.0 ? 3 : 4;
}

struct SolveOptions
{
  double tol        = 1e-10;  // accepted scaled residual
  double strat_tol  = default_strat_tol;
  double region_tol = default_region_tol;
  int max_iterations = 60;
  /// extra converged starts compared against the accepted solution
  int uniqueness_checks = 2;
  /// starts tried after acceptance while looking for those checks
  int uniqueness_budget = 12;
};

namespace detail {

struct Chart
{
  double theta_half, c_half, alpha, t;
};

inline TimedCovector from_chart(const Chart & u, double tol)
{
  const Covector mid(u.theta_half, u.c_half, u.alpha);
  return {flow(mid, -0.5 * u.t, tol), u.t};
}

// sign pattern (sin theta_half, c_half) of D_i
inline std::array<int, 2> domain_signs(int i)
{
  switch (i) {
  case 1: return {1, 1};
  case 2: return {1, -1};
  case 3: return {-1, -1};
  default: return {-1, 1};
  }
}

inline bool chart_in_domain(const Chart & u, int i, double tol)
{
  const auto sg = domain_signs(i);
  if (!(u.t > 0.0) || sign(std::sin(u.theta_half)) != sg[0] || sign(u.c_half) != sg[1]) { return false; }
  return t_max1(Covector(u.theta_half, u.c_half, u.alpha), tol).exceeds(u.t);
}

using Vec4 = Eigen::Vector4d;

inline Vec4 chart_residual(const Chart & u, const State & q, double tol)
{
  const State d = exp(from_chart(u, tol), tol) - q;
  return {d.x, d.y, d.z, d.v};
}

inline Chart operator+(const Chart & u, const Vec4 & d)
{
  return {u.theta_half + d[0], u.c_half + d[1], u.alpha + d[2], u.t + d[3]};
}

struct NewtonOutcome
{
  Chart u;
  double residual;
  bool converged;
};

// Damped Newton with central-difference Jacobian, iterates kept inside D_i.
inline NewtonOutcome newton(Chart u, const State & q, int i, const SolveOptions & o)
{
  Vec4 F = chart_residual(u, q, o.strat_tol);
  double r = F.cwiseAbs().maxCoeff();
  for (int it = 0; it < o.max_iterations && r > 0.0; ++it) {
    Eigen::Matrix4d J;
    const std::array<double, 4> base{u.theta_half, u.c_half, u.alpha, u.t};
    for (int col = 0; col < 4; ++col) {
      const double h = 1e-6 * (1.0 + std::abs(base[col]));
      Vec4 e         = Vec4::Zero();
      e[col]         = h;
      J.col(col)     = (chart_residual(u + e, q, o.strat_tol) - chart_residual(u + (-e), q, o.strat_tol)) / (2.0 * h);
    }
    const auto lu = J.fullPivLu();
    if (lu.rank() < 4) { break; }
    const Vec4 step = lu.solve(-F);

    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half, lambda *= 0.5) {
      const Chart trial = u + lambda * step;
      if (!chart_in_domain(trial, i, o.strat_tol)) { continue; }
      const Vec4 Ft   = chart_residual(trial, q, o.strat_tol);
      const double rt = Ft.cwiseAbs().maxCoeff();
      if (rt < r) {
        u        = trial;
        F        = Ft;
        r        = rt;
        improved = true;
        break;
      }
    }
    if (!improved) { break; }
  }
  return {u, r, r <= o.tol};
}

// Starts in D_i for a target of unit homogeneous norm, scaled with t so that
// c t and alpha t^2 cover one period of the pendulum.
inline std::vector<Chart> start_grid(int i, double tol)
{
  constexpr std::array<double, 5> theta_abs{0.15, 0.35, 0.5, 0.65, 0.85};  // fractions of pi
  constexpr std::array<double, 5> ct{0.5, 1.5, 3.0, 4.5, 6.0};
  constexpr std::array<double, 7> at2{-40.0, -10.0, -2.0, 0.0, 2.0, 10.0, 40.0};
  constexpr int n_t    = 8;
  constexpr double t_hi = 7.0;
  const auto sg         = domain_signs(i);

  std::vector<Chart> out;
  out.reserve(theta_abs.size() * ct.size() * at2.size() * n_t);
  for (int jt = 0; jt < n_t; ++jt) {
    const double t = t_hi * (jt + 0.5) / n_t;
    for (double th : theta_abs) {
      for (double w : ct) {
        for (double a : at2) {
          const Chart u{sg[0] * th * std::numbers::pi, sg[1] * w / t, a / (t * t), t};
          if (chart_in_domain(u, i, tol)) { out.push_back(u); }
        }
      }
    }
  }
  return out;
}

inline double chart_distance(const Chart & a, const Chart & b)
{
  return std::max({std::abs(wrap_angle(a.theta_half - b.theta_half)), std::abs(a.c_half - b.c_half),
                   std::abs(a.alpha - b.alpha), std::abs(a.t - b.t)});
}

}  // namespace detail

/**
 * Unique preimage in D_i of a target in M_i. The target is first dilated to
 * unit homogeneous norm. Starts from a fixed grid are tried in order of their
 * initial residual; after the first converged start a few further converged
 * starts are compared with it.
 */
inline SynthesisResult solve_generic(const State & q, const SolveOptions & o = {})
{
  const Region region = classify_target(q, o.region_tol);
  const int i         = quadrant_index(region);
  if (i == 0) { throw WrongRegion("solve_generic: target in region " + std::string(to_string(region)) + ", expected M1..M4"); }

  const double s  = homogeneous_norm(q);
  const State qn  = dilate_state(1.0 / s, q);
  auto starts     = detail::start_grid(i, o.strat_tol);

  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(starts.size());
  for (std::size_t n = 0; n < starts.size(); ++n) {
    const double r0 = detail::chart_residual(starts[n], qn, o.strat_tol).squaredNorm();
    order.emplace_back(std::isfinite(r0) ? r0 : HUGE_VAL, n);
  }
  std::sort(order.begin(), order.end());

  std::optional<detail::NewtonOutcome> best;
  int checks = 0, after = 0;
  double disagreement = 0.0;
  for (const auto & [r0, n] : order) {
    if (best && (checks >= o.uniqueness_checks || after >= o.uniqueness_budget)) { break; }
    const auto out = detail::newton(starts[n], qn, i, o);
    if (best) { ++after; }
    if (!out.converged) { continue; }
    if (!best) {
      best = out;
      continue;
    }
    ++checks;
    disagreement = std::max(disagreement, detail::chart_distance(out.u, best->u));
  }
  if (!best) {
    throw NonConvergence("solve_generic: no start converged for target in " + std::string(to_string(region)));
  }

  SynthesisResult r;
  r.region             = region;
  r.uniqueness_checks  = checks;
  r.start_disagreement = disagreement;
  r.trajectories.push_back(dilate(s, detail::from_chart(best->u, o.strat_tol)));
  return detail::finish(std::move(r), q, o.strat_tol);
}

/// Optimal trajectories for any target; throws Unsupported on the remaining part of M'.
inline SynthesisResult synthesize(const State & q, const SolveOptions & o = {})
{
  const Region region = classify_target(q, o.region_tol);
  if (region == Region::Origin) { return {}; }
  if (region == Region::Mprime_other) {
    throw Unsupported("target with x z = 0 outside A, L and S6: optimal synthesis not implemented");
  }
  if (is_special(region)) { return solve_special(q, o.region_tol, o.strat_tol); }
  return solve_generic(q, o);
}

/// Sub-Riemannian distance from the identity, the length t1 of an optimal trajectory.
inline double sr_distance(const State & q, const SolveOptions & o = {}) { return synthesize(q, o).sr_distance; }

}  // namespace engel
