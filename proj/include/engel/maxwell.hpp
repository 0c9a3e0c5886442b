#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "elliptic.hpp"
#include "pendulum.hpp"

/**
 * First Maxwell time t1_MAX along normal extremals, which is also the cut
 * time, together with its root functions and the test for a conjugate point
 * at the cut time.
 */
namespace engel {

// f_z(p, k) = dn p sn p + (p - 2 E(p)) cn p
inline double f_z(double p, const elliptic::Modulus & k)
{
  const auto j = elliptic::jacobi(p, k);
  const double eps = elliptic::incomplete_integrals(j.am, k).E;
  return j.dn * j.sn + (p - 2.0 * eps) * j.cn;
}

inline double f_z(double p, double k) { return f_z(p, elliptic::Modulus(k)); }

namespace detail {

template <class F>
double toms748_root(F f, double a, double b, double fa, double fb)
{
  std::uintmax_t iters = 200;
  const auto r         = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace detail

/// First positive root of f_z(., k). It lies in (K, 3K): f_z(K) = k' and f_z(3K) = -k'.
inline double p_z1(const elliptic::Modulus & k)
{
  const double K = elliptic::complete_integrals(k).K;
  auto f         = [&](double p) { return f_z(p, k); };
  constexpr int cells = 64;
  const double h      = 2.0 * K / cells;
  double a = K, fa = f(a);
  for (int i = 1; i <= cells; ++i) {
    const double b  = K + i * h;
    const double fb = f(b);
    if (fb == 0.0) { return b; }
    if ((fa > 0.0) != (fb > 0.0)) { return detail::toms748_root(f, a, b, fa, fb); }
    a  = b;
    fa = fb;
  }
  throw std::logic_error("p_z1: no sign change of f_z in (K, 3K) for k = " + std::to_string(k.k()));
}

inline double p_z1(double k) { return p_z1(elliptic::Modulus(k)); }

/// Modulus of the figure-eight elastica, the root of 2E(k) - K(k) in (0, 1).
inline double k0()
{
  static const double value = [] {
    auto g = [](double k) {
      const auto ce = elliptic::complete_integrals(k);
      return 2.0 * ce.E - ce.K;
    };
    return detail::toms748_root(g, 0.9, 0.92, g(0.9), g(0.92));
  }();
  return value;
}

/// Which expression realises the cut time.
enum class CutBranch {
  none,         // infinite
  c1_four_K,    // C1, 4K(k) / sigma
  c1_two_p_z1,  // C1, 2 p_z1(k) / sigma
  c2_period,    // C2, 2 k K(k) / sigma
  c6_period,    // C6, 2 pi / |c|
};

inline std::string_view to_string(CutBranch b)
{
  switch (b) {
  case CutBranch::none: return "none";
  case CutBranch::c1_four_K: return "4K";
  case CutBranch::c1_two_p_z1: return "2p_z1";
  case CutBranch::c2_period: return "2kK";
  case CutBranch::c6_period: return "2pi/c";
  }
  return "?";
}

/// Value in (0, +inf]. The infinite case carries no number.
class CutTime
{
public:
  static CutTime infinity(Stratum s) { return CutTime(0.0, true, s, CutBranch::none); }
  static CutTime finite(double t, Stratum s, CutBranch b) { return CutTime(t, false, s, b); }

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }
  double value() const
  {
    if (infinite_) { throw DomainError("cut time is infinite"); }
    return value_;
  }
  /// Strict comparison t < value, true for every t when infinite.
  bool exceeds(double t) const noexcept { return infinite_ || t < value_; }
  Stratum stratum() const noexcept { return stratum_; }
  CutBranch branch() const noexcept { return branch_; }

private:
  CutTime(double v, bool inf, Stratum s, CutBranch b) : value_(v), infinite_(inf), stratum_(s), branch_(b) {}
  double value_;
  bool infinite_;
  Stratum stratum_;
  CutBranch branch_;
};

inline CutTime t_max1(const Covector & l, double tol = default_strat_tol)
{
  const Stratum st = classify(l, tol);
  switch (st.tag) {
  case StratumTag::C1: {
    const auto e      = to_elliptic(l, tol);
    const double four_K = 4.0 * elliptic::complete_integrals(e.k).K;
    const double two_p  = 2.0 * p_z1(e.k);
    return two_p < four_K ? CutTime::finite(two_p / e.sigma, st, CutBranch::c1_two_p_z1)
                          : CutTime::finite(four_K / e.sigma, st, CutBranch::c1_four_K);
  }
  case StratumTag::C2: {
    const auto e = to_elliptic(l, tol);
    return CutTime::finite(2.0 * e.k.k() * elliptic::complete_integrals(e.k).K / e.sigma, st, CutBranch::c2_period);
  }
  case StratumTag::C6: return CutTime::finite(2.0 * std::numbers::pi / std::abs(l.c), st, CutBranch::c6_period);
  default: return CutTime::infinity(st);
  }
}

/// The cut time equals the first Maxwell time.
inline CutTime cut_time(const Covector & l, double tol = default_strat_tol) { return t_max1(l, tol); }

/// Cut time along the quotient slice lambda = (0, sin beta, cos beta), beta in [0, pi/2].
inline CutTime cut_profile(double beta, double tol = default_strat_tol)
{
  if (!(beta >= 0.0 && beta <= 0.5 * std::numbers::pi)) {
    throw DomainError("cut_profile: beta outside [0, pi/2]: " + std::to_string(beta));
  }
  return cut_time(Covector(0.0, std::sin(beta), std::cos(beta)), tol);
}

/// arccos(sqrt(5) - 2), where the profile slice meets the separatrix.
inline double beta1() { return std::acos(std::sqrt(5.0) - 2.0); }

inline constexpr double default_conj_tol = 1e-9;

/**
 * Whether the cut point of lambda is also conjugate. The tests use the
 * elliptic argument tau of the midpoint of [0, t_cut]. C1: sn tau = 0 for
 * k < k0, cn tau = 0 for k > k0, always at k = k0. C2: sn tau cn tau = 0.
 * C6: sin theta = 0.
 */
inline bool conjugate_at_cut(const Covector & l, double tol = default_strat_tol, double conj_tol = default_conj_tol)
{
  const CutTime tc = cut_time(l, tol);
  if (tc.is_infinite()) { throw DomainError("conjugate_at_cut: cut time is infinite"); }
  const double t1 = tc.value();
  switch (tc.stratum().tag) {
  case StratumTag::C1: {
    const auto e = to_elliptic(l, tol);
    const double dk = e.k.k() - k0();
    if (std::abs(dk) < conj_tol) { return true; }
    const auto j = elliptic::jacobi(e.sigma * (e.phi + 0.5 * t1), e.k);
    // the elastica arc is centred at a vertex (sn) below k0, at an inflexion (cn) above
    return std::abs(dk < 0.0 ? j.sn : j.cn) < conj_tol;
  }
  case StratumTag::C2: {
    const auto e = to_elliptic(l, tol);
    const auto j = elliptic::jacobi(e.sigma * (e.phi + 0.5 * t1) / e.k.k(), e.k);
    return std::abs(j.sn * j.cn) < conj_tol;
  }
  case StratumTag::C6: return std::abs(std::sin(l.theta)) < conj_tol;
  default: break;
  }
  throw DomainError("conjugate_at_cut: unexpected stratum");
}

}  // namespace engel
