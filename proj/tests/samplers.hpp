#pragma once

// Deterministic random covectors, per stratum and per preimage domain.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "engel/engel.hpp"

namespace sample {

using engel::Covector;
using engel::StratumTag;

class Rng
{
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  int sign() { return uniform(0.0, 1.0) < 0.5 ? -1 : 1; }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }

private:
  std::mt19937_64 gen_;
};

/// Covector of the given stratum with |alpha| in [0.1, 3] and |c| up to about 3.
inline Covector in_stratum(Rng & r, StratumTag tag)
{
  constexpr double pi = std::numbers::pi;
  const double a      = r.uniform(0.1, 3.0);
  const int sa        = r.sign();
  switch (tag) {
  case StratumTag::C1:
  case StratumTag::C2: {
    const engel::elliptic::Modulus k(r.uniform(0.02, 0.98));
    const double sigma = std::sqrt(a);
    const double K     = engel::elliptic::complete_integrals(k).K;
    const double span  = tag == StratumTag::C1 ? 4.0 * K / sigma : 2.0 * k.k() * K / sigma;
    const engel::EllipticCoords e{r.uniform(0.0, span), k, sigma, {tag, sa}, r.sign()};
    return engel::from_elliptic(e);
  }
  case StratumTag::C3: {
    // sin(theta/2) = sgn c tanh u, cos(theta/2) = sech u, c = 2 sgn c sigma sech u at alpha > 0
    const double u  = r.uniform(-3.0, 3.0);
    const int sc    = r.sign();
    const double th = 2.0 * std::atan2(sc * std::tanh(u), 1.0 / std::cosh(u));
    const double c  = 2.0 * sc * std::sqrt(a) / std::cosh(u);
    return sa > 0 ? Covector(th, c, a) : Covector(th + pi, c, -a);
  }
  case StratumTag::C4: return sa > 0 ? Covector(0.0, 0.0, a) : Covector(pi, 0.0, -a);
  case StratumTag::C5: return sa > 0 ? Covector(pi, 0.0, a) : Covector(0.0, 0.0, -a);
  case StratumTag::C6: return {r.uniform(-pi, pi), r.sign() * r.uniform(0.1, 3.0), 0.0};
  case StratumTag::C7: return {r.uniform(-pi, pi), 0.0, 0.0};
  }
  return {};
}

inline StratumTag any_tag(Rng & r) { return static_cast<StratumTag>(r.index(7)); }

/// Generic covector with theta, c, alpha uniform in a box.
inline Covector generic(Rng & r) { return {r.uniform(-3.2, 3.2), r.uniform(-3.0, 3.0), r.uniform(-3.0, 3.0)}; }

/// Time in (0, min(cap, frac * t_max1)].
inline double time_below_cut(Rng & r, const Covector & l, double cap, double frac = 0.95)
{
  const auto tc = engel::t_max1(l);
  const double hi = tc.is_finite() ? std::min(cap, frac * tc.value()) : cap;
  return r.uniform(0.02, 1.0) * hi;
}

/// Point of D_i, sampled through its midpoint covector; t up to 0.95 t_max1.
inline engel::TimedCovector in_domain(Rng & r, int i)
{
  constexpr double pi = std::numbers::pi;
  const int s_sin     = i <= 2 ? 1 : -1;
  const int s_c       = (i == 1 || i == 4) ? 1 : -1;
  for (;;) {
    const Covector mid(s_sin * pi * r.uniform(0.02, 0.98), s_c * r.uniform(0.05, 3.0), r.uniform(-3.0, 3.0));
    const auto tc  = engel::t_max1(mid);
    const double T = tc.is_finite() ? tc.value() : 10.0;
    const double t = 0.95 * T * r.uniform(0.05, 1.0);
    engel::TimedCovector nu{engel::flow(mid, -0.5 * t), t};
    if (engel::in_domain(nu) == i) { return nu; }
  }
}

}  // namespace sample
