#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "engel/expmap.hpp"
#include "engel/maxwell.hpp"
#include "samplers.hpp"

using namespace engel;
constexpr double pi = std::numbers::pi;

namespace {

void expect_state(const State & a, const State & b, double tol)
{
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
  EXPECT_NEAR(a.v, b.v, tol);
}

// Sampled (lambda, t) over all strata with t <= min(10, 0.95 t_max1).
TimedCovector stratified(sample::Rng & r, int i)
{
  const auto l = sample::in_stratum(r, static_cast<StratumTag>(i % 7));
  return {l, sample::time_below_cut(r, l, 10.0)};
}

// Five-point central differences of Exp along t.
struct Derivs
{
  State d1, d2;
};

// Finite differences at h = 1e-2 resolve only moderate turning rates.
Covector moderate(sample::Rng & r, int i)
{
  for (;;) {
    const auto l = sample::in_stratum(r, static_cast<StratumTag>(i % 7));
    if (detail::energy_gaps(l).above_min < 8.0) { return l; }
  }
}

Derivs differentiate(const Covector & l, double t, double h)
{
  const State m2 = exp(l, t - 2 * h), m1 = exp(l, t - h), p1 = exp(l, t + h), p2 = exp(l, t + 2 * h), c = exp(l, t);
  auto d1 = [&](double State::*f) { return (m2.*f - 8 * (m1.*f) + 8 * (p1.*f) - p2.*f) / (12 * h); };
  auto d2 = [&](double State::*f) {
    return (-(m2.*f) + 16 * (m1.*f) - 30 * (c.*f) + 16 * (p1.*f) - p2.*f) / (12 * h * h);
  };
  return {{d1(&State::x), d1(&State::y), d1(&State::z), d1(&State::v)}, {d2(&State::x), d2(&State::y), 0.0, 0.0}};
}

}  // namespace

TEST(Exp, ZeroTimeIsOrigin)
{
  sample::Rng r(31);
  for (int i = 0; i < 50; ++i) { EXPECT_EQ(exp(sample::generic(r), 0.0), State{}); }
}

TEST(Exp, LineExample) { expect_state(exp({pi, 0, 0}, 2.0), {0, -2, 0, -4.0 / 3.0}, 1e-14); }

TEST(Exp, StableEquilibriumExample) { expect_state(exp({0, 0, 1}, 3.0), {0, 3, 0, 4.5}, 1e-14); }

TEST(Exp, CircleExample)
{
  // with u = (-sin, cos) the circle closes with v = -1/pi^2
  const State q = exp({0, pi, 0}, 2.0);
  expect_state(q, {0, 0, 1 / pi, -1 / (pi * pi)}, 1e-14);
  expect_state(q, integrate_oracle({0, pi, 0}, 2.0, 20000), 1e-10);
}

TEST(Exp, UnstableEquilibriumAndNegativeAlpha)
{
  expect_state(exp({pi, 0, 1}, 2.0), {0, -2, 0, -8.0 / 6.0}, 1e-14);
  expect_state(exp({pi, 0, -1}, 3.0), {0, -3, 0, -4.5}, 1e-14);
}

TEST(IntegrateOracle, Examples)
{
  expect_state(integrate_oracle({0, 0, 1}, 3.0, 1000), {0, 3, 0, 4.5}, 1e-10);
  expect_state(integrate_oracle({0, 0, 0}, 1.0, 1000), {0, 1, 0, 1.0 / 6.0}, 1e-12);
  EXPECT_EQ(integrate_oracle({0.3, 1, 2}, 0.0, 10), State{});
  EXPECT_THROW(integrate_oracle({0, 0, 1}, 1.0, 0), DomainError);
}

TEST(ReflectState, Examples)
{
  EXPECT_EQ(reflect_state(3, {1, 2, 3, 4}), (State{-1, 2, -3, 4}));
  EXPECT_EQ(reflect_state(7, {1, 2, 3, 4}), (State{1, -2, -3, -4}));
  EXPECT_EQ(reflect_state(1, {1, 1, 0, 0}), (State{1, 1, 0, 0}));
  EXPECT_THROW(reflect_state(0, {}), DomainError);
  EXPECT_THROW(reflect_state(8, {}), DomainError);
}

TEST(ReflectState, Involutions)
{
  const State q{0.3, -1.2, 0.7, 2.1};
  for (int i = 1; i <= 7; ++i) {
    const State b = reflect_state(i, reflect_state(i, q));
    expect_state(b, q, 1e-15);
  }
}

TEST(ReflectCovector, Examples)
{
  const TimedCovector nu{{0.4, 0.7, 1.3}, 2.0};
  const auto a = reflect_covector(4, nu);
  EXPECT_EQ(a.lambda.theta, wrap_angle(0.4 + pi));
  EXPECT_EQ(a.lambda.c, 0.7);
  EXPECT_EQ(a.lambda.alpha, -1.3);
  EXPECT_EQ(a.t, 2.0);

  const auto b = reflect_covector(3, nu);
  EXPECT_EQ(b.lambda.theta, -0.4);
  EXPECT_EQ(b.lambda.c, -0.7);
  EXPECT_EQ(b.lambda.alpha, 1.3);

  const auto e = reflect_covector(1, {{0, 0, 1}, 5.0});
  EXPECT_EQ(e.lambda.theta, 0.0);
  EXPECT_EQ(e.lambda.c, 0.0);
  EXPECT_EQ(e.lambda.alpha, 1.0);
  EXPECT_EQ(e.t, 5.0);
}

TEST(Dilate, Examples)
{
  EXPECT_EQ(dilate_state(2.0, {1, 1, 1, 1}), (State{2, 2, 4, 8}));
  EXPECT_EQ(dilate_state(1.0, {1, 2, 3, 4}), (State{1, 2, 3, 4}));
  EXPECT_EQ(dilate_state(0.5, dilate_state(2.0, {1, 2, 3, 4})), (State{1, 2, 3, 4}));

  const TimedCovector nu{{0.4, 0.6, 2.0}, 1.5};
  const auto d = dilate(2.0, nu);
  EXPECT_EQ(d.lambda.theta, 0.4);
  EXPECT_EQ(d.lambda.c, 0.3);
  EXPECT_EQ(d.lambda.alpha, 0.5);
  EXPECT_EQ(d.t, 3.0);
  const auto back = dilate(0.5, d);
  EXPECT_EQ(back.lambda.c, 0.6);
  EXPECT_EQ(back.lambda.alpha, 2.0);
  EXPECT_EQ(back.t, 1.5);

  EXPECT_THROW(dilate(0.0, nu), DomainError);
  EXPECT_THROW(dilate(-1.0, nu), DomainError);
  EXPECT_THROW(dilate_state(-2.0, {}), DomainError);
}

TEST(Exp, ReflectionsCommute)
{
  sample::Rng r(32);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto l = sample::in_stratum(r, static_cast<StratumTag>(n % 7));
    const TimedCovector nu{l, r.uniform(0.05, 8.0)};
    const State q = exp(nu);
    for (int i = 1; i <= 7; ++i) {
      const State d = reflect_state(i, q) - exp(reflect_covector(i, nu));
      worst         = std::max(worst, max_abs(d));
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Exp, DilationEquivariant)
{
  sample::Rng r(33);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto l = sample::in_stratum(r, static_cast<StratumTag>(n % 7));
    const TimedCovector nu{l, r.uniform(0.05, 8.0)};
    const State q = exp(nu);
    for (double mu : {0.1, 1.0, 7.0}) {
      // compared at unit scale, where both sides are of order one
      const State d = dilate_state(1.0 / mu, exp(dilate(mu, nu))) - q;
      worst         = std::max(worst, max_abs(d));
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Exp, AgreesWithOdeOracle)
{
  sample::Rng r(34);
  double worst = 0.0;
  for (int i = 0; i < 700; ++i) {
    const auto nu = stratified(r, i);
    const int steps = std::max(20000, static_cast<int>(8000.0 * nu.t));
    const State d   = exp(nu) - integrate_oracle(nu.lambda, nu.t, steps);
    worst         = std::max(worst, max_abs(d));
    ASSERT_LE(max_abs(d), 1e-8) << i << " " << to_string(classify(nu.lambda).tag);
  }
  RecordProperty("worst", std::to_string(worst));
}

TEST(Exp, AgreesWithOdeOracleNearStratumBoundaries)
{
  auto check = [](const Covector & l, const char * what) {
    for (double t : {0.5, 4.0, 9.0}) {
      const State d = exp(l, t) - integrate_oracle(l, t, 40000);
      ASSERT_LE(max_abs(d), 1e-8) << what << " " << to_string(classify(l).tag) << " t=" << t;
    }
  };
  for (double eps : {1e-3, 1e-6, 1e-9}) {
    for (int sa : {1, -1}) {
      // k near 1 on both sides of the separatrix
      for (auto tag : {StratumTag::C1, StratumTag::C2}) {
        check(from_elliptic({0.3, elliptic::Modulus(1.0 - eps), 1.3, {tag, sa}, 1}), "k->1");
      }
      // k -> 0 in C1 approaches the stable equilibrium
      check(from_elliptic({0.3, elliptic::Modulus(eps), 1.3, {StratumTag::C1, sa}, 1}), "k->0");
      // alpha -> 0 at fixed c approaches the circles
      check(Covector(0.7, 1.5, sa * eps), "alpha->0");
      check(Covector(0.7, -0.4, sa * eps), "alpha->0");
    }
  }
}

TEST(Exp, QuadratureMatchesClosedForm)
{
  sample::Rng r(35);
  for (int i = 0; i < 300; ++i) {
    const auto tag = static_cast<StratumTag>(i % 4 == 3 ? 5 : i % 4);  // C1, C2, C3, C6
    const auto l   = sample::in_stratum(r, tag);
    const double t = r.uniform(0.1, 10.0);
    const State d  = exp(l, t) - exp_by_quadrature(l, t);
    ASSERT_LE(max_abs(d), 1e-9) << i;
  }
}

TEST(Exp, UnitSpeedAndHorizontality)
{
  sample::Rng r(36);
  constexpr double h = 1e-2;
  for (int i = 0; i < 140; ++i) {
    const auto l   = moderate(r, i);
    const double t = r.uniform(0.2, 6.0);
    const State q  = exp(l, t);
    const auto d   = differentiate(l, t, h);
    ASSERT_NEAR(d.d1.x * d.d1.x + d.d1.y * d.d1.y, 1.0, 1e-6) << i;
    ASSERT_NEAR(d.d1.z, 0.5 * (q.x * d.d1.y - q.y * d.d1.x), 1e-6) << i;
    ASSERT_NEAR(d.d1.v, 0.5 * (q.x * q.x + q.y * q.y) * d.d1.y, 1e-6) << i;
  }
}

TEST(Exp, ElasticaCurvatureIsC)
{
  sample::Rng r(37);
  constexpr double h = 1e-2;
  for (int i = 0; i < 140; ++i) {
    const auto l   = moderate(r, i);
    const double t = r.uniform(0.2, 6.0);
    const auto d   = differentiate(l, t, h);
    const double kappa = d.d1.x * d.d2.y - d.d1.y * d.d2.x;
    ASSERT_NEAR(kappa, flow(l, t).c, 1e-6) << i;
  }
}
