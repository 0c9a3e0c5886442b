#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/ellint_rd.hpp>
#include <boost/math/special_functions/ellint_rf.hpp>

#include "errors.hpp"

/**
 * Jacobi elliptic functions and Legendre elliptic integrals for a real
 * modulus 0 <= k < 1.
 *
 * Complete integrals and the amplitude use the arithmetic-geometric mean
 * (descending Landen) sequence; incomplete integrals are reduced to one
 * half period and evaluated with Carlson's symmetric forms.
 *
 * The amplitude returned by jacobi() is continuous in x (it is not wrapped
 * into (-pi, pi]), so differences of the epsilon function across many
 * periods are well defined.
 */
namespace engel::elliptic {

/// Elliptic modulus with its complementary modulus k' = sqrt(1 - k^2).
class Modulus
{
public:
  explicit Modulus(double k) : k_(k), kc_(0.0)
  {
    if (!(k >= 0.0 && k < 1.0)) { throw DomainError("elliptic modulus outside [0, 1): " + std::to_string(k)); }
    kc_ = std::sqrt((1.0 - k) * (1.0 + k));
  }

  /// Use when k' is known more accurately than 1 - k^2 (k close to 1).
  static Modulus with_complement(double k, double kc)
  {
    Modulus m(k);
    if (kc > 0.0 && kc <= 1.0) { m.kc_ = kc; }
    return m;
  }

  double k() const noexcept { return k_; }
  double kc() const noexcept { return kc_; }
  double k2() const noexcept { return k_ * k_; }
  double kc2() const noexcept { return kc_ * kc_; }

private:
  double k_;
  double kc_;
};

struct CompleteIntegrals
{
  double K;
  double E;
};

struct JacobiValues
{
  double sn;
  double cn;
  double dn;
  double am;
};

struct IncompleteIntegrals
{
  double F;
  double E;
};

namespace detail {

inline constexpr int agm_max_depth = 24;

struct AgmSequence
{
  std::array<double, agm_max_depth> a{};
  std::array<double, agm_max_depth> c{};
  int n = 0;  // index of the last term
};

inline AgmSequence agm(const Modulus & m)
{
  AgmSequence s;
  double a = 1.0, b = m.kc(), c = m.k();
  s.a[0] = a;
  s.c[0] = c;
  int i = 0;
  while (i + 1 < agm_max_depth && std::abs(c) > 1e-17 * a) {
    const double an = 0.5 * (a + b);
    c               = 0.5 * (a - b);
    b               = std::sqrt(a * b);
    a               = an;
    ++i;
    s.a[i] = a;
    s.c[i] = c;
  }
  s.n = i;
  return s;
}

}  // namespace detail

inline CompleteIntegrals complete_integrals(const Modulus & m)
{
  if (m.k() == 0.0) { return {std::numbers::pi / 2, std::numbers::pi / 2}; }
  const auto s   = detail::agm(m);
  const double K = std::numbers::pi / (2.0 * s.a[s.n]);
  // E = K (1 - sum 2^(n-1) c_n^2)
  double sum = 0.0, pow2 = 0.5;
  for (int i = 0; i <= s.n; ++i, pow2 *= 2.0) { sum += pow2 * s.c[i] * s.c[i]; }
  return {K, K * (1.0 - sum)};
}

inline CompleteIntegrals complete_integrals(double k) { return complete_integrals(Modulus(k)); }

/// sn, cn, dn and the continuous amplitude am(x).
inline JacobiValues jacobi(double x, const Modulus & m)
{
  if (m.k() == 0.0) { return {std::sin(x), std::cos(x), 1.0, x}; }
  const auto s   = detail::agm(m);
  const double K = std::numbers::pi / (2.0 * s.a[s.n]);

  // am(x + 2K j) = am(x) + j pi
  const double periods = std::nearbyint(x / (2.0 * K));
  const double x0      = x - 2.0 * K * periods;

  double phi = std::ldexp(s.a[s.n] * x0, s.n);
  for (int i = s.n; i > 0; --i) { phi = 0.5 * (phi + std::asin(s.c[i] / s.a[i] * std::sin(phi))); }

  const double am = phi + periods * std::numbers::pi;
  const double sn = std::sin(am);
  const double cn = std::cos(am);
  // 1 - k^2 sn^2 rewritten to avoid cancellation as k -> 1
  const double dn = std::sqrt(cn * cn + m.kc2() * sn * sn);
  return {sn, cn, dn, am};
}

inline JacobiValues jacobi(double x, double k) { return jacobi(x, Modulus(k)); }

/// F(u, k) and E(u, k) for any real amplitude u.
inline IncompleteIntegrals incomplete_integrals(double u, const Modulus & m)
{
  if (m.k() == 0.0) { return {u, u}; }
  const double periods = std::nearbyint(u / std::numbers::pi);
  const double u0      = u - periods * std::numbers::pi;
  const double s = std::sin(u0), c = std::cos(u0);
  const double delta2 = c * c + m.kc2() * s * s;

  double F0 = 0.0, E0 = 0.0;
  if (s != 0.0) {
    const double rf = boost::math::ellint_rf(c * c, delta2, 1.0);
    const double rd = boost::math::ellint_rd(c * c, delta2, 1.0);
    F0              = s * rf;
    E0              = F0 - m.k2() * s * s * s * rd / 3.0;
  }
  if (periods == 0.0) { return {F0, E0}; }
  const auto full = complete_integrals(m);
  return {F0 + 2.0 * periods * full.K, E0 + 2.0 * periods * full.E};
}

inline IncompleteIntegrals incomplete_integrals(double u, double k) { return incomplete_integrals(u, Modulus(k)); }

/// Jacobi epsilon function, the integral of dn^2 from 0 to x.
inline double jacobi_eps(double x, const Modulus & m)
{
  if (m.k() == 0.0) { return x; }
  return incomplete_integrals(jacobi(x, m).am, m).E;
}

inline double jacobi_eps(double x, double k) { return jacobi_eps(x, Modulus(k)); }

}  // namespace engel::elliptic
