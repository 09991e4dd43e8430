#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "symsq/gamma.hpp"
#include "symsq/precision.hpp"
#include "symsq/real.hpp"

namespace symsq {

namespace detail {

// Euler–Maclaurin remainder data for sum_{n >= 0} (n + y)^-s with y >= M:
//   y^(1-s)/(s-1) + y^-s/2 + sum_j c_j y^(-s-2j+1),  c_j = B_2j/(2j)! (s)_(2j-1).
struct EulerMaclaurin {
  Real s;
  long M = 0;
  std::vector<Real> c;
  bool half = false;

  bool unit = false;

  // allow_unit: at s = 1 the pole term y^(1-s)/(s-1) is replaced by -log y, valid
  // when the caller sums against weights with zero total (character sums).
  EulerMaclaurin(const Real& s_in, long wp, bool allow_unit = false) : s(s_in) {
    unit = (s == Real(1));
    if (unit && !allow_unit) throw std::domain_error("hurwitz_zeta: pole at s = 1");
    half = (s == Real(0.5));
    double sd = std::fabs(s.to_double());
    M = static_cast<long>(std::ceil(static_cast<double>(wp) * std::log(2.0) / (2 * std::numbers::pi) * 1.15 + sd)) + 4;
    auto& bc = BernoulliCache::instance();
    Real poch = s;  // (s)_(2j-1)
    double y = static_cast<double>(M);
    double lg_bound = -static_cast<double>(wp) - 4;
    for (int j = 1; j < 4000; ++j) {
      Real cj = bc.scaled(j) * poch;
      double lt = log2_abs(cj) - (2.0 * j - 1) * std::log2(y);
      c.push_back(std::move(cj));
      if (lt < lg_bound) return;
      poch *= (s + (2 * j - 1)) * (s + 2 * j);
    }
    throw ConvergenceError("Euler–Maclaurin: tail does not converge");
  }

  // y^-s
  Real power(const Real& y) const { return half ? rec_sqrt(y) : pow(y, -s); }

  Real tail(const Real& y) const {
    Real p = power(y);
    Real r = unit ? Real(-log(y) + p / 2) : Real(p * y / (s - 1) + p / 2);
    Real w = 1 / sqr(y);
    Real t = p * y;
    for (const auto& cj : c) {
      t *= w;
      r += cj * t;
    }
    return r;
  }
};

}  // namespace detail

inline Real hurwitz_zeta(const Real& s, const Real& a, const PrecisionContext& ctx) {
  if (a <= 0.0 || a > 1.0) throw std::domain_error("hurwitz_zeta: need 0 < a <= 1");
  long wp = ctx.internal_bits() + 8;
  WorkingPrecision guard(wp);
  detail::EulerMaclaurin em(s, wp);
  Real sum = 0;
  for (long n = 0; n < em.M; ++n) sum += em.power(a + n);
  sum += em.tail(a + em.M);
  return sum.rounded(ctx.bits);
}

inline Real riemann_zeta(const Real& s, const PrecisionContext& ctx) { return hurwitz_zeta(s, Real(1), ctx); }

// Lerch data for alpha = a/q: zeta(alpha, 0, s) and the periodic zetas
// F(+-alpha, 1-s) = sum_{n>=1} e(+-n alpha) n^(s-1), stored as real/imaginary parts.
struct LerchTriple {
  Real zeta_shift;
  Real twist_plus_re, twist_plus_im;
  Real twist_minus_re, twist_minus_im;

  // Residual of zeta(alpha,0,s) = Gamma(1-s)/(2pi)^(1-s) (-i e(s/4) F(alpha) + i e(-s/4) F(-alpha)).
  Real fe_residual(const Real& s, const PrecisionContext& ctx) const {
    WorkingPrecision guard(ctx.internal_bits());
    Real pi = const_pi();
    Real c = cos(pi * s / 2), sn = sin(pi * s / 2);
    // -i e(s/4) F+ + i e(-s/4) F-, expanded into real and imaginary parts.
    Real re = sn * twist_plus_re + c * twist_plus_im + sn * twist_minus_re - c * twist_minus_im;
    Real im = -c * twist_plus_re + sn * twist_plus_im + c * twist_minus_re + sn * twist_minus_im;
    Real pref = gamma(1 - s, ctx) / pow(2 * pi, 1 - s);
    Real r1 = zeta_shift - pref * re;
    Real r2 = pref * im;
    return hypot(r1, r2).rounded(ctx.bits);
  }
};

inline LerchTriple lerch_pair(long a, long q, const Real& s, const PrecisionContext& ctx) {
  if (q < 1 || q > 10000) throw std::domain_error("lerch_pair: denominator must be in [1, 1e4]");
  if (s == Real(1) || s == Real(0)) throw std::domain_error("lerch_pair: pole configuration");
  a %= q;
  if (a <= 0) a += q;
  long wp = ctx.internal_bits() + 8;
  WorkingPrecision guard(wp);
  PrecisionContext c2 = ctx;
  c2.bits = wp;
  LerchTriple t;
  Real qq(q);
  t.zeta_shift = hurwitz_zeta(s, Real(a) / qq, c2);
  Real s1 = 1 - s;
  Real cre = 0, cim = 0;
  Real two_pi_q = 2 * const_pi() / qq;
  Real sn, cs;
  for (long r = 1; r <= q; ++r) {
    Real h = hurwitz_zeta(s1, Real(r) / qq, c2);
    long ph = (r * a) % q;
    sin_cos(two_pi_q * ph, sn, cs);
    cre += cs * h;
    cim += sn * h;
  }
  Real scale = pow(qq, -s1);
  cre *= scale;
  cim *= scale;
  t.twist_plus_re = cre;
  t.twist_plus_im = cim;
  t.twist_minus_re = cre;
  t.twist_minus_im = -cim;
  return t;
}

}  // namespace symsq
