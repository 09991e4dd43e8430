#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "symsq/precision.hpp"
#include "symsq/real.hpp"

namespace symsq {

namespace detail {

// Number of Hankel terms needed so the smallest term is below 2^-bits, or -1 if
// the asymptotic series bottoms out first.
inline long hankel_terms(double nu, double x, double bits) {
  double mu = 4 * nu * nu, lt = 0;
  bool decreasing = false;
  for (long k = 1; k < 100000; ++k) {
    double r = std::fabs(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * x);
    if (r == 0) return k;
    lt += std::log2(r);
    if (r < 1) decreasing = true;
    if (decreasing && r >= 1) return -1;
    if (lt < -bits) return k;
  }
  return -1;
}

// Hankel P, Q for integer order at working precision.
inline void hankel_pq(long nu, const Real& x, long terms, Real& P, Real& Q) {
  Real mu = Real(4) * nu * nu;
  Real a = 1;
  P = 1;
  Q = 0;
  Real ex = 8 * x;
  for (long k = 1; k <= terms + 1; ++k) {
    a *= mu - (2 * k - 1) * (2 * k - 1);
    a /= ex * k;
    long r = k % 4;
    if (r == 0) P += a;
    else if (r == 1) Q += a;
    else if (r == 2) P -= a;
    else Q -= a;
  }
}

inline Real hankel_phase(long nu, const Real& x) { return x - const_pi() * (Real(nu) / 2 + 0.25); }

// log2 of the largest ascending-series term (x/2)^(2j+nu)/(j!(j+nu)!).
inline double ascending_max_log2(double nu, double x) {
  double best = -1e300;
  double lx = std::log(x / 2);
  for (long j = 0;; ++j) {
    double lt = ((2.0 * j + nu) * lx - std::lgamma(j + 1.0) - std::lgamma(j + nu + 1.0)) / std::log(2.0);
    best = std::max(best, lt);
    if (j > x && lt < best - 60) break;
  }
  return best;
}

inline long bessel_extra_bits(const Real& x) {
  double xd = x.to_double();
  return static_cast<long>(std::ceil(std::log2(std::fabs(xd) + 2))) + 4;
}

}  // namespace detail

// J_nu(x) for integer 0 <= nu <= 1e4 and 0 <= x <= 1e4.
inline Real bessel_j(long nu, const Real& x, const PrecisionContext& ctx) {
  if (nu < 0 || nu > 10000) throw std::domain_error("bessel_j: order out of range");
  if (x < 0.0 || x > 10000.0) throw std::domain_error("bessel_j: argument out of range");
  if (x.is_zero()) return Real(nu == 0 ? 1 : 0).rounded(ctx.bits);
  double xd = x.to_double();
  long wp = ctx.internal_bits() + detail::bessel_extra_bits(x);
  long ht = detail::hankel_terms(static_cast<double>(nu), xd, static_cast<double>(wp));
  if (ht > 0) {
    WorkingPrecision guard(wp);
    Real P, Q;
    detail::hankel_pq(nu, x, ht, P, Q);
    Real w = detail::hankel_phase(nu, x);
    Real s, c;
    sin_cos(w, s, c);
    Real r = sqrt(2 / (const_pi() * x)) * (P * c - Q * s);
    return r.rounded(ctx.bits);
  }
  double maxl = detail::ascending_max_log2(static_cast<double>(nu), xd);
  long extra = std::max(0L, static_cast<long>(std::ceil(maxl))) + 8;
  for (int attempt = 0; attempt < 3; ++attempt) {
    long p = ctx.internal_bits() + extra;
    WorkingPrecision guard(p);
    Real half = x / 2;
    Real u = sqr(half);
    Real t = pow(half, nu);
    for (long i = 2; i <= nu; ++i) t /= i;
    Real sum = t;
    for (long j = 1;; ++j) {
      t *= u;
      t /= j * (j + nu);
      t = -t;
      sum += t;
      if (j > xd && log2_abs(t) < log2_abs(sum) - p) break;
      if (j > 4 * (xd + 10) + 100000) throw ConvergenceError("bessel_j: series did not converge");
    }
    double loss = maxl - log2_abs(sum);
    if (loss <= static_cast<double>(extra) - 4 || attempt == 2) return sum.rounded(ctx.bits);
    extra = static_cast<long>(std::ceil(loss)) + 16;
    if (extra > 40000) throw ConvergenceError("bessel_j: unreachable precision");
  }
  throw ConvergenceError("bessel_j: unreachable precision");
}

namespace detail {

// Y_0 and Y_1 by the logarithmic ascending series; needs extra bits ~ 1.44 x.
inline void bessel_y_series(const Real& x, long wp, Real* y0, Real* y1) {
  WorkingPrecision guard(wp);
  Real half = x / 2;
  Real u = sqr(half);
  Real lg = log(half);
  Real gam = const_euler();
  Real pi = const_pi();
  // order 0
  if (y0) {
    Real t = 1, sj0 = 1, sh = 0, H = 0;
    for (long j = 1;; ++j) {
      t *= u;
      t /= j * j;
      t = -t;
      H += Real(1) / j;
      sj0 += t;
      sh -= t * H;
      if (j > x.to_double() && log2_abs(t) + 8 < -wp) break;
    }
    *y0 = 2 / pi * ((lg + gam) * sj0 + sh);
  }
  if (y1) {
    // t_j = (-1)^j (x/2)^(2j+1)/(j!(j+1)!), psi(j+1)+psi(j+2) = -2 gamma + H_j + H_{j+1}
    Real t = half, sj1 = half, H = 0;
    Real sp = (-2 * gam + 1) * t;
    for (long j = 1;; ++j) {
      t *= u;
      t /= j * (j + 1);
      t = -t;
      H += Real(1) / j;
      sj1 += t;
      sp += t * (-2 * gam + 2 * H + Real(1) / (j + 1));
      if (j > x.to_double() && log2_abs(t) + 8 < -wp) break;
    }
    *y1 = 2 / pi * lg * sj1 - 2 / (pi * x) - sp / pi;
  }
}

inline void bessel_i_series(const Real& x, long wp, Real* i0, Real* i1) {
  WorkingPrecision guard(wp);
  Real half = x / 2;
  Real u = sqr(half);
  if (i0) {
    Real t = 1, s = 1;
    for (long j = 1;; ++j) {
      t *= u;
      t /= j * j;
      s += t;
      if (j > x.to_double() && log2_abs(t) < log2_abs(s) - wp) break;
    }
    *i0 = s;
  }
  if (i1) {
    Real t = half, s = half;
    for (long j = 1;; ++j) {
      t *= u;
      t /= j * (j + 1);
      s += t;
      if (j > x.to_double() && log2_abs(t) < log2_abs(s) - wp) break;
    }
    *i1 = s;
  }
}

inline void bessel_k_series(const Real& x, long wp, Real* k0, Real* k1) {
  WorkingPrecision guard(wp);
  Real half = x / 2;
  Real u = sqr(half);
  Real lg = log(half);
  Real gam = const_euler();
  if (k0) {
    Real t = 1, si = 1, sh = 0, H = 0;
    for (long j = 1;; ++j) {
      t *= u;
      t /= j * j;
      H += Real(1) / j;
      si += t;
      sh += t * H;
      if (j > x.to_double() && log2_abs(t) + log2_abs(H) < log2_abs(si) - wp) break;
    }
    *k0 = -(lg + gam) * si + sh;
  }
  if (k1) {
    Real t = 1, s1 = half, sp = (-2 * gam + 1), H = 0;
    Real tt = half;  // (x/2)^(2j+1)/(j!(j+1)!)
    for (long j = 1;; ++j) {
      t *= u;
      t /= j * (j + 1);
      H += Real(1) / j;
      sp += t * (-2 * gam + 2 * H + Real(1) / (j + 1));
      tt *= u;
      tt /= j * (j + 1);
      s1 += tt;
      if (j > x.to_double() && log2_abs(t) + 4 < log2_abs(sp) - wp) break;
    }
    *k1 = 1 / x + lg * s1 - x / 4 * sp;
  }
}

inline Real bessel_k_asymptotic(long nu, const Real& x, long terms) {
  Real mu = Real(4) * nu * nu;
  Real a = 1, s = 1;
  Real ex = 8 * x;
  for (long k = 1; k <= terms + 1; ++k) {
    a *= mu - (2 * k - 1) * (2 * k - 1);
    a /= ex * k;
    s += a;
  }
  return sqrt(const_pi() / (2 * x)) * exp(-x) * s;
}

inline Real bessel_y_int(long nu, const Real& x, const PrecisionContext& ctx) {
  if (!(x > 0.0)) throw std::domain_error("bessel_y: x must be positive");
  double xd = x.to_double();
  long wp = ctx.internal_bits() + bessel_extra_bits(x);
  long ht = hankel_terms(static_cast<double>(nu), xd, static_cast<double>(wp));
  if (ht > 0) {
    WorkingPrecision guard(wp);
    Real P, Q;
    hankel_pq(nu, x, ht, P, Q);
    Real w = hankel_phase(nu, x);
    Real s, c;
    sin_cos(w, s, c);
    return (sqrt(2 / (const_pi() * x)) * (P * s + Q * c)).rounded(ctx.bits);
  }
  long ws = wp + static_cast<long>(std::ceil(1.4427 * xd)) + 16;
  Real r;
  if (nu == 0) bessel_y_series(x, ws, &r, nullptr);
  else bessel_y_series(x, ws, nullptr, &r);
  return r.rounded(ctx.bits);
}

inline Real bessel_k_int(long nu, const Real& x, const PrecisionContext& ctx) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k: x must be positive");
  double xd = x.to_double();
  long wp = ctx.internal_bits() + 8;
  long ht = hankel_terms(static_cast<double>(nu), xd, static_cast<double>(wp));
  if (ht > 0) {
    WorkingPrecision guard(wp);
    return bessel_k_asymptotic(nu, x, ht).rounded(ctx.bits);
  }
  long ws = wp + static_cast<long>(std::ceil(2 * 1.4427 * xd)) + 16;
  Real r;
  if (nu == 0) bessel_k_series(x, ws, &r, nullptr);
  else bessel_k_series(x, ws, nullptr, &r);
  return r.rounded(ctx.bits);
}

}  // namespace detail

inline Real bessel_y0(const Real& x, const PrecisionContext& ctx) { return detail::bessel_y_int(0, x, ctx); }
inline Real bessel_y1(const Real& x, const PrecisionContext& ctx) { return detail::bessel_y_int(1, x, ctx); }
inline Real bessel_k0(const Real& x, const PrecisionContext& ctx) { return detail::bessel_k_int(0, x, ctx); }
inline Real bessel_k1(const Real& x, const PrecisionContext& ctx) { return detail::bessel_k_int(1, x, ctx); }

inline Real bessel_i0(const Real& x, const PrecisionContext& ctx) {
  Real r;
  detail::bessel_i_series(abs(x), ctx.internal_bits() + 8, &r, nullptr);
  return r.rounded(ctx.bits);
}
inline Real bessel_i1(const Real& x, const PrecisionContext& ctx) {
  Real r;
  detail::bessel_i_series(x, ctx.internal_bits() + 8, nullptr, &r);
  return r.rounded(ctx.bits);
}

}  // namespace symsq
