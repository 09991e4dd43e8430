#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "symsq/complex_gamma.hpp"
#include "symsq/gamma.hpp"
#include "symsq/hyp2f1.hpp"
#include "symsq/precision.hpp"
#include "symsq/real.hpp"

namespace symsq {

struct WeightParam {
  long two_k = 12;
  long k = 6;
  double m = 11.5;      // 2k - 1/2
  double u_osc = 11;    // 2k - 1
  double u_exp = 5.5;   // k - 1/2

  static WeightParam from_two_k(long two_k) {
    if (two_k < 12 || two_k % 2 != 0) throw std::invalid_argument("weight must be even and >= 12");
    WeightParam w;
    w.two_k = two_k;
    w.k = two_k / 2;
    w.m = static_cast<double>(two_k) - 0.5;
    w.u_osc = static_cast<double>(two_k) - 1;
    w.u_exp = static_cast<double>(w.k) - 0.5;
    return w;
  }
};

namespace detail {

inline PrecisionContext widened(const PrecisionContext& ctx, long extra) {
  PrecisionContext c = ctx;
  c.bits = ctx.internal_bits() + extra;
  return c;
}

inline long sign_pow(long k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace detail

// Gamma(k-1/4) Gamma(3/4-k) / Gamma(1/2) = (-1)^k sqrt(2 pi) Gamma(k-1/4)/Gamma(k+1/4).
inline Real phi_prefactor(long k, const PrecisionContext& ctx) {
  auto hi = detail::widened(ctx, 0);
  WorkingPrecision guard(hi.bits);
  Real kr(k);
  Real r = detail::sign_pow(k) * sqrt(2 * const_pi()) * gamma_ratio(kr - 0.25, kr + 0.25, hi);
  return r.rounded(ctx.bits);
}

inline Real phi_k(const Real& x, long k, const PrecisionContext& ctx) {
  if (x < 0.0 || !(x < 1.0)) throw std::domain_error("phi_k: need 0 <= x < 1");
  if (k < 1) throw std::domain_error("phi_k: k >= 1");
  auto hi = detail::widened(ctx, 0);
  WorkingPrecision guard(hi.bits);
  Real kr(k);
  Real pre = phi_prefactor(k, hi);
  if (x.is_zero()) return pre.rounded(ctx.bits);
  Real f = gauss_2f1(kr - 0.25, Real(0.75) - kr, Real(0.5), x, hi);
  return (pre * f).rounded(ctx.bits);
}

inline Real psi_prefactor(long k, const PrecisionContext& ctx) {
  auto hi = detail::widened(ctx, 8);
  WorkingPrecision guard(hi.bits);
  Real kr(k);
  Real r = exp(log_gamma(kr - 0.25, hi) + log_gamma(kr + 0.25, hi) - log_gamma(Real(2 * k), hi));
  return r.rounded(ctx.bits);
}

inline Real psi_k(const Real& x, long k, const PrecisionContext& ctx) {
  if (!(x > 0.0) || !(x < 1.0)) throw std::domain_error("psi_k: need 0 < x < 1");
  if (k < 1) throw std::domain_error("psi_k: k >= 1");
  auto hi = detail::widened(ctx, 0);
  WorkingPrecision guard(hi.bits);
  Real kr(k);
  Real f = gauss_2f1(kr - 0.25, kr + 0.25, Real(2 * k), x, hi);
  return (pow(x, k) * psi_prefactor(k, hi) * f).rounded(ctx.bits);
}

// G(y) = 2F1(m, 1-m, 1; y), m = 2k - 1/2, by series (y <= 1/2).
inline Real legendre_g_series(const Real& y, long k, const PrecisionContext& ctx) {
  WorkingPrecision guard(ctx.internal_bits());
  Real m = Real(2 * k) - 0.5;
  return gauss_2f1(m, 1 - m, Real(1), y, ctx);
}

// G(1-y) = (1/pi) [(log y - 2 psi(1) + 2 psi(m)) G(y) + sum_n t_n d_n], where
// sum t_n d_n is (d/da + d/db + 2 d/dc) 2F1(a, b, c; y) at (m, 1-m, 1).
inline Real legendre_g_reflected(const Real& y, long k, const PrecisionContext& ctx) {
  if (!(y > 0.0) || y > 0.5) throw std::domain_error("legendre_g_reflected: need 0 < y <= 1/2");
  auto hi = detail::widened(ctx, 16);
  WorkingPrecision guard(hi.bits);
  Real m = Real(2 * k) - 0.5;
  auto r = gauss_2f1_ext(m, 1 - m, Real(1), y, hi, true);
  Real c = log(y) + 2 * const_euler() + 2 * digamma(m, hi);
  return ((c * r.value + r.param_derivative) / const_pi()).rounded(ctx.bits);
}

inline Real legendre_g(const Real& y, long k, const PrecisionContext& ctx) {
  if (!(y > 0.0) || !(y < 1.0)) throw std::domain_error("legendre_g: need 0 < y < 1");
  if (y <= 0.5) return legendre_g_series(y, k, ctx);
  WorkingPrecision guard(ctx.internal_bits());
  return legendre_g_reflected(1 - y, k, ctx);
}

// G'(y) = m(1-m) 2F1(m+1, 2-m, 2; y), series for y <= 1/2.
inline Real legendre_g_derivative(const Real& y, long k, const PrecisionContext& ctx) {
  if (!(y > 0.0) || y > 0.5) throw std::domain_error("legendre_g_derivative: need 0 < y <= 1/2");
  auto hi = detail::widened(ctx, 0);
  WorkingPrecision guard(hi.bits);
  Real m = Real(2 * k) - 0.5;
  return (m * (1 - m) * gauss_2f1(m + 1, 2 - m, Real(2), y, hi)).rounded(ctx.bits);
}

// Closed forms of I(x) = (1/2 pi i) int G(t) dt.
inline Real mb_closed_above_two(const Real& x, const Real& s, long k, const PrecisionContext& ctx) {
  if (!(x > 2.0)) throw std::domain_error("mb_closed_above_two: need x > 2");
  auto hi = detail::widened(ctx, 16);
  WorkingPrecision guard(hi.bits);
  Real kr(k), pi = const_pi();
  Real a = kr - s / 2, b = kr + 0.5 - s / 2;
  if (!(a > 0.0)) throw std::domain_error("mb_closed_above_two: need s < 2k");
  Real lg = log_gamma(a, hi) + log_gamma(b, hi) - log_gamma(Real(2 * k), hi) + 2 * k * log(2 / x) - s * const_log2();
  Real pre = detail::sign_pow(k) * x / sqrt(pi) * cos(pi * s / 2) * exp(lg);
  Real f = gauss_2f1(a, b, Real(2 * k), 4 / sqr(x), hi);
  return (pre * f).rounded(ctx.bits);
}

inline Real mb_closed_below_two(const Real& x, const Real& s, long k, const PrecisionContext& ctx) {
  if (!(x > 0.0) || !(x < 2.0)) throw std::domain_error("mb_closed_below_two: need 0 < x < 2");
  auto hi = detail::widened(ctx, 16);
  WorkingPrecision guard(hi.bits);
  Real kr(k), pi = const_pi();
  Real a = kr - s / 2, b = 1 - kr - s / 2;
  Real pre = detail::sign_pow(k) / pi * sin(pi * s / 2) * pow(x, 1 - s) * gamma(a, hi) * gamma(b, hi);
  Real f = gauss_2f1(a, b, Real(0.5), sqr(x) / 4, hi);
  return (pre * f).rounded(ctx.bits);
}

inline Real mb_closed_at_two(const Real& s, long k, const PrecisionContext& ctx) {
  auto hi = detail::widened(ctx, 16);
  WorkingPrecision guard(hi.bits);
  Real kr(k), pi = const_pi();
  Real lg = log_gamma(kr - s / 2, hi) + log_gamma(kr + 0.5 - s / 2, hi) - log_gamma(kr + s / 2, hi) -
            log_gamma(kr - 0.5 + s / 2, hi);
  Real r = 2 * detail::sign_pow(k) / (pow(Real(2), s) * sqrt(pi)) * cos(pi * s / 2) * exp(lg) * gamma(s - 0.5, hi);
  return r.rounded(ctx.bits);
}

inline Real mellin_barnes_closed(const Real& x, const Real& s, long k, const PrecisionContext& ctx) {
  if (x > 2.0) return mb_closed_above_two(x, s, k, ctx);
  if (x < 2.0) return mb_closed_below_two(x, s, k, ctx);
  return mb_closed_at_two(s, k, ctx);
}

struct QuadratureValue {
  double value = 0;
  double error_estimate = 0;
};

// Contour quadrature oracle for I(x): vertical segment Re t = Delta, |Im t| <= V,
// then horizontal rays at Im t = +-V toward the side where x^t decays.
inline QuadratureValue mellin_barnes_I(double x, double s, long k, double V = 40) {
  if (!(x > 0) || x == 2) throw std::domain_error("mellin_barnes_I: need x > 0, x != 2");
  if (!(s > 1.5 && s < 2.5)) throw std::domain_error("mellin_barnes_I: need 1.5 < s < 2.5");
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  const long double pi = std::numbers::pi_v<long double>;
  long double kk = static_cast<long double>(k), sl = s, lx = std::log(static_cast<long double>(x));
  long double D = (1 - sl) / 2 - kk / 2;
  D = std::max(std::min(D, 1 - sl - 0.05L), 1 - 2 * kk + 0.05L);
  auto G = [&](cld t) {
    cld lg = complex_lgamma(kk - 0.5L + t / 2.0L) - complex_lgamma(kk + 0.5L - t / 2.0L) + complex_lgamma(1.0L - sl - t) +
             t * lx;
    return std::exp(lg) * std::sin(pi * (sl + t) / 2.0L);
  };
  QuadratureValue out;
  long double err = 0, total = 0;
  const long double Vl = V;
  long double edges[] = {0, 5, 10, 20, Vl};
  for (int i = 0; i < 4; ++i) {
    long double e = 0;
    total += gauss_kronrod<long double, 61>::integrate([&](long double tau) { return G(cld(D, tau)).real(); }, edges[i],
                                                       edges[i + 1], 15, 1e-16L, &e) /
             pi;
    err += e / pi;
  }
  exp_sinh<long double> es;
  long double e2 = 0;
  if (x > 2) {
    total -= es.integrate([&](long double r) { return G(cld(D - r, Vl)).imag(); }, 0.0L,
                          std::numeric_limits<long double>::infinity(), 1e-15L, &e2) /
             pi;
  } else {
    total += es.integrate([&](long double r) { return G(cld(D + r, Vl)).imag(); }, 0.0L,
                          std::numeric_limits<long double>::infinity(), 1e-15L, &e2) /
             pi;
  }
  err += e2 / pi;
  out.value = static_cast<double>(total);
  out.error_estimate = static_cast<double>(err);
  return out;
}

}  // namespace symsq
