#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "symsq/arith.hpp"
#include "symsq/gamma.hpp"
#include "symsq/hecke.hpp"
#include "symsq/lseries.hpp"
#include "symsq/phipsi.hpp"
#include "symsq/precision.hpp"
#include "symsq/real.hpp"
#include "symsq/zeta.hpp"

namespace symsq {

struct MomentBreakdown {
  long l = 1;
  long two_k = 12;
  Real main_term, delta_term, finite_sum, tail_sum;
  long tail_cutoff = 0;  // last n included in the tail sum
  Real tail_bound;
  Real total;
};

namespace detail {

// script L_n(s) for a fixed real s.  Above 1e-12 tolerance the double-precision
// Dirichlet L path (about 1e-13 relative) is used, with L(s, chi_D) memoized per D.
class ScriptLTable {
 public:
  ScriptLTable(const Real& s, double tol, const PrecisionContext& ctx)
      : s_(s), sd_(s.to_double()), fast_(tol >= 1e-12), ctx_(ctx) {}

  Real operator()(i64 n) {
    WorkingPrecision guard(ctx_.internal_bits());
    if (!fast_) return script_l(n, s_, ctx_).value;
    if (n == 0) return riemann_zeta(2 * s_ - 1, ctx_);
    i64 m4 = mod(n, 4);
    if (m4 == 2 || m4 == 3) return Real(0);
    auto dec = decompose_discriminant(n);
    auto it = l_.find(dec.D);
    if (it == l_.end()) it = l_.emplace(dec.D, dirichlet_l_fast(dec.D, sd_)).first;
    return Real(std::pow(static_cast<double>(dec.l), 0.5 - sd_) * t_factor_fast(dec.l, dec.D, sd_) * it->second);
  }

  bool fast() const { return fast_; }

 private:
  Real s_;
  double sd_;
  bool fast_;
  PrecisionContext ctx_;
  std::map<i64, double> l_;
};

inline void check_moment_args(long l, long two_k) {
  if (l < 1) throw std::invalid_argument("moment: l >= 1");
  if (two_k < 12 || two_k % 2) throw std::invalid_argument("moment: weight must be even and >= 12");
}

}  // namespace detail

// (1/2 sqrt l)(-2 log l - 3 log 2pi + pi/2 + 4 gamma + psi(1) + psi(k-1/4) + psi(k+1/4)).
inline Real moment_main_term(long l, long two_k, const PrecisionContext& ctx) {
  detail::check_moment_args(l, two_k);
  auto hi = detail::widened(ctx, 8);
  WorkingPrecision guard(hi.bits);
  Real kr(two_k / 2), pi = const_pi(), g = const_euler();
  Real v = -2 * log(Real(l)) - 3 * log(2 * pi) + pi / 2 + 4 * g + digamma(Real(1), hi) + digamma(kr - 0.25, hi) + digamma(kr + 0.25, hi);
  return (v / (2 * sqrt(Real(l)))).rounded(ctx.bits);
}

// Critical value M_1(l, 1/2) as main + delta + finite + tail.  The tail over n > 2l stops
// at the first n whose remainder bound drops below tol/4; the bound uses
// |script L_d(1/2)| <= c0 |d|^(1/6+0.05) <= c0 n^0.4333 and Psi_k(4l^2/m^2) m^2k non-increasing
// in m, so sum_{m>n} <= c0/(l sqrt 2) Psi_k(4l^2/n^2) n^(1.9333) / (2k - 1.9333).
inline MomentBreakdown exact_moment_critical(long l, long two_k, double tol, const PrecisionContext& ctx) {
  detail::check_moment_args(l, two_k);
  if (!(tol > 0) || std::log2(tol) < static_cast<double>(-ctx.bits + 16))
    throw ConvergenceError("exact_moment_critical: tolerance unachievable at current precision");
  long k = two_k / 2;
  auto hi = detail::widened(ctx, 8);
  WorkingPrecision guard(hi.bits);
  detail::ScriptLTable L(Real(0.5), tol, hi);
  MomentBreakdown b;
  b.l = l;
  b.two_k = two_k;
  Real sl = sqrt(Real(l)), four_l2(4 * l * l);
  b.main_term = moment_main_term(l, two_k, hi);
  b.delta_term = phi_prefactor(k, hi) / (2 * sl) * L(-4 * l * l);
  b.finite_sum = 0;
  for (long n = 1; n < 2 * l; ++n) b.finite_sum += L(n * n - 4 * l * l) * phi_k(Real(n * n) / four_l2, k, hi);
  b.finite_sum /= sl;

  const double c0 = subconvexity_constant(), a = 1.0 / 6 + 0.05;
  const double e = 2 * a + 1.5;  // 1.9333
  Real inv = 1 / (Real(l) * sqrt(Real(2)));
  b.tail_sum = 0;
  for (long n = 2 * l + 1;; ++n) {
    if (n - 2 * l > ctx.max_terms) throw ConvergenceError("exact_moment_critical: tail did not converge");
    Real psi = psi_k(four_l2 / Real(n * n), k, hi);
    b.tail_sum += L(n * n - 4 * l * l) * sqrt(Real(n)) * psi;
    double bound = (inv * psi).to_double() * c0 * std::pow(static_cast<double>(n), e) / (static_cast<double>(2 * k) - e);
    if (bound < tol / 4) {
      b.tail_cutoff = n;
      b.tail_bound = Real(bound);
      break;
    }
  }
  b.tail_sum *= inv;
  b.total = b.main_term + b.delta_term + b.finite_sum + b.tail_sum;
  return b;
}

struct ShiftedValue {
  Real value;
  long cutoff = 0;
  double tail_estimate = 0;
};

// M_1(l, s) = zeta(2s)/l^s + (2pi)^s (-1)^k / (2 l^(1-s)) Gamma(k-s/2)/Gamma(k+s/2) script L_{-4l^2}(s)
//           + sum_{n>=1} (2pi)^s n^(s-1) script L_{n^2-4l^2}(s) I(n/l),
// I the Mellin-Barnes integral in closed form (its (-1)^k is inside I); the n = 2l term
// carries script L_0(s) = zeta(2s-1).  The n-tail is estimated from the last term times
// n/(2k - s - 1 - a), a = max(0.4333, 1.4333 - 2s) the envelope growth of script L.
inline ShiftedValue shifted_moment(long l, double s, long two_k, double tol, const PrecisionContext& ctx) {
  detail::check_moment_args(l, two_k);
  long k = two_k / 2;
  if (!(s > 2.0 - static_cast<double>(two_k) && s < static_cast<double>(two_k) - 1))
    throw std::domain_error("shifted_moment: s outside (2-2k, 2k-1)");
  if (std::fabs(s - 0.5) < 1e-3) throw std::domain_error("shifted_moment: |s - 1/2| < 1e-3, use the critical formula");
  if (std::fabs(s - 1) < 1e-9) throw std::domain_error("shifted_moment: pole of zeta(2s-1) at s = 1");
  if (std::fabs(s - std::round(s)) < 1e-9 && static_cast<long>(std::round(s)) % 2 == 0)
    throw std::domain_error("shifted_moment: even integer s hits a removable Gamma pole");
  if (!(tol > 0) || std::log2(tol) < static_cast<double>(-ctx.bits + 16))
    throw ConvergenceError("shifted_moment: tolerance unachievable at current precision");
  auto hi = detail::widened(ctx, 16);
  WorkingPrecision guard(hi.bits);
  Real sr(s), lr(l), pi = const_pi();
  detail::ScriptLTable L(sr, tol, hi);
  Real two_pi_s = pow(2 * pi, sr);
  Real kr(k);
  Real v = riemann_zeta(2 * sr, hi) / pow(lr, sr);
  v += two_pi_s * detail::sign_pow(k) / (2 * pow(lr, 1 - sr)) * gamma_ratio(kr - sr / 2, kr + sr / 2, hi) * L(-4 * l * l);
  ShiftedValue out;
  const double a = std::max(1.0 / 3 + 0.1, 1.0 / 3 + 0.1 + 1 - 2 * s);
  const double dec = static_cast<double>(two_k) - s - 1 - a;
  for (long n = 1;; ++n) {
    if (n > ctx.max_terms) throw ConvergenceError("shifted_moment: tail did not converge");
    Real Ln = L(n * n - 4 * l * l);
    if (Ln.is_zero()) continue;
    Real term = two_pi_s * pow(Real(n), sr - 1) * Ln * mellin_barnes_closed(Real(n) / lr, sr, k, hi);
    v += term;
    if (n > 2 * l + 1) {
      double est = std::fabs(term.to_double()) * static_cast<double>(n) / dec;
      if (est < tol / 4) {
        out.cutoff = n;
        out.tail_estimate = est;
        break;
      }
    }
  }
  out.value = v.rounded(ctx.bits);
  return out;
}

struct CriticalLimit {
  Real value;
  Real f_eps, f_2eps;  // symmetric averages at offsets 1e-3 and 2e-3
};

// f(e) = (M(1/2+e) + M(1/2-e))/2 = M(1/2) + c e^2 + O(e^4); f0 = (4 f(e) - f(2e))/3.
inline CriticalLimit shifted_moment_critical_limit(long l, long two_k, double tol, const PrecisionContext& ctx,
                                                   double eps = 1e-3) {
  auto f = [&](double e) {
    Real a = shifted_moment(l, 0.5 + e, two_k, tol, ctx).value, b = shifted_moment(l, 0.5 - e, two_k, tol, ctx).value;
    WorkingPrecision guard(ctx.internal_bits());
    return Real((a + b) / 2);
  };
  CriticalLimit c;
  c.f_eps = f(eps);
  c.f_2eps = f(2 * eps);
  WorkingPrecision guard(ctx.internal_bits());
  c.value = ((4 * c.f_eps - c.f_2eps) / 3).rounded(ctx.bits);
  return c;
}

// Envelope constant C in |exact - main| <= C l^(5/6+0.05) k^(-1/2) for l > 1.
// Calibrated on l in {2,3,4}, k in {10,20,...,100} (maximum ratio 3.47), doubled.
inline constexpr double kOffDiagonalEnvelope = 7.0;

// For l = 1 the main term, the delta term with script L_{-4} = L(1/2, chi_-4) and
// Phi_k(1/4) L(1/2, chi_-3); for l > 1 the main term alone.
inline Real asymptotic_main_terms(long l, long two_k, const PrecisionContext& ctx) {
  detail::check_moment_args(l, two_k);
  if (l > 1) return moment_main_term(l, two_k, ctx);
  long k = two_k / 2;
  auto hi = detail::widened(ctx, 8);
  WorkingPrecision guard(hi.bits);
  Real v = moment_main_term(1, two_k, hi) + phi_prefactor(k, hi) / 2 * dirichlet_l(-4, Real(0.5), hi) +
           phi_k(Real(0.25), k, hi) * dirichlet_l(-3, Real(0.5), hi);
  return v.rounded(ctx.bits);
}

struct SpectralMoment {
  Real value;
  Real omega, lambda_l2, sym2;
  long afe_terms = 0;
};

// omega * lambda(l^2) * L(sym^2 f, 1/2) for the unique form of a dimension-one weight.
inline SpectralMoment spectral_moment_dim1(long l, long two_k, double tol, const PrecisionContext& ctx) {
  if (l < 1) throw std::invalid_argument("spectral_moment_dim1: l >= 1");
  if (!is_dimension_one(two_k)) throw std::invalid_argument("spectral_moment_dim1: weight space is not one-dimensional");
  auto table = hecke_table(two_k, std::max(2000L, l * l), ctx);
  long q = 8;
  auto w = harmonic_weight_dim1(two_k, q, ctx);
  while (w.tail_bound > Real(tol / 8)) w = harmonic_weight_dim1(two_k, q *= 2, ctx);
  auto L = sym_square_L(table, tol / 8, ctx);
  WorkingPrecision guard(ctx.internal_bits());
  SpectralMoment r;
  r.omega = w.value;
  r.lambda_l2 = hecke_lambda_square(table, static_cast<u64>(l));
  r.sym2 = L.value;
  r.afe_terms = L.terms;
  r.value = (r.omega * r.lambda_l2 * r.sym2).rounded(ctx.bits);
  return r;
}

struct ErrorScanRow {
  long l = 1, k = 6;
  Real E1, E2, main_term, total;
};

struct ErrorScanFit {
  long l = 1;
  double e1_slope = 0, e1_residual = 0;  // log|E1| against log k
  double e2_slope = 0, e2_residual = 0;  // log|E2| against k
};

struct ErrorScanTable {
  std::vector<ErrorScanRow> rows;
  std::vector<ErrorScanFit> fits;
};

namespace detail {

struct LineFit {
  double slope = 0, intercept = 0, residual = 0;  // residual: RMS deviation
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3) throw std::invalid_argument("regression needs at least three points");
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  if (den == 0) throw std::invalid_argument("regression: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) r += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
  f.residual = std::sqrt(r / n);
  return f;
}

}  // namespace detail

// E1 = finite_sum and E2 = tail_sum of the breakdown over an (l, k) grid, with per-l
// regressions of log|E1| on log k and of log|E2| on k.  Rows are ordered l-major.
inline ErrorScanTable error_term_scan(const std::vector<long>& l_list, const std::vector<long>& k_list, double tol,
                                      const PrecisionContext& ctx) {
  if (k_list.size() < 3) throw std::invalid_argument("error_term_scan: at least three k values");
  ErrorScanTable t;
  for (long l : l_list) {
    std::vector<double> lk, kk, e1, e2;
    for (long k : k_list) {
      auto b = exact_moment_critical(l, 2 * k, tol, ctx);
      ErrorScanRow r;
      r.l = l;
      r.k = k;
      r.E1 = b.finite_sum;
      r.E2 = b.tail_sum;
      r.main_term = b.main_term;
      r.total = b.total;
      double a1 = std::fabs(r.E1.to_double()), a2 = std::fabs(r.E2.to_double());
      if (a1 > 0) {
        lk.push_back(std::log(static_cast<double>(k)));
        e1.push_back(std::log(a1));
      }
      if (a2 > 0) {
        kk.push_back(static_cast<double>(k));
        e2.push_back(std::log(a2));
      }
      t.rows.push_back(std::move(r));
    }
    ErrorScanFit f;
    f.l = l;
    auto f1 = detail::fit_line(lk, e1);
    auto f2 = detail::fit_line(kk, e2);
    f.e1_slope = f1.slope;
    f.e1_residual = f1.residual;
    f.e2_slope = f2.slope;
    f.e2_residual = f2.residual;
    t.fits.push_back(f);
  }
  return t;
}

}  // namespace symsq
