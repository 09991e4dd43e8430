#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symsq/gamma.hpp"
#include "symsq/precision.hpp"
#include "symsq/real.hpp"

namespace symsq {

struct Hyp2f1Result {
  Real value;
  // sum_n t_n d_n with d_n = sum_{i<n} [1/(a+i) + 1/(b+i) - 2/(c+i)], i.e.
  // (d/da + d/db + 2 d/dc) 2F1; zero unless requested.
  Real param_derivative;
  long bits_used = 0;
  long terms = 0;
};

namespace detail {

struct TermScan {
  double max_log2 = 0;  // log2 of the largest |t_n| (t_0 = 1)
  long terms = 0;
};

inline long monotone_start(double a, double b, double c) {
  return static_cast<long>(2 * std::max({std::fabs(a), std::fabs(b), std::fabs(c)})) + 4;
}

inline TermScan scan_2f1(double a, double b, double c, double x, double cutoff_bits, long max_terms) {
  TermScan r;
  double lt = 0;
  long n0 = monotone_start(a, b, c);
  for (long n = 0;; ++n) {
    if (n >= max_terms) throw ConvergenceError("gauss_2f1: max_terms exceeded (x too close to 1 for the budget)");
    double ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
    if (ratio == 0.0) {
      r.terms = n + 1;
      return r;
    }
    lt += std::log2(std::fabs(ratio));
    r.max_log2 = std::max(r.max_log2, lt);
    if (n > n0 && std::fabs(ratio) < 1 && lt < r.max_log2 - cutoff_bits - 8) {
      r.terms = n + 1;
      return r;
    }
  }
}

inline bool sum_2f1(const Real& a, const Real& b, const Real& c, const Real& x, bool deriv, long wp, long cutoff_bits,
                    double max_log2, long max_terms, Hyp2f1Result& out) {
  WorkingPrecision guard(wp);
  double ad = a.to_double(), bd = b.to_double(), cd = c.to_double(), xd = x.to_double();
  long n0 = monotone_start(ad, bd, cd);
  Real t = 1, sum = 1, d = 0, dsum = 0;
  Real an = a, bn = b, cn = c;
  for (long n = 0; n < max_terms; ++n) {
    t *= an;
    t *= bn;
    t /= cn;
    t /= n + 1;
    t *= x;
    if (deriv) {
      d += 1 / an + 1 / bn - 2 / cn;
      dsum += t * d;
    }
    sum += t;
    an += 1;
    bn += 1;
    cn += 1;
    if (t.is_zero()) {
      out.terms = n + 1;
      break;
    }
    if (n + 1 > n0) {
      double m = static_cast<double>(n + 1);
      double f = (ad + m) * (bd + m) / ((cd + m) * (m + 1));
      double R = std::fabs(xd) * std::max(std::fabs(f), 1.0);
      if (R < 1) {
        double lb = log2_abs(t) + std::log2(R / (1 - R));
        if (deriv) lb += std::log2(std::fabs(d.to_double()) + 2);
        double floor_abs = max_log2 - static_cast<double>(wp);
        double ref = deriv ? std::max(log2_abs(sum), log2_abs(dsum)) : log2_abs(sum);
        if (lb < ref - static_cast<double>(cutoff_bits) || lb < floor_abs) {
          out.terms = n + 1;
          out.value = sum;
          out.param_derivative = dsum;
          out.bits_used = wp;
          return true;
        }
      }
    }
  }
  if (out.terms == 0) throw ConvergenceError("gauss_2f1: max_terms exceeded (x too close to 1 for the budget)");
  out.value = sum;
  out.param_derivative = dsum;
  out.bits_used = wp;
  return true;
}

}  // namespace detail

// Power series with precision raised by the log2 of the largest term so that
// cancellation does not eat into the requested accuracy.
inline Hyp2f1Result gauss_2f1_ext(const Real& a, const Real& b, const Real& c, const Real& x, const PrecisionContext& ctx,
                                  bool param_derivative = false) {
  if (detail::is_nonpositive_integer(c)) throw std::domain_error("gauss_2f1: c is a nonpositive integer");
  if (!(abs(x) < 1.0)) throw std::domain_error("gauss_2f1: need |x| < 1");
  Hyp2f1Result out;
  if (x.is_zero()) {
    out.value = Real(1).rounded(ctx.bits);
    out.param_derivative = Real(0).rounded(ctx.bits);
    out.bits_used = ctx.bits;
    out.terms = 1;
    return out;
  }
  long cutoff = ctx.series_cutoff_bits();
  auto scan = detail::scan_2f1(a.to_double(), b.to_double(), c.to_double(), x.to_double(),
                               static_cast<double>(cutoff), ctx.max_terms);
  long extra = static_cast<long>(std::ceil(scan.max_log2));
  long wp = ctx.internal_bits() + extra + 8;
  for (int attempt = 0; attempt < 4; ++attempt) {
    out = Hyp2f1Result{};
    detail::sum_2f1(a, b, c, x, param_derivative, wp, cutoff, scan.max_log2, ctx.max_terms, out);
    double ref = log2_abs(out.value);
    if (param_derivative) ref = std::min(ref, log2_abs(out.param_derivative));
    double loss = scan.max_log2 - ref;
    if (loss <= static_cast<double>(wp - ctx.bits - 8)) break;
    long want = ctx.bits + ctx.guard_bits + static_cast<long>(std::ceil(loss)) + 16;
    // A value that is zero to within 2^-bits of the largest term is accepted as such.
    if (want > ctx.internal_bits() + 2 * extra + ctx.bits + 64) break;
    wp = want;
  }
  out.value = out.value.rounded(ctx.bits);
  out.param_derivative = out.param_derivative.rounded(ctx.bits);
  return out;
}

inline Real gauss_2f1(const Real& a, const Real& b, const Real& c, const Real& x, const PrecisionContext& ctx) {
  return gauss_2f1_ext(a, b, c, x, ctx).value;
}

}  // namespace symsq
