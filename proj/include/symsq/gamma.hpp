#pragma once

#include <gmpxx.h>

#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "symsq/precision.hpp"
#include "symsq/real.hpp"

namespace symsq {

namespace detail {

// Exact B_{2j} as rationals, grown on demand and never mutated afterwards.
class BernoulliCache {
 public:
  static BernoulliCache& instance() {
    static BernoulliCache c;
    return c;
  }

  // B_{2j} for j >= 1.
  mpq_class even(int j) {
    std::lock_guard<std::mutex> lock(mu_);
    grow(2 * j);
    return b_[static_cast<std::size_t>(2 * j)];
  }

  // B_{2j} / (2j)! at the working precision, cached per precision.
  const Real& scaled(int j) {
    std::lock_guard<std::mutex> lock(mu_);
    long prec = working_precision();
    auto& vec = scaled_[prec];
    while (static_cast<int>(vec.size()) <= j) {
      int jj = static_cast<int>(vec.size());
      grow(2 * jj);
      mpz_class fact;
      mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(2 * jj));
      mpq_class v = b_[static_cast<std::size_t>(2 * jj)] / mpq_class(fact);
      Real r;
      mpfr_set_q(r.get(), v.get_mpq_t(), MPFR_RNDN);
      vec.push_back(std::move(r));
    }
    return vec[static_cast<std::size_t>(j)];
  }

 private:
  BernoulliCache() { b_.push_back(mpq_class(1)); }

  // Recurrence sum_{k=0}^{n} C(n+1, k) B_k = 0.
  void grow(int n) {
    while (static_cast<int>(b_.size()) <= n) {
      int m = static_cast<int>(b_.size());
      mpq_class s = 0;
      mpz_class binom = 1;
      for (int k = 0; k < m; ++k) {
        s += mpq_class(binom) * b_[static_cast<std::size_t>(k)];
        binom = binom * (m + 1 - k) / (k + 1);
      }
      mpq_class bm = -s / mpq_class(m + 1);
      bm.canonicalize();
      b_.push_back(bm);
    }
  }

  std::mutex mu_;
  std::deque<mpq_class> b_;
  std::map<long, std::deque<Real>> scaled_;
};

inline bool is_nonpositive_integer(const Real& x) {
  return x <= 0.0 && floor(x) == x;
}

// ln Gamma(y) for y >= shift threshold by Stirling's series at working precision.
inline Real stirling_lgamma(const Real& y, long wp) {
  auto& bc = BernoulliCache::instance();
  Real s = (y - 0.5) * log(y) - y + log(2 * const_pi()) / 2;
  Real y2 = sqr(y);
  Real ypow = y;  // y^(2j-1)
  Real scale = abs(s) + 1;
  for (int j = 1; j < 4000; ++j) {
    // B_{2j} / (2j (2j-1) y^(2j-1)) = [B_{2j}/(2j)!] (2j-2)! / y^(2j-1)
    mpq_class b = bc.even(j);
    Real t;
    mpfr_set_q(t.get(), b.get_mpq_t(), MPFR_RNDN);
    t /= static_cast<long>(2 * j) * static_cast<long>(2 * j - 1);
    t /= ypow;
    s += t;
    if (log2_abs(t) < log2_abs(scale) - wp) return s;
    ypow *= y2;
  }
  throw ConvergenceError("stirling_lgamma: no convergence");
}

}  // namespace detail

inline Real log_gamma(const Real& x, const PrecisionContext& ctx) {
  if (x <= 0.0) throw std::domain_error("log_gamma: x must be positive");
  double xd = x.to_double();
  long extra = xd > 2 ? static_cast<long>(std::ceil(std::log2(xd * std::log(xd) + 1))) : 0;
  long wp = ctx.internal_bits() + extra;
  WorkingPrecision guard(wp);
  double shift_to = 0.25 * static_cast<double>(wp) + 4;
  long n = xd < shift_to ? static_cast<long>(std::ceil(shift_to - xd)) : 0;
  Real y = x + n;
  Real s = detail::stirling_lgamma(y, wp);
  if (n > 0) {
    Real prod = x;
    for (long i = 1; i < n; ++i) prod *= x + i;
    s -= log(prod);
  }
  return s.rounded(ctx.bits);
}

// Gamma on the real line away from poles, with reflection for x < 1/2.
inline Real gamma(const Real& x, const PrecisionContext& ctx) {
  if (detail::is_nonpositive_integer(x)) throw std::domain_error("gamma: pole");
  WorkingPrecision guard(ctx.internal_bits());
  if (x < 0.5) {
    Real pi = const_pi();
    PrecisionContext c2 = ctx;
    c2.bits = ctx.internal_bits();
    Real g1 = exp(log_gamma(1 - x, c2));
    return (pi / (sin(pi * x) * g1)).rounded(ctx.bits);
  }
  PrecisionContext c2 = ctx;
  double xd = x.to_double();
  c2.bits = ctx.internal_bits() + (xd > 2 ? static_cast<long>(std::ceil(std::log2(xd * std::log(xd) + 1))) : 0);
  return exp(log_gamma(x, c2)).rounded(ctx.bits);
}

// Gamma(a) / Gamma(b) for positive a, b without forming either factor.
inline Real gamma_ratio(const Real& a, const Real& b, const PrecisionContext& ctx) {
  if (a <= 0.0 || b <= 0.0) throw std::domain_error("gamma_ratio: arguments must be positive");
  double m = std::max({a.to_double(), b.to_double(), 2.0});
  long extra = static_cast<long>(std::ceil(std::log2(m * std::log(m) + 1))) + 4;
  PrecisionContext c2 = ctx;
  c2.bits = ctx.internal_bits() + extra;
  WorkingPrecision guard(c2.bits);
  Real d = log_gamma(a, c2) - log_gamma(b, c2);
  return exp(d).rounded(ctx.bits);
}

inline Real digamma(const Real& x, const PrecisionContext& ctx) {
  if (x <= 0.0) throw std::domain_error("digamma: x must be positive");
  long wp = ctx.internal_bits();
  WorkingPrecision guard(wp);
  auto& bc = detail::BernoulliCache::instance();
  double xd = x.to_double();
  double shift_to = 0.25 * static_cast<double>(wp) + 4;
  long n = xd < shift_to ? static_cast<long>(std::ceil(shift_to - xd)) : 0;
  Real y = x + n;
  Real s = log(y) - 1 / (2 * y);
  Real y2 = sqr(y);
  Real ypow = y2;
  bool done = false;
  for (int j = 1; j < 4000; ++j) {
    mpq_class b = bc.even(j);
    Real t;
    mpfr_set_q(t.get(), b.get_mpq_t(), MPFR_RNDN);
    t /= static_cast<long>(2 * j);
    t /= ypow;
    s -= t;
    if (log2_abs(t) < log2_abs(s) - wp) {
      done = true;
      break;
    }
    ypow *= y2;
  }
  if (!done) throw ConvergenceError("digamma: no convergence");
  for (long i = 0; i < n; ++i) s -= 1 / (x + i);
  return s.rounded(ctx.bits);
}

}  // namespace symsq
