#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "symsq/arith.hpp"
#include "symsq/bessel.hpp"
#include "symsq/complex_gamma.hpp"
#include "symsq/gamma.hpp"
#include "symsq/precision.hpp"
#include "symsq/real.hpp"

namespace symsq {

// Weights 2k whose cusp space has dimension one.
inline bool is_dimension_one(long two_k) {
  return two_k == 12 || two_k == 16 || two_k == 18 || two_k == 20 || two_k == 22 || two_k == 26;
}

namespace detail {

using QSeries = std::vector<mpz_class>;

inline QSeries truncated_product(const QSeries& a, const QSeries& b, long n_max) {
  QSeries c(static_cast<std::size_t>(n_max + 1), 0);
  for (long i = 0; i <= n_max && i < static_cast<long>(a.size()); ++i) {
    if (a[i] == 0) continue;
    for (long j = 0; i + j <= n_max && j < static_cast<long>(b.size()); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

}  // namespace detail

// Coefficients of Delta = q prod (1 - q^n)^24 up to q^n_max, from Jacobi's identity
// prod (1 - q^n)^3 = sum (-1)^m (2m+1) q^(m(m+1)/2), raised to the 8th power.
inline std::vector<mpz_class> delta_qexp(long n_max) {
  if (n_max < 1) throw std::invalid_argument("delta_qexp: n_max >= 1");
  long len = n_max - 1;
  detail::QSeries eta3(static_cast<std::size_t>(len + 1), 0);
  for (long m = 0; m * (m + 1) / 2 <= len; ++m) eta3[m * (m + 1) / 2] = (m % 2 ? -1 : 1) * (2 * m + 1);
  auto e6 = detail::truncated_product(eta3, eta3, len);
  auto e12 = detail::truncated_product(e6, e6, len);
  auto e24 = detail::truncated_product(e12, e12, len);
  std::vector<mpz_class> a(static_cast<std::size_t>(n_max + 1), 0);
  for (long n = 1; n <= n_max; ++n) a[n] = e24[n - 1];
  return a;
}

// E4 = 1 + 240 sum sigma_3(n) q^n, E6 = 1 - 504 sum sigma_5(n) q^n.
inline std::vector<mpz_class> eisenstein_qexp(int weight, long n_max) {
  if (weight != 4 && weight != 6) throw std::invalid_argument("eisenstein_qexp: weight 4 or 6");
  std::vector<mpz_class> sig(static_cast<std::size_t>(n_max + 1), 0);
  for (long d = 1; d <= n_max; ++d) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(d), weight - 1);
    for (long m = d; m <= n_max; m += d) sig[m] += p;
  }
  std::vector<mpz_class> e(static_cast<std::size_t>(n_max + 1));
  e[0] = 1;
  long c = weight == 4 ? 240 : -504;
  for (long n = 1; n <= n_max; ++n) e[n] = c * sig[n];
  return e;
}

struct HeckeFormTable {
  long two_k = 12;
  long n_max = 0;
  std::vector<mpz_class> a;  // a[0] = 0, a[1] = 1
  std::vector<Real> lambda;  // a(n) n^-(k - 1/2)
};

// The unique normalized cusp form of weight 2k in dimension one:
// Delta, Delta E4, Delta E6, Delta E4^2, Delta E4 E6, Delta E4^2 E6.
inline HeckeFormTable hecke_table(long two_k, long n_max, const PrecisionContext& ctx) {
  if (!is_dimension_one(two_k)) throw std::invalid_argument("hecke_table: weight space is not one-dimensional");
  if (n_max < 2 || n_max > 100000) throw std::invalid_argument("hecke_table: need 2 <= n_max <= 1e5");
  HeckeFormTable t;
  t.two_k = two_k;
  t.n_max = n_max;
  t.a = delta_qexp(n_max);
  int e4 = 0, e6 = 0;
  switch (two_k) {
    case 16: e4 = 1; break;
    case 18: e6 = 1; break;
    case 20: e4 = 2; break;
    case 22: e4 = e6 = 1; break;
    case 26: e4 = 2, e6 = 1; break;
    default: break;
  }
  if (e4) {
    auto E4 = eisenstein_qexp(4, n_max);
    for (int i = 0; i < e4; ++i) t.a = detail::truncated_product(t.a, E4, n_max);
  }
  if (e6) t.a = detail::truncated_product(t.a, eisenstein_qexp(6, n_max), n_max);
  WorkingPrecision guard(ctx.internal_bits());
  Real expo = Real(two_k - 1) / 2;
  t.lambda.resize(static_cast<std::size_t>(n_max + 1));
  t.lambda[0] = 0;
  for (long n = 1; n <= n_max; ++n) {
    Real an;
    mpfr_set_z(an.get(), t.a[n].get_mpz_t(), MPFR_RNDN);
    t.lambda[n] = an / pow(Real(n), expo);
  }
  return t;
}

// lambda(n) for any n whose prime factors lie in the table, through
// lambda(p^(e+1)) = lambda(p) lambda(p^e) - lambda(p^(e-1)) and multiplicativity.
inline Real hecke_lambda(const HeckeFormTable& t, u64 n) {
  if (n == 0) throw std::invalid_argument("hecke_lambda: n >= 1");
  if (n <= static_cast<u64>(t.n_max)) return t.lambda[n];
  Real r = 1;
  for (auto [p, e] : factorize(n).factors) {
    if (p > static_cast<u64>(t.n_max)) throw std::invalid_argument("hecke_lambda: prime beyond table");
    const Real& lp = t.lambda[p];
    Real x0 = 1, x1 = lp;
    for (int i = 1; i < e; ++i) {
      Real x2 = lp * x1 - x0;
      x0 = x1;
      x1 = x2;
    }
    r *= x1;
  }
  return r;
}

inline Real hecke_lambda_square(const HeckeFormTable& t, u64 n) { return hecke_lambda(t, n * n); }

// Weight V(y) = (1/2 pi i) int_(sigma) exp(c w^2) L_inf(1/2+w)/L_inf(1/2) y^-w dw/w with
// L_inf(s) = pi^(-3s/2) Gamma((s+1)/2) Gamma((s+2k-1)/2) Gamma((s+2k)/2), by the trapezoid
// rule in long double on Re w = 1.5 for y >= 1.  For y < 1 the line Re w = -1 is used
// instead (V = 1 + that integral), which avoids cancellation among terms of size y^-1.5.
class AfeWeight {
 public:
  AfeWeight(long two_k, double c = 0.125, double h = 0.05, double t_max = 40) : c_(c), h_(h) {
    const long double pi = std::numbers::pi_v<long double>;
    long double kk = static_cast<long double>(two_k);
    auto log_linf = [&](cld s) {
      return -1.5L * s * std::log(pi) + complex_lgamma((s + 1.0L) / 2.0L) + complex_lgamma((s + kk - 1.0L) / 2.0L) +
             complex_lgamma((s + kk) / 2.0L);
    };
    cld base = log_linf(cld(0.5L, 0));
    long n = static_cast<long>(std::ceil(t_max / h));
    for (int side = 0; side < 2; ++side) {
      long double sigma = side == 0 ? 1.5L : -1.0L;
      auto& nodes = side == 0 ? right_ : left_;
      nodes.reserve(static_cast<std::size_t>(n + 1));
      for (long j = 0; j <= n; ++j) {
        cld w(sigma, h * static_cast<long double>(j));
        cld g = static_cast<long double>(c) * w * w + log_linf(cld(0.5L) + w) - base - std::log(w);
        nodes.push_back({w, g, j == 0 ? 0.5L : 1.0L});
      }
    }
  }

  double operator()(double y) const {
    if (!(y > 0)) throw std::domain_error("AfeWeight: y > 0");
    const auto& nodes = y >= 1 ? right_ : left_;
    long double ly = std::log(static_cast<long double>(y)), s = 0;
    for (const auto& nd : nodes) s += nd.weight * std::exp(nd.log_f - nd.w * ly).real();
    long double v = s * h_ / std::numbers::pi_v<long double>;
    return static_cast<double>(y >= 1 ? v : 1 + v);
  }

  double kernel_scale() const { return c_; }

 private:
  struct Node {
    cld w;
    cld log_f;
    long double weight;
  };
  double c_, h_;
  std::vector<Node> right_, left_;
};

struct SymSquareValue {
  Real value;
  long terms = 0;
  double tail_estimate = 0;
};

// L(sym^2 f, 1/2) = 2 sum_m b_m m^(-1/2) V(m), b_m = sum_{d^2 | m} lambda((m/d^2)^2).
inline SymSquareValue sym_square_L(const HeckeFormTable& t, double tol, const PrecisionContext& ctx,
                                   double kernel_c = 0.125) {
  AfeWeight V(t.two_k, kernel_c);
  WorkingPrecision guard(ctx.internal_bits());
  SymSquareValue out;
  Real sum = 0;
  for (long m = 1;; ++m) {
    if (m > t.n_max) throw std::invalid_argument("sym_square_L: Hecke table too short for the requested tolerance");
    double v = V(static_cast<double>(m));
    Real b = 0;
    for (long d = 1; d * d <= m; ++d)
      if (m % (d * d) == 0) b += hecke_lambda_square(t, static_cast<u64>(m / (d * d)));
    sum += b * Real(v) / sqrt(Real(m));
    // |b_m| <= tau_3(m^2)-type growth; (1 + log m)^3 covers it in this range.
    double lm = 1 + std::log(static_cast<double>(m));
    double tail = 4 * std::fabs(v) * std::sqrt(static_cast<double>(m)) * lm * lm * lm;
    if (m >= 8 && tail < tol / 4) {
      out.terms = m;
      out.tail_estimate = tail;
      break;
    }
  }
  out.value = (2 * sum).rounded(ctx.bits);
  return out;
}

struct HarmonicWeight {
  Real value;
  Real first_term;  // c = 1 contribution to the correction
  Real tail_bound;
  long q_max = 0;
};

// omega = 1 + 2 pi (-1)^k sum_{c <= q_max} S(1,1;c) c^-1 J_{2k-1}(4 pi / c), the l = n = 1
// row of the Petersson formula, which equals Gamma(2k-1)/((4 pi)^(2k-1) <f,f>) in
// dimension one.  Tail: |S| <= tau(c) sqrt(c) <= 2c, |J_nu(x)| <= (x/2)^nu / nu!.
inline HarmonicWeight harmonic_weight_dim1(long two_k, long q_max, const PrecisionContext& ctx) {
  if (!is_dimension_one(two_k)) throw std::invalid_argument("harmonic_weight_dim1: weight space is not one-dimensional");
  if (q_max < 1) throw std::invalid_argument("harmonic_weight_dim1: q_max >= 1");
  auto hi = PrecisionContext::with_bits(ctx.internal_bits());
  WorkingPrecision guard(hi.internal_bits());
  long nu = two_k - 1, k = two_k / 2;
  Real pi = const_pi(), corr = 0, first = 0;
  for (long c = 1; c <= q_max; ++c) {
    Real term = kloosterman(1, 1, c) / Real(c) * bessel_j(nu, 4 * pi / Real(c), hi);
    corr += term;
    if (c == 1) first = term;
  }
  Real sign = k % 2 == 0 ? 1 : -1;
  HarmonicWeight w;
  w.q_max = q_max;
  w.value = (1 + 2 * pi * sign * corr).rounded(ctx.bits);
  w.first_term = (2 * pi * sign * first).rounded(ctx.bits);
  Real lg = Real(nu) * log(2 * pi) - log_gamma(Real(nu + 1), hi);
  w.tail_bound = (4 * pi * exp(lg) * pow(Real(q_max), 1 - nu) / Real(nu - 1)).rounded(ctx.bits);
  return w;
}

}  // namespace symsq
