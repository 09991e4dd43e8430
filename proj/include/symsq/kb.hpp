#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "symsq/arith.hpp"
#include "symsq/precision.hpp"
#include "symsq/real.hpp"
#include "symsq/zeta.hpp"

namespace symsq {

// S(m, x; c) for every residue x mod c: with g[b] = e(m b*/c) on units b (b* the inverse),
// S(m, x; c) = sum_b g[b] e(b x / c), a backward DFT of length c.
inline std::vector<double> kloosterman_row_fft(i64 m, i64 c) {
  if (c < 1) throw std::invalid_argument("kloosterman_row_fft: c >= 1");
  if (c == 1) return {1.0};
  const std::size_t n = static_cast<std::size_t>(c);
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(c), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  i64 mm = detail::mod(m, c);
  const double w = 2 * std::numbers::pi / static_cast<double>(c);
  for (i64 b = 0; b < c; ++b) {
    buf[b][0] = buf[b][1] = 0;
    if (std::gcd(b, c) != 1) continue;
    i64 bi = detail::inverse_mod(b, c);
    i64 ph = static_cast<i64>(detail::mulmod(static_cast<u64>(bi), static_cast<u64>(mm), static_cast<u64>(c)));
    buf[b][0] = std::cos(w * static_cast<double>(ph));
    buf[b][1] = std::sin(w * static_cast<double>(ph));
  }
  fftw_execute(plan);
  std::vector<double> row(n);
  for (std::size_t x = 0; x < n; ++x) row[x] = buf[x][0];
  fftw_destroy_plan(plan);
  fftw_free(buf);
  return row;
}

struct KBRows {
  long l = 1;
  long two_k = 12;
  long q_max = 0;
  long n_max = 0;
  // A[n] = sum_{q <= q_max} S(l^2, n^2; q) q^-1 J_{2k-1}(4 pi l n / q), n = 1..n_max
  std::vector<double> A;
  long bessel_evaluations = 0;
};

// The s-independent inner sums of the Kloosterman-Bessel side, in double precision.
// J_nu(x) is skipped where (x/2)^nu / nu! < 1e-22 (it is below that for all smaller x).
inline KBRows kloosterman_bessel_rows(long l, long two_k, long q_max, long n_max) {
  if (l < 1 || two_k < 12 || two_k % 2) throw std::invalid_argument("kloosterman_bessel_rows: l >= 1, even two_k >= 12");
  if (q_max < 1 || n_max < 1) throw std::invalid_argument("kloosterman_bessel_rows: cutoffs >= 1");
  KBRows r;
  r.l = l;
  r.two_k = two_k;
  r.q_max = q_max;
  r.n_max = n_max;
  r.A.assign(static_cast<std::size_t>(n_max + 1), 0.0);
  const double nu = static_cast<double>(two_k - 1), lg = std::lgamma(nu + 1);
  // smallest x with nu log(x/2) - lg >= log(1e-22)
  const double x_min = 2 * std::exp((lg - 22 * std::log(10.0)) / nu);
  const double c = 4 * std::numbers::pi * static_cast<double>(l);
  std::vector<double> col(static_cast<std::size_t>(n_max + 1), 0.0);
  for (long q = 1; q <= q_max; ++q) {
    long n0 = std::max(1L, static_cast<long>(std::floor(x_min * static_cast<double>(q) / c)));
    if (n0 > n_max) continue;
    auto row = kloosterman_row_fft(l * l, q);
    double qd = static_cast<double>(q);
    for (long n = n0; n <= n_max; ++n) {
      double S = row[static_cast<std::size_t>(detail::mulmod(static_cast<u64>(n), static_cast<u64>(n), static_cast<u64>(q)))];
      if (S == 0) continue;
      r.A[n] += S / qd * std::cyl_bessel_j(nu, c * static_cast<double>(n) / qd);
      ++r.bessel_evaluations;
    }
  }
  return r;
}

struct KBValue {
  double value = 0;
  double n_tail_estimate = 0;
  double q_tail_estimate = 0;
};

namespace detail {

// int_N^inf (log t)^j t^-s dt for j = 0, 1, 2.
inline double log_power_tail(double N, double s, int j) {
  double a = s - 1, L = std::log(N), p = std::pow(N, -a);
  if (j == 0) return p / a;
  if (j == 1) return p * (L / a + 1 / (a * a));
  return p * (L * L / a + 2 * L / (a * a) + 2 / (a * a * a));
}

}  // namespace detail

// zeta(2s)/l^s + 2 pi (-1)^k zeta(2s) sum_{n <= n_max} A[n] n^-s.
// n-tail: |Petersson average of lambda(l^2) lambda(n^2)| <= tau(l^2) tau(n^2), summed against
// n^-s with sum_{n<=x} tau(n^2) ~ (3/pi^2) x log^2 x.  q-tail: |S| <= tau(q) sqrt((l^2,q) q) with
// tau(q) replaced by log q, |J_nu(x)| <= min(1, (x/2)^nu/nu!).
inline KBValue kloosterman_bessel_side(const KBRows& rows, double s) {
  if (!(s > 1.5 && s < 2.5)) throw std::domain_error("kloosterman_bessel_side: need 1.5 < s < 2.5");
  auto ctx = PrecisionContext::with_bits(64);
  double z2s;
  {
    WorkingPrecision guard(ctx.internal_bits());
    z2s = riemann_zeta(Real(2 * s), ctx).to_double();
  }
  long k = rows.two_k / 2;
  double sign = k % 2 == 0 ? 1 : -1, ld = static_cast<double>(rows.l);
  double sum = 0;
  for (long n = rows.n_max; n >= 1; --n) sum += rows.A[n] * std::pow(static_cast<double>(n), -s);
  KBValue v;
  v.value = z2s * std::pow(ld, -s) + 2 * std::numbers::pi * sign * z2s * sum;

  double N = static_cast<double>(rows.n_max);
  double tl = static_cast<double>(divisor_count(static_cast<u64>(rows.l * rows.l)));
  v.n_tail_estimate = z2s * tl * 3 / (std::numbers::pi * std::numbers::pi) *
                      (detail::log_power_tail(N, s, 2) + 2 * detail::log_power_tail(N, s, 1));

  double nu = static_cast<double>(rows.two_k - 1), lg = std::lgamma(nu + 1), qt = 0;
  for (long n = 1; n <= rows.n_max; ++n) {
    double a = 2 * std::numbers::pi * ld * static_cast<double>(n), inner = 0;
    for (double q = static_cast<double>(rows.q_max) + 1;; q *= 1.01) {
      double dq = std::max(1.0, std::floor(q * 0.01));
      double jb = std::min(0.0, nu * std::log(a / q) - lg);
      double t = dq * std::log(q + 1) * ld / std::sqrt(q) * std::exp(jb);
      inner += t;
      if (jb < 0 && t < 1e-6 * inner) break;
    }
    qt += std::pow(static_cast<double>(n), -s) * inner;
  }
  v.q_tail_estimate = 2 * std::numbers::pi * z2s * qt;
  return v;
}

inline KBValue kloosterman_bessel_side(long l, double s, long two_k, long q_max, long n_max) {
  return kloosterman_bessel_side(kloosterman_bessel_rows(l, two_k, q_max, n_max), s);
}

}  // namespace symsq
