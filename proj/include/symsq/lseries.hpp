#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "symsq/arith.hpp"
#include "symsq/gamma.hpp"
#include "symsq/precision.hpp"
#include "symsq/real.hpp"
#include "symsq/zeta.hpp"

namespace symsq {

namespace detail {

inline std::string exact_key(const Real& x) {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%Ra", x.get());
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

class LValueCache {
 public:
  static LValueCache& instance() {
    static LValueCache c;
    return c;
  }
  std::optional<Real> find(i64 D, const std::string& s, long bits) const {
    std::shared_lock lock(mu_);
    auto it = map_.find({D, s, bits});
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void put(i64 D, const std::string& s, long bits, const Real& v) {
    std::unique_lock lock(mu_);
    map_.emplace(std::tuple{D, s, bits}, v);
  }
  void clear() {
    std::unique_lock lock(mu_);
    map_.clear();
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::tuple<i64, std::string, long>, Real> map_;
};

}  // namespace detail

// L(s, chi_D) = |D|^-s sum_a chi_D(a) zeta(s, a/|D|), with one Euler–Maclaurin
// setup shared by all residues.
inline Real dirichlet_l(i64 D, const Real& s, const PrecisionContext& ctx) {
  if (!is_fundamental_discriminant(D)) throw std::invalid_argument("dirichlet_l: D must be a fundamental discriminant or 1");
  if (D == 1 && s == Real(1)) throw std::domain_error("dirichlet_l: pole of zeta at s = 1");
  i64 q = D < 0 ? -D : D;
  if (q > 10000000) throw std::domain_error("dirichlet_l: |D| too large");
  auto key = detail::exact_key(s);
  auto& cache = detail::LValueCache::instance();
  if (auto hit = cache.find(D, key, ctx.bits)) return *hit;
  long wp = ctx.internal_bits() + 8 + static_cast<long>(std::ceil(std::log2(static_cast<double>(q) + 1)));
  Real out;
  {
    WorkingPrecision guard(wp);
    if (D == 1) {
      PrecisionContext c2 = ctx;
      c2.bits = wp;
      out = riemann_zeta(s, c2);
    } else {
      detail::EulerMaclaurin em(s, wp, true);
      auto chi = character_table(D);
      Real head = 0, tails = 0;
      for (i64 n = 0; n < em.M; ++n)
        for (i64 a = 1; a < q; ++a) {
          int c = chi[static_cast<std::size_t>(a)];
          if (c == 0) continue;
          Real p = em.power(Real(a + n * q));
          if (c > 0) head += p;
          else head -= p;
        }
      Real qq(q);
      for (i64 a = 1; a < q; ++a) {
        int c = chi[static_cast<std::size_t>(a)];
        if (c == 0) continue;
        Real t = em.tail(Real(a) / qq + em.M);
        if (c > 0) tails += t;
        else tails -= t;
      }
      out = head + tails * em.power(qq);
    }
  }
  out = out.rounded(ctx.bits);
  cache.put(D, key, ctx.bits, out);
  return out;
}

// T_l^(D)(s) = sum_{l1 l2 = l} chi_D(l1) mu(l1) l1^-1/2 tau_{s-1/2}(l2).
inline Real t_factor(i64 l, i64 D, const Real& s, const PrecisionContext& ctx) {
  if (l < 1) throw std::invalid_argument("t_factor: l >= 1");
  WorkingPrecision guard(ctx.internal_bits());
  Real v = s - 0.5;
  Real sum = 0;
  for (u64 d : divisors(static_cast<u64>(l))) {
    i64 l1 = static_cast<i64>(d);
    int m = mobius(d);
    if (m == 0) continue;
    int c = kronecker_chi(D, l1);
    if (c == 0) continue;
    sum += (c * m) * rec_sqrt(Real(l1)) * divisor_tau_v(l / l1, v);
  }
  return sum.rounded(ctx.bits);
}

enum class ScriptLBranch { zero_case, vanishing, decomposed };

inline const char* branch_name(ScriptLBranch b) {
  switch (b) {
    case ScriptLBranch::zero_case: return "zero-case";
    case ScriptLBranch::vanishing: return "vanishing";
    default: return "decomposed";
  }
}

struct ScriptLValue {
  i64 n = 0;
  Real s;
  Real value;
  ScriptLBranch branch = ScriptLBranch::vanishing;
  bool has_components = false;
  i64 D = 0, l = 0;
  Real t_value, l_value, scale;
};

inline ScriptLValue script_l(i64 n, const Real& s, const PrecisionContext& ctx) {
  ScriptLValue r;
  r.n = n;
  r.s = s;
  i64 m4 = detail::mod(n, 4);
  if (n == 0) {
    if (s == Real(1)) throw std::domain_error("script_l: pole of zeta(2s-1) at s = 1");
    r.branch = ScriptLBranch::zero_case;
    WorkingPrecision guard(ctx.internal_bits());
    r.value = riemann_zeta(2 * s - 1, ctx);
    return r;
  }
  if (m4 == 2 || m4 == 3) {
    r.branch = ScriptLBranch::vanishing;
    WorkingPrecision guard(ctx.bits);
    r.value = Real(0);
    return r;
  }
  auto dec = decompose_discriminant(n);
  if (dec.D == 1 && s == Real(1)) throw std::domain_error("script_l: pole of zeta(s) at s = 1 for square n");
  r.branch = ScriptLBranch::decomposed;
  r.has_components = true;
  r.D = dec.D;
  r.l = dec.l;
  PrecisionContext hi = ctx;
  hi.bits = ctx.internal_bits();
  WorkingPrecision guard(hi.bits);
  r.l_value = dirichlet_l(dec.D, s, hi);
  r.t_value = t_factor(dec.l, dec.D, s, hi);
  r.scale = pow(Real(dec.l), 0.5 - s);
  r.value = (r.scale * r.t_value * r.l_value).rounded(ctx.bits);
  r.l_value = r.l_value.rounded(ctx.bits);
  r.t_value = r.t_value.rounded(ctx.bits);
  r.scale = r.scale.rounded(ctx.bits);
  return r;
}

// (pi/|n|)^(-s/2) Gamma(s/2 + 1/4 - sgn(n)/4) L_n(s).
inline Real completed_script_l(i64 n, const Real& s, const PrecisionContext& ctx) {
  if (n == 0) throw std::invalid_argument("completed_script_l: n != 0");
  i64 m4 = detail::mod(n, 4);
  if (m4 == 2 || m4 == 3) throw std::invalid_argument("completed_script_l: n must be 0 or 1 mod 4");
  PrecisionContext hi = ctx;
  hi.bits = ctx.internal_bits();
  WorkingPrecision guard(hi.bits);
  Real g = n > 0 ? s / 2 : s / 2 + 0.5;
  if (detail::is_nonpositive_integer(g)) throw std::domain_error("completed_script_l: Gamma pole");
  Real pre = pow(const_pi() / Real(n < 0 ? -n : n), -s / 2) * gamma(g, hi);
  return (pre * script_l(n, s, hi).value).rounded(ctx.bits);
}

struct DirectSeriesValue {
  Real value;
  Real tail_bound;
  long terms = 0;
};

namespace detail {

// lambda_q(n) for all q <= Q via multiplicativity on the smallest-prime-factor sieve.
inline std::vector<i64> lambda_row(i64 n, i64 Q) {
  std::vector<i64> lam(static_cast<std::size_t>(Q + 1), 0);
  if (Q < 1) return lam;
  i64 m4 = mod(n, 4);
  if (m4 == 2 || m4 == 3) return lam;
  const auto& spf = spf_table();
  i64 base = rho_two_power(0, n);
  // f(q) for the multiplicative part without the rho_1 prefactor.
  std::vector<i64> f(static_cast<std::size_t>(Q + 1), 0);
  f[1] = 1;
  std::map<std::pair<u64, int>, i64> pp;
  for (i64 q = 2; q <= Q; ++q) {
    u64 p = spf[static_cast<std::size_t>(q)];
    i64 rest = q;
    int e = 0;
    while (rest % static_cast<i64>(p) == 0) {
      rest /= static_cast<i64>(p);
      ++e;
    }
    auto key = std::pair{p, e};
    auto it = pp.find(key);
    if (it == pp.end()) it = pp.emplace(key, lambda_prime_power(p, e, n)).first;
    f[q] = f[rest] * it->second;
  }
  for (i64 q = 1; q <= Q; ++q) lam[q] = base * f[q];
  return lam;
}

}  // namespace detail

// Oracle: sum_{q <= Q} lambda_q(n) q^-s, plus Q^(1-s)/(s-1) times the empirical
// mean of lambda_q(n) when n is a square (the coefficients then have nonzero mean).
inline DirectSeriesValue script_l_direct(i64 n, const Real& s, i64 Q, const PrecisionContext& ctx) {
  if (n == 0) throw std::invalid_argument("script_l_direct: n = 0 is handled by script_l");
  if (Q < 1 || Q > 1000000) throw std::invalid_argument("script_l_direct: need 1 <= Q <= 1e6");
  if (s < 1.5) throw std::domain_error("script_l_direct: need s >= 1.5");
  double sd = s.to_double();
  auto lam = detail::lambda_row(n, Q);
  long double sum = 0, comp = 0, mean = 0;
  double maxc = 0;
  const double eps = 0.05;
  for (i64 q = 1; q <= Q; ++q) {
    if (lam[q] == 0) continue;
    long double t = static_cast<long double>(lam[q]) * std::pow(static_cast<long double>(q), -static_cast<long double>(sd));
    long double y = t - comp;
    long double u = sum + y;
    comp = (u - sum) - y;
    sum = u;
    mean += lam[q];
    if (2 * q > Q) maxc = std::max(maxc, std::fabs(static_cast<double>(lam[q])) * std::pow(static_cast<double>(q), -eps));
  }
  bool square = false;
  if (n > 0) {
    i64 r = static_cast<i64>(detail::isqrt(static_cast<u64>(n)));
    square = r * r == n;
  }
  double Qd = static_cast<double>(Q);
  if (square) sum += mean / Qd * std::pow(Qd, 1 - sd) / (sd - 1);
  DirectSeriesValue out;
  WorkingPrecision guard(ctx.bits);
  out.value = Real(static_cast<double>(sum));
  out.tail_bound = Real(std::max(maxc, 1.0) * std::pow(Qd, 1 - sd + eps) / (sd - 1 - eps));
  out.terms = Q;
  return out;
}

// Secondary path: zeta(2s)/zeta(s) sum_{q <= Q} rho_q(n) q^-s.
inline DirectSeriesValue script_l_direct_rho(i64 n, const Real& s, i64 Q, const PrecisionContext& ctx) {
  if (n == 0) throw std::invalid_argument("script_l_direct_rho: n = 0 is handled by script_l");
  double sd = s.to_double();
  long double sum = 0;
  for (i64 q = 1; q <= Q; ++q) {
    i64 r = rho(q, n);
    if (r) sum += static_cast<long double>(r) * std::pow(static_cast<long double>(q), -static_cast<long double>(sd));
  }
  DirectSeriesValue out;
  WorkingPrecision guard(ctx.internal_bits());
  Real pref = riemann_zeta(2 * s, ctx) / riemann_zeta(s, ctx);
  out.value = (pref * Real(static_cast<double>(sum))).rounded(ctx.bits);
  out.tail_bound = Real(std::pow(static_cast<double>(Q), 1 - sd + 0.05) / (sd - 1.05)).rounded(ctx.bits);
  out.terms = Q;
  return out;
}

// Double-precision L(s, chi_D) for scans; about 1e-15 relative.
inline double dirichlet_l_fast(i64 D, double s) {
  static const double b2j_over_fact[] = {1.0 / 12, -1.0 / 720, 1.0 / 30240, -1.0 / 1209600, 1.0 / 47900160,
                                         -691.0 / 1307674368000.0};
  const long M = 10;
  auto tail = [&](double y) {
    double p = std::pow(y, -s);
    double r = p * y / (s - 1) + p / 2;
    double poch = s, t = p / y;  // y^(-s-2j+1) starting at j = 1
    for (int j = 0; j < 6; ++j) {
      r += b2j_over_fact[j] * poch * t;
      poch *= (s + 2 * j + 1) * (s + 2 * j + 2);
      t /= y * y;
    }
    return r;
  };
  if (D == 1) {
    double h = 0;
    for (long n = 1; n < M; ++n) h += std::pow(static_cast<double>(n), -s);
    return h + tail(static_cast<double>(M));
  }
  auto chi = character_table(D);
  i64 q = D < 0 ? -D : D;
  double head = 0, tails = 0;
  bool half = s == 0.5;
  for (i64 m = 1; m < q * M; ++m) {
    int c = chi[static_cast<std::size_t>(m % q)];
    if (c == 0) continue;
    double md = static_cast<double>(m);
    double p = half ? 1 / std::sqrt(md) : std::pow(md, -s);
    head += c * p;
  }
  for (i64 a = 1; a < q; ++a) {
    int c = chi[static_cast<std::size_t>(a)];
    if (c) tails += c * tail(static_cast<double>(a) / static_cast<double>(q) + M);
  }
  return head + tails * std::pow(static_cast<double>(q), -s);
}

inline double t_factor_fast(i64 l, i64 D, double s) {
  double sum = 0;
  for (u64 d : divisors(static_cast<u64>(l))) {
    i64 l1 = static_cast<i64>(d);
    int m = mobius(d);
    int c = m ? kronecker_chi(D, l1) : 0;
    if (c == 0) continue;
    i64 l2 = l / l1;
    double tau = 0;
    for (u64 e : divisors(static_cast<u64>(l2)))
      tau += std::pow(static_cast<double>(e) * static_cast<double>(e) / static_cast<double>(l2), s - 0.5);
    sum += c * m / std::sqrt(static_cast<double>(l1)) * tau;
  }
  return sum;
}

struct SubconvexityScan {
  double exponent = 1.0 / 6 + 0.05;
  i64 d_max = 0;
  double max_ratio = 0;
  i64 argmax = 0;
  long values = 0;
};

// max over 0 < |d| <= d_max of |L_d(1/2)| / |d|^exponent.
inline SubconvexityScan subconvexity_scan(i64 d_max, double exponent = 1.0 / 6 + 0.05) {
  SubconvexityScan r;
  r.exponent = exponent;
  r.d_max = d_max;
  std::map<i64, double> lcache;
  for (i64 d = -d_max; d <= d_max; ++d) {
    if (d == 0) continue;
    i64 m4 = detail::mod(d, 4);
    if (m4 == 2 || m4 == 3) continue;
    auto dec = decompose_discriminant(d);
    auto it = lcache.find(dec.D);
    if (it == lcache.end()) it = lcache.emplace(dec.D, dirichlet_l_fast(dec.D, 0.5)).first;
    double v = std::fabs(t_factor_fast(dec.l, dec.D, 0.5) * it->second);
    double ratio = v / std::pow(std::fabs(static_cast<double>(d)), exponent);
    ++r.values;
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.argmax = d;
    }
  }
  return r;
}

// Envelope constant c0 with |L_d(1/2)| <= c0 |d|^(1/6+0.05), from the |d| <= 1e4 scan
// with a 1.5x margin; computed once.
inline double subconvexity_constant() {
  static const double c0 = [] { return 1.5 * subconvexity_scan(10000).max_ratio; }();
  return c0;
}

}  // namespace symsq
