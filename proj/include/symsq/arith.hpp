#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symsq/precision.hpp"
#include "symsq/real.hpp"

namespace symsq {

using i64 = std::int64_t;
using u64 = std::uint64_t;

struct Factorization {
  u64 value = 1;
  std::vector<std::pair<u64, int>> factors;
};

struct DiscriminantFactorization {
  i64 n = 0;
  i64 D = 1;
  i64 l = 1;
};

namespace detail {

inline constexpr u64 spf_limit = u64{1} << 21;

// Smallest-prime-factor table, built once and shared read-only.
inline const std::vector<std::uint32_t>& spf_table() {
  static const std::vector<std::uint32_t> table = [] {
    std::vector<std::uint32_t> t(spf_limit, 0);
    for (u64 i = 2; i < spf_limit; ++i) {
      if (t[i] != 0) continue;
      for (u64 j = i; j < spf_limit; j += i)
        if (t[j] == 0) t[j] = static_cast<std::uint32_t>(i);
    }
    return t;
  }();
  return table;
}

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

inline i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

// Inverse of a modulo m, assuming gcd(a, m) = 1.
inline i64 inverse_mod(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, a1 = mod(a, m);
  while (a1 != 0) {
    i64 q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw std::invalid_argument("inverse_mod: not invertible");
  return mod(x, m);
}

inline u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace detail

inline Factorization factorize(u64 n) {
  if (n == 0 || n > (u64{1} << 63)) throw std::out_of_range("factorize: need 1 <= n <= 2^63");
  Factorization f;
  f.value = n;
  auto push = [&](u64 p) {
    if (!f.factors.empty() && f.factors.back().first == p)
      ++f.factors.back().second;
    else
      f.factors.emplace_back(p, 1);
  };
  if (n < detail::spf_limit) {
    const auto& spf = detail::spf_table();
    while (n > 1) {
      u64 p = spf[n];
      push(p);
      n /= p;
    }
    return f;
  }
  for (u64 p : {2u, 3u, 5u})
    while (n % p == 0) {
      push(p);
      n /= p;
    }
  static constexpr u64 wheel[8] = {4, 2, 4, 2, 4, 6, 2, 6};
  u64 p = 7;
  for (int i = 0; p <= n / p; p += wheel[i], i = (i + 1) & 7) {
    while (n % p == 0) {
      push(p);
      n /= p;
    }
    if (n < detail::spf_limit && n > 1) {
      const auto& spf = detail::spf_table();
      while (n > 1) {
        u64 q = spf[n];
        push(q);
        n /= q;
      }
      return f;
    }
  }
  if (n > 1) push(n);
  return f;
}

inline std::vector<u64> divisors(u64 n) {
  std::vector<u64> d{1};
  for (auto [p, e] : factorize(n).factors) {
    std::size_t sz = d.size();
    u64 pk = 1;
    for (int j = 1; j <= e; ++j) {
      pk *= p;
      for (std::size_t i = 0; i < sz; ++i) d.push_back(d[i] * pk);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

inline int mobius(u64 n) {
  if (n == 0) throw std::out_of_range("mobius: n >= 1");
  int m = 1;
  for (auto [p, e] : factorize(n).factors) {
    if (e > 1) return 0;
    m = -m;
  }
  return m;
}

// Kronecker symbol (a/b) for arbitrary integers.
inline int kronecker(i64 a, i64 b) {
  if (b == 0) return (a == 1 || a == -1) ? 1 : 0;
  int k = 1;
  if (b < 0) {
    b = -b;
    if (a < 0) k = -k;
  }
  int v = 0;
  while ((b & 1) == 0) {
    b >>= 1;
    ++v;
  }
  if (v > 0) {
    if ((a & 1) == 0) return 0;
    i64 am8 = detail::mod(a, 8);
    if ((v & 1) && (am8 == 3 || am8 == 5)) k = -k;
  }
  i64 x = detail::mod(a, b), y = b;
  while (x != 0) {
    int t = 0;
    while ((x & 1) == 0) {
      x >>= 1;
      ++t;
    }
    if ((t & 1) && (y % 8 == 3 || y % 8 == 5)) k = -k;
    if (x % 4 == 3 && y % 4 == 3) k = -k;
    i64 r = y % x;
    y = x;
    x = r;
  }
  return y == 1 ? k : 0;
}

inline bool is_squarefree(u64 n) {
  for (auto [p, e] : factorize(n).factors)
    if (e > 1) return false;
  return true;
}

// D = 1, or D = 1 mod 4 squarefree, or D = 4m with m squarefree, m = 2,3 mod 4.
inline bool is_fundamental_discriminant(i64 D) {
  if (D == 1) return true;
  if (D == 0) return false;
  u64 a = static_cast<u64>(D < 0 ? -D : D);
  if (detail::mod(D, 4) == 1) return is_squarefree(a);
  if (detail::mod(D, 4) != 0) return false;
  i64 m = D / 4;
  i64 mm4 = detail::mod(m, 4);
  return (mm4 == 2 || mm4 == 3) && is_squarefree(a / 4);
}

inline int kronecker_chi(i64 D, i64 m) {
  if (!is_fundamental_discriminant(D)) throw std::invalid_argument("kronecker_chi: D is not a fundamental discriminant");
  if (D == 1) return 1;
  return kronecker(D, m);
}

// chi_D on residues 0..|D|-1.
inline std::vector<int> character_table(i64 D) {
  if (!is_fundamental_discriminant(D)) throw std::invalid_argument("character_table: D is not a fundamental discriminant");
  i64 q = D < 0 ? -D : D;
  std::vector<int> t(static_cast<std::size_t>(q));
  for (i64 a = 0; a < q; ++a) t[a] = D == 1 ? 1 : kronecker(D, a);
  return t;
}

// #{x mod 2q : x^2 = n mod 4q} by enumeration; test oracle.
inline i64 rho_bruteforce(i64 q, i64 n) {
  i64 m = 4 * q, c = 0;
  i64 nm = detail::mod(n, m);
  for (i64 x = 0; x < 2 * q; ++x)
    if (static_cast<i64>(detail::mulmod(x, x, m)) == nm) ++c;
  return c;
}

namespace detail {

// #{x mod p^e : x^2 = n mod p^e}, p odd.
inline i64 sqrt_count_odd(u64 p, int e, i64 n) {
  i64 pe = 1;
  for (int i = 0; i < e; ++i) pe *= static_cast<i64>(p);
  i64 r = mod(n, pe);
  if (r == 0) {
    i64 c = 1;
    for (int i = 0; i < e / 2; ++i) c *= static_cast<i64>(p);
    return c;
  }
  int v = 0;
  while (r % static_cast<i64>(p) == 0) {
    r /= static_cast<i64>(p);
    ++v;
  }
  if (v & 1) return 0;
  i64 c = 1;
  for (int i = 0; i < v / 2; ++i) c *= static_cast<i64>(p);
  return c * (1 + kronecker(r, static_cast<i64>(p)));
}

// rho at q = 2^a (a >= 0): #{x mod 2^(a+1) : x^2 = n mod 2^(a+2)}.
inline i64 rho_two_power(int a, i64 n) {
  i64 mod2 = i64{1} << (a + 2);
  i64 nm = mod(n, mod2);
  i64 c = 0;
  for (i64 x = 0; x < (i64{1} << (a + 1)); ++x)
    if (static_cast<i64>(mulmod(x, x, mod2)) == nm) ++c;
  return c;
}

// rho_{p^e}(n) for a prime power (e >= 0); p = 2 uses the 2-adic count.
inline i64 rho_prime_power(u64 p, int e, i64 n) {
  if (p == 2) return rho_two_power(e, n);
  i64 r1 = rho_two_power(0, n);
  if (r1 == 0 || e == 0) return r1;
  return sqrt_count_odd(p, e, n);
}

inline i64 lambda_prime_power(u64 p, int e, i64 n) {
  // sum over q1^2 q2 q3 = p^e with mu(q2) restricting q2 in {1, p}.
  i64 s = 0;
  for (int i = 0; 2 * i <= e; ++i) {
    s += rho_prime_power(p, e - 2 * i, n);
    if (e - 2 * i >= 1) s -= rho_prime_power(p, e - 2 * i - 1, n);
  }
  return s;
}

}  // namespace detail

inline i64 rho(i64 q, i64 n) {
  if (q < 1) throw std::invalid_argument("rho: q >= 1");
  i64 m4 = detail::mod(n, 4);
  if (m4 == 2 || m4 == 3) return 0;
  i64 r = 1;
  bool has_two = false;
  for (auto [p, e] : factorize(static_cast<u64>(q)).factors) {
    if (p == 2) {
      has_two = true;
      r *= detail::rho_two_power(e, n);
    } else {
      r *= detail::sqrt_count_odd(p, e, n);
    }
    if (r == 0) return 0;
  }
  if (!has_two) r *= detail::rho_two_power(0, n);
  return r;
}

inline i64 lambda_q(i64 q, i64 n) {
  if (q < 1) throw std::invalid_argument("lambda_q: q >= 1");
  i64 m4 = detail::mod(n, 4);
  if (m4 == 2 || m4 == 3) return 0;
  i64 r = detail::rho_two_power(0, n);
  for (auto [p, e] : factorize(static_cast<u64>(q)).factors) {
    r *= detail::lambda_prime_power(p, e, n);
    if (r == 0) return 0;
  }
  return r;
}

// lambda_q(n) by the defining convolution; test oracle.
inline i64 lambda_q_convolution(i64 q, i64 n) {
  i64 s = 0;
  for (i64 q1 = 1; q1 * q1 <= q; ++q1) {
    if (q % (q1 * q1) != 0) continue;
    i64 rest = q / (q1 * q1);
    for (u64 q2 : divisors(static_cast<u64>(rest))) {
      int mu = mobius(q2);
      if (mu != 0) s += mu * rho_bruteforce(rest / static_cast<i64>(q2), n);
    }
  }
  return s;
}

inline i64 gcd3(i64 a, i64 b, i64 c) { return std::gcd(std::gcd(a, b), c); }

inline i64 divisor_count(u64 n) {
  i64 t = 1;
  for (auto [p, e] : factorize(n).factors) t *= e + 1;
  return t;
}

// Real Kloosterman sum S(m, n; c) at the working precision, with the Weil bound
// and vanishing imaginary part checked after summation.
inline Real kloosterman(i64 m, i64 n, i64 c) {
  if (c < 1) throw std::invalid_argument("kloosterman: c >= 1");
  Real re = 0, im = 0;
  Real two_pi_over_c = 2 * const_pi() / Real(c);
  Real s, co;
  for (i64 a = 0; a < c; ++a) {
    if (std::gcd(a, c) != 1) continue;
    i64 ab = c == 1 ? 0 : detail::inverse_mod(a, c);
    i64 ph = detail::mod(static_cast<i64>((static_cast<__int128>(a) * detail::mod(m, c) +
                                           static_cast<__int128>(ab) * detail::mod(n, c)) %
                                          c),
                         c);
    sin_cos(two_pi_over_c * ph, s, co);
    re += co;
    im += s;
  }
  double weil = static_cast<double>(divisor_count(static_cast<u64>(c))) *
                std::sqrt(static_cast<double>(gcd3(std::llabs(m), std::llabs(n), c))) *
                std::sqrt(static_cast<double>(c));
  if (std::fabs(im.to_double()) > 1e-6 || std::fabs(re.to_double()) > weil * (1 + 1e-12) + 1e-9)
    throw ConvergenceError("kloosterman: post-assertion failed");
  return re;
}

// S(m, x; c) for all residues x mod c, in double precision, by direct summation
// over a table of roots of unity.  O(c * phi(c)).
inline std::vector<double> kloosterman_row_double(i64 m, i64 c) {
  std::vector<double> cosv(static_cast<std::size_t>(c));
  for (i64 j = 0; j < c; ++j) cosv[j] = std::cos(2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(c));
  std::vector<double> row(static_cast<std::size_t>(c), 0.0);
  i64 mm = detail::mod(m, c);
  for (i64 a = 0; a < c; ++a) {
    if (std::gcd(a, c) != 1) continue;
    i64 ab = c == 1 ? 0 : detail::inverse_mod(a, c);
    i64 base = static_cast<i64>(detail::mulmod(static_cast<u64>(a), static_cast<u64>(mm), static_cast<u64>(c)));
    i64 ph = base;
    for (i64 x = 0; x < c; ++x) {
      row[x] += cosv[ph];
      ph += ab;
      if (ph >= c) ph -= c;
    }
  }
  return row;
}

// q * sum_{bd = q} mu(d) rho_b(n^2 - 4 l^2).
inline i64 twisted_kloosterman_closed(i64 l, i64 n, i64 q) {
  i64 disc = n * n - 4 * l * l, s = 0;
  for (u64 d : divisors(static_cast<u64>(q))) {
    int mu = mobius(d);
    if (mu != 0) s += mu * rho(q / static_cast<i64>(d), disc);
  }
  return q * s;
}

// sum_{c mod q} S(l^2, c^2; q) e(nc/q) given the row S(l^2, x; q) for all x.
inline double twisted_kloosterman_sum(const std::vector<double>& row, i64 n, i64 q) {
  double re = 0;
  for (i64 c = 0; c < q; ++c) {
    i64 x = static_cast<i64>(detail::mulmod(static_cast<u64>(c), static_cast<u64>(c), static_cast<u64>(q)));
    i64 ph = detail::mod(static_cast<i64>(detail::mulmod(static_cast<u64>(detail::mod(n, q)), static_cast<u64>(c), static_cast<u64>(q))), q);
    re += row[x] * std::cos(2 * std::numbers::pi * static_cast<double>(ph) / static_cast<double>(q));
  }
  return re;
}

// Closed form of sum_{c mod q} S(l^2, c^2; q) e(nc/q), cross-checked against the
// exponential sum when `verify` is set.
inline i64 twisted_kloosterman_row(i64 l, i64 n, i64 q, bool verify = true) {
  if (l < 1 || q < 1) throw std::invalid_argument("twisted_kloosterman_row: l, q >= 1");
  i64 closed = twisted_kloosterman_closed(l, n, q);
  if (verify) {
    double direct = twisted_kloosterman_sum(kloosterman_row_double(l * l, q), n, q);
    if (std::fabs(direct - static_cast<double>(closed)) > 1e-6 * static_cast<double>(q))
      throw std::logic_error("twisted_kloosterman_row: exponential sum disagrees with closed form");
  }
  return closed;
}

inline DiscriminantFactorization decompose_discriminant(i64 n) {
  if (n == 0) throw std::invalid_argument("decompose_discriminant: n = 0 belongs to the zeta(2s-1) branch");
  i64 m4 = detail::mod(n, 4);
  if (m4 == 2 || m4 == 3) throw std::invalid_argument("decompose_discriminant: n = 2,3 mod 4");
  DiscriminantFactorization r;
  r.n = n;
  if (n > 0) {
    u64 s = detail::isqrt(static_cast<u64>(n));
    if (static_cast<i64>(s * s) == n) {
      r.D = 1;
      r.l = static_cast<i64>(s);
      return r;
    }
  }
  i64 m0 = n < 0 ? -1 : 1, l0 = 1;
  for (auto [p, e] : factorize(static_cast<u64>(n < 0 ? -n : n)).factors) {
    if (e & 1) m0 *= static_cast<i64>(p);
    for (int i = 0; i < e / 2; ++i) l0 *= static_cast<i64>(p);
  }
  if (detail::mod(m0, 4) == 1) {
    r.D = m0;
    r.l = l0;
  } else {
    r.D = 4 * m0;
    r.l = l0 / 2;
  }
  return r;
}

// tau_v(n) = sum_{n1 n2 = n} (n1/n2)^v.
inline Real divisor_tau_v(i64 n, const Real& v) {
  if (n < 1) throw std::invalid_argument("divisor_tau_v: n >= 1");
  Real s = 0;
  Real nn(n);
  for (u64 d : divisors(static_cast<u64>(n))) s += pow(Real(static_cast<i64>(d)) / (nn / Real(static_cast<i64>(d))), v);
  return s;
}

}  // namespace symsq
