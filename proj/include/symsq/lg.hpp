#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "symsq/bessel.hpp"
#include "symsq/gamma.hpp"
#include "symsq/phipsi.hpp"
#include "symsq/precision.hpp"
#include "symsq/real.hpp"

namespace symsq {

enum class LGBranch { oscillatory, exponential };

inline const char* branch_name(LGBranch b) { return b == LGBranch::oscillatory ? "oscillatory" : "exponential"; }

// Oscillatory: Bessel J/Y kernels, u = 2k - 1.  Exponential: K kernel, u = k - 1/2.
struct LGExpansion {
  LGBranch branch = LGBranch::oscillatory;
  double u = 11;
  int N = 1;
  double lambda1 = 0;

  static LGExpansion for_weight(LGBranch b, long k, int N, double lambda1 = 0) {
    if (N < 0 || N > 1) throw std::invalid_argument("LG order must be 0 or 1");
    LGExpansion e;
    e.branch = b;
    e.u = b == LGBranch::oscillatory ? 2.0 * k - 1 : k - 0.5;
    e.N = N;
    e.lambda1 = lambda1;
    return e;
  }
};

struct LGErrorEnvelope {
  Real bound;
  std::string shape;
};

struct LGValue {
  Real value;
  LGErrorEnvelope envelope;
};

// Multiplicative envelope constants, calibrated once on k in {8, 12, 16, 32} over a
// coarse xi grid (window maxima for the oscillatory branch) and frozen with a
// safety factor of 2.  Index is the order N.
struct LGEnvelopeConstants {
  static constexpr double oscillatory[2] = {0.08, 0.025};
  static constexpr double exponential[2] = {0.6, 0.006};
  static double get(LGBranch b, int N) { return b == LGBranch::oscillatory ? oscillatory[N] : exponential[N]; }
};

inline Real xi2(const PrecisionContext& ctx) {
  WorkingPrecision guard(ctx.internal_bits());
  return (sqr(const_pi()) / 4).rounded(ctx.bits);
}

// xi = 4 arcsin^2 sqrt(y), (0,1) -> (0, pi^2).
inline Real xi_osc(const Real& y, const PrecisionContext& ctx) {
  if (!(y > 0.0) || !(y < 1.0)) throw std::domain_error("xi_osc: need 0 < y < 1");
  WorkingPrecision guard(ctx.internal_bits());
  return (4 * sqr(asin(sqrt(y)))).rounded(ctx.bits);
}

inline Real xi_osc_inverse(const Real& xi, const PrecisionContext& ctx) {
  WorkingPrecision guard(ctx.internal_bits());
  if (!(xi > 0.0) || !(xi < sqr(const_pi()))) throw std::domain_error("xi_osc_inverse: need 0 < xi < pi^2");
  return sqr(sin(sqrt(xi) / 2)).rounded(ctx.bits);
}

// xi = 4 artanh^2 sqrt(1 - x), decreasing from (0,1) onto (0, inf).
inline Real xi_exp(const Real& x, const PrecisionContext& ctx) {
  if (!(x > 0.0) || !(x < 1.0)) throw std::domain_error("xi_exp: need 0 < x < 1");
  WorkingPrecision guard(ctx.internal_bits());
  return (4 * sqr(atanh(sqrt(1 - x)))).rounded(ctx.bits);
}

inline Real xi_exp_inverse(const Real& xi, const PrecisionContext& ctx) {
  if (!(xi > 0.0)) throw std::domain_error("xi_exp_inverse: need xi > 0");
  WorkingPrecision guard(ctx.internal_bits());
  return (1 / sqr(cosh(sqrt(xi) / 2))).rounded(ctx.bits);
}

// x = cos^2 sqrt(xi) and back; the argument map of the Phi approximation.
inline Real xi_from_phi_arg(const Real& x, const PrecisionContext& ctx) {
  if (!(x > 0.0) || !(x < 1.0)) throw std::domain_error("xi_from_phi_arg: need 0 < x < 1");
  WorkingPrecision guard(ctx.internal_bits());
  return sqr(acos(sqrt(x))).rounded(ctx.bits);
}

namespace detail {

struct Rational {
  long num;
  long den;
};

struct Taylor3 {
  Rational c[4];
};

inline constexpr Taylor3 kPsiOsc{{{1, 48}, {1, 240}, {1, 1512}, {1, 10800}}};
inline constexpr Taylor3 kPsiExp{{{1, 192}, {-1, 3840}, {1, 96768}, {-1, 2764800}}};
inline constexpr Taylor3 kB0Osc{{{1, 24}, {1, 360}, {1, 3780}, {1, 37800}}};
inline constexpr Taylor3 kA1Osc{{{0, 1}, {-7, 1920}, {-13, 20160}, {-19, 201600}}};
inline constexpr Taylor3 kB0Exp{{{1, 96}, {-1, 5760}, {1, 241920}, {-1, 9676800}}};
inline constexpr Taylor3 kA1Exp{{{0, 1}, {7, 30720}, {-13, 1290240}, {19, 51609600}}};

// The cubic Taylor polynomial is used below 1e-3 only when its xi^4 remainder is
// below the working precision; otherwise the closed form runs with extra bits
// covering the cancellation (about 3 log2(1/xi)).
inline bool lg_use_taylor(const Real& xi, long bits) {
  if (xi.is_zero()) return true;
  if (!(xi < 1e-3)) return false;
  return 4 * log2_abs(xi) < -static_cast<double>(bits) - 4;
}

inline long lg_extra_bits(const Real& xi) {
  if (!(xi < 1.0)) return 8;
  return static_cast<long>(std::ceil(-3 * log2_abs(xi))) + 16;
}

inline Real taylor_value(const Taylor3& t, const Real& xi) {
  Real r = Real(t.c[3].num) / t.c[3].den;
  for (int i = 2; i >= 0; --i) r = r * xi + Real(t.c[i].num) / t.c[i].den;
  return r;
}

inline Real taylor_derivative(const Taylor3& t, const Real& xi) {
  return Real(t.c[1].num) / t.c[1].den + xi * (Real(2 * t.c[2].num) / t.c[2].den + xi * (Real(3 * t.c[3].num) / t.c[3].den));
}

inline void check_branch_domain(LGBranch b, const Real& xi) {
  if (xi < 0.0) throw std::domain_error("LG coefficient: xi must be nonnegative");
  if (b == LGBranch::oscillatory && !(xi < sqr(const_pi()))) throw std::domain_error("LG coefficient: oscillatory xi < pi^2");
}

enum class Coeff { psi, b0, a1, b0_prime, a1_prime };

inline const Taylor3& taylor_of(LGBranch b, Coeff c) {
  bool o = b == LGBranch::oscillatory;
  switch (c) {
    case Coeff::psi: return o ? kPsiOsc : kPsiExp;
    case Coeff::b0:
    case Coeff::b0_prime: return o ? kB0Osc : kB0Exp;
    default: return o ? kA1Osc : kA1Exp;
  }
}

// Closed forms in z = sqrt(xi); derivatives are d/dxi = (1/2z) d/dz.
inline Real closed_coeff(LGBranch b, Coeff c, const Real& xi) {
  Real z = sqrt(xi);
  if (b == LGBranch::oscillatory) {
    Real ct = cot(z), cs2 = 1 / sqr(sin(z));
    Real d = ct - 1 / z;
    switch (c) {
      case Coeff::psi: return (cs2 - 1 / xi) / 16;
      case Coeff::b0: return -d / (8 * z);
      case Coeff::a1: return (1 / xi - ct / (2 * z) - cs2 / 2) / 8 - sqr(d) / 128;
      case Coeff::b0_prime: return (z * cs2 - 2 / z + ct) / (16 * z * xi);
      case Coeff::a1_prime: {
        Real dz = (-2 / (z * xi) + cs2 / (2 * z) + ct / (2 * xi) + cs2 * ct) / 8 + d * (cs2 - 1 / xi) / 64;
        return dz / (2 * z);
      }
    }
  }
  Real h = z / 2;
  Real ch = coth(h), sh2 = 1 / sqr(sinh(h));
  Real d = ch - 2 / z;
  switch (c) {
    case Coeff::psi: return (1 / xi - sh2 / 4) / 16;
    case Coeff::b0: return (ch / z - 2 / xi) / 16;
    case Coeff::a1: return -(4 / xi - ch / z - sh2 / 2) / 32 + sqr(d) / 512;
    case Coeff::b0_prime: return (-sh2 / (2 * z) - ch / xi + 4 / (z * xi)) / (32 * z);
    case Coeff::a1_prime: {
      Real inner = -8 / (z * xi) + sh2 / (2 * z) + ch / xi + sh2 * ch / 2;
      Real dz = -inner / 32 + d * (4 / xi - sh2) / 512;
      return dz / (2 * z);
    }
  }
  return Real(0);
}

inline Real lg_coefficient(LGBranch b, Coeff c, const Real& xi, const PrecisionContext& ctx) {
  check_branch_domain(b, xi);
  bool deriv = c == Coeff::b0_prime || c == Coeff::a1_prime;
  if (lg_use_taylor(xi, ctx.internal_bits())) {
    WorkingPrecision guard(ctx.internal_bits());
    const Taylor3& t = taylor_of(b, c);
    return (deriv ? taylor_derivative(t, xi) : taylor_value(t, xi)).rounded(ctx.bits);
  }
  WorkingPrecision guard(ctx.internal_bits() + lg_extra_bits(xi));
  return closed_coeff(b, c, xi).rounded(ctx.bits);
}

}  // namespace detail

// psi(xi) of the normal form Z'' + [+-u^2/(4 xi) + 1/(4 xi^2) +- psi/xi] Z = 0.
inline Real lg_psi(LGBranch b, const Real& xi, const PrecisionContext& ctx) {
  return detail::lg_coefficient(b, detail::Coeff::psi, xi, ctx);
}

inline Real coeff_B0(LGBranch b, const Real& xi, const PrecisionContext& ctx) {
  return detail::lg_coefficient(b, detail::Coeff::b0, xi, ctx);
}

inline Real coeff_A1(LGBranch b, const Real& xi, double lambda1, const PrecisionContext& ctx) {
  Real a = detail::lg_coefficient(b, detail::Coeff::a1, xi, ctx);
  if (lambda1 == 0) return a;
  WorkingPrecision guard(ctx.internal_bits());
  return (a + lambda1).rounded(ctx.bits);
}

inline Real coeff_B0_derivative(LGBranch b, const Real& xi, const PrecisionContext& ctx) {
  return detail::lg_coefficient(b, detail::Coeff::b0_prime, xi, ctx);
}

inline Real coeff_A1_derivative(LGBranch b, const Real& xi, const PrecisionContext& ctx) {
  return detail::lg_coefficient(b, detail::Coeff::a1_prime, xi, ctx);
}

enum class LGKernel { J, Y, K };

namespace detail {

inline LGBranch kernel_branch(LGKernel k) { return k == LGKernel::K ? LGBranch::exponential : LGBranch::oscillatory; }

struct KernelValues {
  Real c0, c1;
  Real scale;  // J: sqrt(J0^2+Y0^2), Y: same, K: K0
};

inline KernelValues kernel_values(LGKernel kind, const Real& arg, const PrecisionContext& ctx) {
  KernelValues v;
  if (kind == LGKernel::K) {
    v.c0 = bessel_k0(arg, ctx);
    v.c1 = bessel_k1(arg, ctx);
    v.scale = v.c0;
    return v;
  }
  Real j0 = bessel_j(0, arg, ctx), y0 = bessel_y0(arg, ctx);
  if (kind == LGKernel::J) {
    v.c0 = j0;
    v.c1 = bessel_j(1, arg, ctx);
  } else {
    v.c0 = y0;
    v.c1 = bessel_y1(arg, ctx);
  }
  v.scale = hypot(j0, y0);
  return v;
}

inline std::string envelope_shape(LGKernel kind) {
  switch (kind) {
    case LGKernel::J: return "c*sqrt(xi)*M0(u*sqrt(xi))*min(sqrt(xi),1)/u^(2N+1)";
    case LGKernel::Y: return "c*sqrt(xi)*M0(u*sqrt(xi))*sqrt(xi2-xi)/u^(2N+1)";
    default: return "c*sqrt(xi)*K0(u*sqrt(xi))*min(sqrt(xi),1/xi)/u^(2N+1)";
  }
}

}  // namespace detail

// Truncated expansion z C0(uz) (1 + A1/u^2) - (xi/u) C1(uz) B0 (N = 1), or z C0(uz) (N = 0),
// with z = sqrt(xi); the envelope uses the Bessel modulus M0 = sqrt(J0^2 + Y0^2)
// for both oscillatory kernels.
inline LGValue z_kernel(LGKernel kind, const Real& xi, const LGExpansion& e, const PrecisionContext& ctx) {
  if (e.N < 0 || e.N > 1) throw std::invalid_argument("LG order must be 0 or 1");
  if (!(xi > 0.0)) throw std::domain_error("z_kernel: xi must be positive");
  LGBranch b = detail::kernel_branch(kind);
  auto hi = detail::widened(ctx, 8);
  WorkingPrecision guard(hi.bits);
  // xi2 as rounded at the caller's precision counts as the turning point itself.
  Real gap = xi2(hi) - xi;
  if (b == LGBranch::oscillatory) {
    if (log2_abs(gap) < 5 - static_cast<double>(xi.precision())) gap = 0;
    if (gap < 0.0) throw std::domain_error("z_kernel: oscillatory xi <= pi^2/4");
  }
  Real u(e.u), z = sqrt(xi);
  auto kv = detail::kernel_values(kind, u * z, hi);
  Real value = z * kv.c0;
  if (e.N >= 1) {
    Real a = 1 + coeff_A1(b, xi, e.lambda1, hi) / sqr(u);
    value = value * a - xi / u * kv.c1 * coeff_B0(b, xi, hi);
  }
  Real shape;
  switch (kind) {
    case LGKernel::J: shape = min(z, Real(1)); break;
    case LGKernel::Y: shape = sqrt(gap); break;
    default: shape = min(z, 1 / xi); break;
  }
  Real bound = LGEnvelopeConstants::get(b, e.N) * z * kv.scale * shape / pow(u, 2L * e.N + 1);
  LGValue out;
  out.value = value.rounded(ctx.bits);
  out.envelope.bound = bound.rounded(ctx.bits);
  out.envelope.shape = detail::envelope_shape(kind);
  return out;
}

inline LGValue z_j(const Real& xi, const LGExpansion& e, const PrecisionContext& ctx) {
  return z_kernel(LGKernel::J, xi, e, ctx);
}
inline LGValue z_y(const Real& xi, const LGExpansion& e, const PrecisionContext& ctx) {
  return z_kernel(LGKernel::Y, xi, e, ctx);
}
inline LGValue z_k(const Real& xi, const LGExpansion& e, const PrecisionContext& ctx) {
  return z_kernel(LGKernel::K, xi, e, ctx);
}

// d/dxi of the truncated expansion, assembled from C0' = -C1 and
// C1'(t) = C0(t) - C1(t)/t (J, Y) or -K0(t) - K1(t)/t (K).
inline Real z_kernel_derivative(LGKernel kind, const Real& xi, const LGExpansion& e, const PrecisionContext& ctx) {
  if (!(xi > 0.0)) throw std::domain_error("z_kernel_derivative: xi must be positive");
  LGBranch b = detail::kernel_branch(kind);
  auto hi = detail::widened(ctx, 8);
  WorkingPrecision guard(hi.bits);
  Real u(e.u), z = sqrt(xi);
  auto kv = detail::kernel_values(kind, u * z, hi);
  Real a = 1, da = 0, bb = 0, db = 0;
  if (e.N >= 1) {
    a += coeff_A1(b, xi, e.lambda1, hi) / sqr(u);
    da = coeff_A1_derivative(b, xi, hi) / sqr(u);
    bb = coeff_B0(b, xi, hi);
    db = coeff_B0_derivative(b, xi, hi);
  }
  long sigma = kind == LGKernel::K ? -1 : 1;
  Real w = (kv.c0 / (2 * z) - u / 2 * kv.c1) * a + z * kv.c0 * da;
  Real v = (kv.c1 / 2 + sigma * (u * z / 2) * kv.c0) * bb + xi * kv.c1 * db;
  return (w - v / u).rounded(ctx.bits);
}

struct ConnectionConstants {
  Real c1, c2, C_Y, C_J;
};

// Matches Z_Y = xi^(1/4) (sin sqrt xi)^(1/2) (c1 G1 + c2 G2) at xi2 = pi^2/4 in
// value and derivative, using G1(1/2) = G2(1/2) and G1'(1/2) = -G2'(1/2).
inline ConnectionConstants connection_constants_phi(long k, const PrecisionContext& ctx, int N = 1,
                                                    double lambda1 = 0) {
  if (k < 5) throw std::domain_error("connection_constants_phi: k >= 5");
  auto hi = detail::widened(ctx, 16);
  WorkingPrecision guard(hi.bits);
  auto e = LGExpansion::for_weight(LGBranch::oscillatory, k, N, lambda1);
  Real x2 = xi2(hi);
  Real zy = z_y(x2, e, hi).value;
  Real dzy = z_kernel_derivative(LGKernel::Y, x2, e, hi);
  Real half(0.5);
  Real g = legendre_g(half, k, hi), dg = legendre_g_derivative(half, k, hi);
  Real q = sqrt(sqrt(x2));
  Real s = zy / (q * g);
  Real d = 4 * q * (dzy - zy / (4 * x2)) / dg;
  ConnectionConstants c;
  c.c1 = (s + d) / 2;
  c.c2 = (s - d) / 2;
  c.C_Y = 1 / c.c2;
  c.C_J = -c.c1 / c.c2;
  c.c1 = c.c1.rounded(ctx.bits);
  c.c2 = c.c2.rounded(ctx.bits);
  c.C_Y = c.C_Y.rounded(ctx.bits);
  c.C_J = c.C_J.rounded(ctx.bits);
  return c;
}

// Gamma(k-1/4)Gamma(k+1/4)/Gamma(2k) 2^(2k) sqrt(u)/sqrt(pi) / [1 + a1/u^2 - b0/u],
// a1 = 1/512 + lambda1, b0 = 1/16; the bracket is 1 for N = 0.
inline Real connection_constant_psi(long k, const PrecisionContext& ctx, int N = 1, double lambda1 = 0) {
  if (k < 5) throw std::domain_error("connection_constant_psi: k >= 5");
  auto hi = detail::widened(ctx, 16);
  WorkingPrecision guard(hi.bits);
  Real kr(k), u = kr - 0.5;
  Real lg = log_gamma(kr - 0.25, hi) + log_gamma(kr + 0.25, hi) - log_gamma(Real(2 * k), hi) + 2 * k * const_log2();
  Real r = exp(lg) * sqrt(u / const_pi());
  if (N >= 1) r /= 1 + (Real(1) / 512 + lambda1) / sqr(u) - Real(1) / 16 / u;
  return r.rounded(ctx.bits);
}

// xi^(1/4) (sin sqrt xi)^(1/2) G1(sin^2(sqrt(xi)/2)), equal to the exact recessive solution W_J.
inline Real recessive_solution_j(const Real& xi, long k, const PrecisionContext& ctx) {
  auto hi = detail::widened(ctx, 8);
  WorkingPrecision guard(hi.bits);
  if (!(xi > 0.0) || !(xi < xi2(hi))) throw std::domain_error("recessive_solution_j: need 0 < xi < pi^2/4");
  Real z = sqrt(xi);
  Real r = sqrt(sqrt(xi) * sin(z)) * legendre_g(sqr(sin(z / 2)), k, hi);
  return r.rounded(ctx.bits);
}

// Phi_k(cos^2 sqrt xi) ~ -pi / (xi^(1/4) (sin sqrt xi)^(1/2)) [(1 + C_J) Z_J + C_Y Z_Y].
inline LGValue approx_phi(const Real& x, long k, int N, const PrecisionContext& ctx, double lambda1 = 0) {
  auto hi = detail::widened(ctx, 16);
  WorkingPrecision guard(hi.bits);
  Real xi = xi_from_phi_arg(x, hi);
  auto e = LGExpansion::for_weight(LGBranch::oscillatory, k, N, lambda1);
  auto cc = connection_constants_phi(k, hi, N, lambda1);
  auto zj = z_j(xi, e, hi);
  auto zy = z_y(xi, e, hi);
  Real pre = const_pi() / sqrt(sqrt(xi) * sin(sqrt(xi)));
  Real value = -pre * ((1 + cc.C_J) * zj.value + cc.C_Y * zy.value);
  Real bound = pre * (abs(1 + cc.C_J) * zj.envelope.bound + abs(cc.C_Y) * zy.envelope.bound);
  LGValue out;
  out.value = value.rounded(ctx.bits);
  out.envelope.bound = bound.rounded(ctx.bits);
  out.envelope.shape = "pi/(xi^(1/4) sin^(1/2)) * (|1+C_J| J-envelope + |C_Y| Y-envelope)";
  return out;
}

// Psi_k(1/cosh^2(sqrt(xi)/2)) ~ C_K Z_K(xi) / (xi sinh^2 sqrt xi)^(1/4).
inline LGValue approx_psi(const Real& x, long k, int N, const PrecisionContext& ctx, double lambda1 = 0) {
  auto hi = detail::widened(ctx, 16);
  WorkingPrecision guard(hi.bits);
  Real xi = xi_exp(x, hi);
  auto e = LGExpansion::for_weight(LGBranch::exponential, k, N, lambda1);
  Real ck = connection_constant_psi(k, hi, N, lambda1);
  auto zk = z_k(xi, e, hi);
  Real den = sqrt(sqrt(xi * sqr(sinh(sqrt(xi)))));
  LGValue out;
  out.value = (ck * zk.value / den).rounded(ctx.bits);
  out.envelope.bound = (abs(ck) * zk.envelope.bound / den).rounded(ctx.bits);
  out.envelope.shape = "C_K * K-envelope / (xi sinh^2 sqrt(xi))^(1/4)";
  return out;
}

struct LGTablePoint {
  LGBranch branch = LGBranch::oscillatory;
  long k = 0;
  double u = 0;
  int N = 1;
  Real xi, exact, approx, abs_err, envelope;
};

// One row of the comparison table: Phi_k(cos^2 sqrt xi) or Psi_k(1/cosh^2(sqrt(xi)/2))
// against its Liouville-Green approximation and assembled envelope.
inline LGTablePoint lg_table_point(LGBranch b, const Real& xi, long k, int N, const PrecisionContext& ctx) {
  auto hi = detail::widened(ctx, 8);
  WorkingPrecision guard(hi.bits);
  LGTablePoint p;
  p.branch = b;
  p.k = k;
  p.N = N;
  p.u = LGExpansion::for_weight(b, k, N).u;
  p.xi = xi;
  LGValue ap;
  if (b == LGBranch::oscillatory) {
    if (!(xi > 0.0) || !(xi < xi2(hi))) throw std::domain_error("lg_table_point: need 0 < xi < pi^2/4");
    Real x = sqr(cos(sqrt(xi)));
    p.exact = phi_k(x, k, hi);
    ap = approx_phi(x, k, N, hi);
  } else {
    if (!(xi > 0.0)) throw std::domain_error("lg_table_point: need xi > 0");
    Real x = xi_exp_inverse(xi, hi);
    p.exact = psi_k(x, k, hi);
    ap = approx_psi(x, k, N, hi);
  }
  p.approx = ap.value.rounded(ctx.bits);
  p.abs_err = abs(p.exact - ap.value).rounded(ctx.bits);
  p.exact = p.exact.rounded(ctx.bits);
  p.envelope = ap.envelope.bound;
  return p;
}

struct ErrorOrderPoint {
  long k = 0;
  double u = 0;
  double error = 0;            // window maximum (oscillatory) or pointwise error, normalized
  double envelope_ratio = 0;   // max over measured points of |exact - approx| / envelope
  bool precision_limited = false;
};

struct ErrorOrderRow {
  double xi = 0;
  double slope = 0;
  double residual = 0;
  std::vector<ErrorOrderPoint> points;
  bool envelope_ok = true;
  bool precision_limited = false;
};

struct ErrorOrderTable {
  LGBranch branch = LGBranch::oscillatory;
  int N = 1;
  std::vector<ErrorOrderRow> rows;
};

namespace detail {

inline void least_squares(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& rms) {
  double n = static_cast<double>(x.size()), mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  slope = sxy / sxx;
  double ss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (my + slope * (x[i] - mx));
    ss += r * r;
  }
  rms = std::sqrt(ss / n);
}

}  // namespace detail

// For each xi: least-squares slope of log(error) against log(u).  Oscillatory errors
// are maxima over 8 points spanning one period 4 pi sqrt(xi)/u centred at xi, each
// normalized by pi/(xi^(1/4) sin^(1/2)) sqrt(xi) M0(u sqrt xi); exponential errors are
// pointwise, normalized by C_K sqrt(xi) K0(u sqrt xi)/(xi sinh^2 sqrt xi)^(1/4).
inline ErrorOrderTable error_order_table(LGBranch branch, const std::vector<double>& xi_grid,
                                         const std::vector<long>& k_list, int N, const PrecisionContext& ctx) {
  if (k_list.size() < 4) throw std::invalid_argument("error_order_table: need at least 4 weights");
  auto [kmin, kmax] = std::minmax_element(k_list.begin(), k_list.end());
  if (*kmax < 4 * *kmin) throw std::invalid_argument("error_order_table: weights must span a factor >= 4");
  ErrorOrderTable table;
  table.branch = branch;
  table.N = N;
  auto hi = detail::widened(ctx, 0);
  WorkingPrecision guard(hi.bits);
  Real pi = const_pi();
  double limit = -static_cast<double>(ctx.bits) + 8;
  for (double xi_d : xi_grid) {
    ErrorOrderRow row;
    row.xi = xi_d;
    std::vector<double> lu, le;
    for (long k : k_list) {
      ErrorOrderPoint p;
      p.k = k;
      Real xi(xi_d);
      if (branch == LGBranch::oscillatory) {
        double u = 2.0 * k - 1;
        p.u = u;
        double w = 4 * std::numbers::pi * std::sqrt(xi_d) / u;
        for (int j = 0; j < 8; ++j) {
          Real xj = xi + Real(w) * (Real(j) / 8 - 0.5);
          if (!(xj > 0.0) || !(xj < xi2(hi))) throw std::domain_error("error_order_table: window leaves (0, pi^2/4)");
          Real zj = sqrt(xj);
          Real x = sqr(cos(zj));
          Real exact = phi_k(x, k, hi);
          auto ap = approx_phi(x, k, N, hi);
          Real diff = abs(exact - ap.value);
          Real m0 = hypot(bessel_j(0, u * zj, hi), bessel_y0(u * zj, hi));
          Real scale = pi / sqrt(sqrt(xj) * sin(zj)) * zj * m0;
          p.error = std::max(p.error, (diff / scale).to_double());
          p.envelope_ratio = std::max(p.envelope_ratio, (diff / ap.envelope.bound).to_double());
          if (diff.is_zero() || log2_abs(diff) - log2_abs(exact) < limit) p.precision_limited = true;
        }
      } else {
        double u = k - 0.5;
        p.u = u;
        Real x = xi_exp_inverse(xi, hi);
        Real exact = psi_k(x, k, hi);
        auto ap = approx_psi(x, k, N, hi);
        Real diff = abs(exact - ap.value);
        Real z = sqrt(xi);
        Real scale = connection_constant_psi(k, hi, N) * z * bessel_k0(Real(u) * z, hi) / sqrt(sqrt(xi * sqr(sinh(z))));
        p.error = (diff / scale).to_double();
        p.envelope_ratio = (diff / ap.envelope.bound).to_double();
        if (diff.is_zero() || log2_abs(diff) - log2_abs(exact) < limit) p.precision_limited = true;
      }
      if (p.envelope_ratio > 1) row.envelope_ok = false;
      if (p.precision_limited) row.precision_limited = true;
      lu.push_back(std::log(p.u));
      le.push_back(std::log(p.error));
      row.points.push_back(p);
    }
    detail::least_squares(lu, le, row.slope, row.residual);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace symsq
