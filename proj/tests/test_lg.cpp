#include <gtest/gtest.h>

#include <functional>

#include "symsq/lg.hpp"

using namespace symsq;

namespace {

PrecisionContext ctx_bits(long bits) {
  PrecisionContext c;
  c.bits = bits;
  return c;
}

double rel_log2(const Real& a, const Real& b) {
  WorkingPrecision wp(std::max(a.precision(), b.precision()) + 16);
  Real d = a - b;
  if (d.is_zero()) return -1e9;
  return log2_abs(d) - log2_abs(b);
}

// Central differences at the current working precision.
Real diff1(const std::function<Real(const Real&)>& f, const Real& x, const Real& h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}
Real diff2(const std::function<Real(const Real&)>& f, const Real& x, const Real& h) {
  return (f(x + h) - 2 * f(x) + f(x - h)) / sqr(h);
}

// Test-side closed forms, written directly from the displayed formulas.
Real ref_b0_osc(const Real& xi) {
  Real z = sqrt(xi);
  return -(cot(z) - 1 / z) / (8 * z);
}
Real ref_a1_osc(const Real& xi) {
  Real z = sqrt(xi);
  return (1 / xi - cot(z) / (2 * z) - 1 / (2 * sqr(sin(z)))) / 8 - sqr(cot(z) - 1 / z) / 128;
}

}  // namespace

TEST(XiMaps, OscillatoryValues) {
  auto ctx = ctx_bits(192);
  WorkingPrecision wp(256);
  Real pi = const_pi();
  EXPECT_LT(rel_log2(xi_osc(Real(0.5), ctx), sqr(pi) / 4), -188);
  Real y = ldexp(Real(1), -40);
  EXPECT_NEAR((xi_osc(y, ctx) / (4 * y)).to_double(), 1.0, 1e-11);
  Real r = xi_osc_inverse(xi_osc(Real("0.3"), ctx), ctx);
  EXPECT_LT(rel_log2(r, Real("0.3")), -185);
  EXPECT_LT(xi_osc(Real("0.2"), ctx), xi_osc(Real("0.21"), ctx));
  EXPECT_THROW(xi_osc(Real(1), ctx), std::domain_error);
  EXPECT_THROW(xi_osc(Real(0), ctx), std::domain_error);
}

TEST(XiMaps, ExponentialValues) {
  auto ctx = ctx_bits(192);
  WorkingPrecision wp(256);
  EXPECT_LT(rel_log2(xi_exp(1 / sqr(cosh(Real(1))), ctx), Real(4)), -184);
  EXPECT_LT(rel_log2(xi_exp_inverse(xi_exp(Real("0.4"), ctx), ctx), Real("0.4")), -184);
  EXPECT_LT(xi_exp(Real(1) - ldexp(Real(1), -60), ctx), 1e-17);
  EXPECT_GT(xi_exp(Real("0.3"), ctx), xi_exp(Real("0.31"), ctx));
  EXPECT_THROW(xi_exp(Real(0), ctx), std::domain_error);
}

TEST(LgPsi, RemovableSingularityLimits) {
  auto ctx = ctx_bits(192);
  WorkingPrecision wp(256);
  EXPECT_LT(rel_log2(lg_psi(LGBranch::oscillatory, Real(0), ctx), Real(1) / 48), -190);
  EXPECT_LT(rel_log2(lg_psi(LGBranch::exponential, Real(0), ctx), Real(1) / 192), -190);
  Real pi = const_pi();
  EXPECT_LT(rel_log2(lg_psi(LGBranch::oscillatory, sqr(pi) / 4, ctx), (1 - 4 / sqr(pi)) / 16), -186);
}

TEST(LgPsi, SwitchOverMatchesHighPrecisionClosedForm) {
  auto ctx = ctx_bits(192);
  for (const char* s : {"1e-60", "1e-30", "1e-6", "0.00099", "0.00101", "0.5"}) {
    WorkingPrecision wp(2048);
    Real xi(s), z = sqrt(xi);
    Real osc = (1 / sqr(sin(z)) - 1 / xi) / 16;
    Real ex = (1 / xi - 1 / (4 * sqr(sinh(z / 2)))) / 16;
    EXPECT_LT(rel_log2(lg_psi(LGBranch::oscillatory, xi, ctx), osc), -186) << s;
    EXPECT_LT(rel_log2(lg_psi(LGBranch::exponential, xi, ctx), ex), -186) << s;
    EXPECT_LT(rel_log2(coeff_B0(LGBranch::oscillatory, xi, ctx), ref_b0_osc(xi)), -186) << s;
    EXPECT_LT(rel_log2(coeff_A1(LGBranch::oscillatory, xi, 0, ctx), ref_a1_osc(xi)), -184) << s;
  }
}

TEST(LgCoefficients, PinnedValuesAndLimits) {
  auto ctx = ctx_bits(192);
  WorkingPrecision wp(256);
  Real pi = const_pi();
  EXPECT_LT(rel_log2(coeff_B0(LGBranch::oscillatory, sqr(pi) / 4, ctx), 1 / (2 * sqr(pi))), -186);
  Real big(1e16);
  EXPECT_NEAR((sqrt(big) * coeff_B0(LGBranch::exponential, big, ctx)).to_double(), 1.0 / 16, 1e-5);
  EXPECT_NEAR(coeff_A1(LGBranch::exponential, big, 0, ctx).to_double(), 1.0 / 512, 1e-6);
  EXPECT_NEAR(coeff_A1(LGBranch::exponential, big, 0.1, ctx).to_double(), 1.0 / 512 + 0.1, 1e-6);
  // lambda_1 = 0 makes A(1; 0) = 0 in both branches.
  for (auto b : {LGBranch::oscillatory, LGBranch::exponential}) {
    EXPECT_TRUE(coeff_A1(b, Real(0), 0, ctx).is_zero());
    EXPECT_LT(abs(coeff_A1(b, Real("1e-9"), 0, ctx)), 1e-11);
    // sqrt(xi) B(0) stays bounded near zero.
    EXPECT_LT(abs(sqrt(Real("1e-9")) * coeff_B0(b, Real("1e-9"), ctx)), 1e-5);
  }
}

TEST(LgCoefficients, DerivativesMatchDifferences) {
  auto ctx = ctx_bits(192);
  WorkingPrecision wp(320);
  Real h("1e-25");
  for (auto b : {LGBranch::oscillatory, LGBranch::exponential})
    for (const char* s : {"0.0005", "0.3", "1", "2", "2.4"}) {
      Real xi(s);
      auto fb = [&](const Real& t) { return coeff_B0(b, t, ctx_bits(300)); };
      auto fa = [&](const Real& t) { return coeff_A1(b, t, 0, ctx_bits(300)); };
      EXPECT_LT(rel_log2(coeff_B0_derivative(b, xi, ctx), diff1(fb, xi, h)), -140) << s;
      EXPECT_LT(rel_log2(coeff_A1_derivative(b, xi, ctx), diff1(fa, xi, h)), -140) << s;
    }
}

// With A(0) = 1, the orders 0 and 1 of the substitution vanish:
//   C_0 = sigma psi/xi - B0' - B0/(2 xi),  D_1 = B0'' + B0'/xi + tau psi/xi B0 + A1'/xi,
// with (sigma, tau) = (+1, +1) oscillatory and (+1, -1) exponential.
TEST(LgCoefficients, RecurrenceResiduals) {
  WorkingPrecision wp(256);
  auto c = ctx_bits(240);
  Real h("1e-20");
  for (auto b : {LGBranch::oscillatory, LGBranch::exponential})
    for (const char* s : {"0.3", "1.0", "2.0"}) {
      Real xi(s);
      long tau = b == LGBranch::oscillatory ? 1 : -1;
      auto fb = [&](const Real& t) { return coeff_B0(b, t, c); };
      auto fa = [&](const Real& t) { return coeff_A1(b, t, 0, c); };
      Real psi = lg_psi(b, xi, c), b0 = fb(xi);
      Real c0 = psi / xi - diff1(fb, xi, h) - b0 / (2 * xi);
      Real d1 = diff2(fb, xi, h) + diff1(fb, xi, h) / xi + tau * psi / xi * b0 + diff1(fa, xi, h) / xi;
      EXPECT_LT(abs(c0), 1e-8) << branch_name(b) << " " << s;
      EXPECT_LT(abs(d1), 1e-8) << branch_name(b) << " " << s;
    }
}

TEST(ZKernel, EnvelopeAndLeadingTerms) {
  auto ctx = ctx_bits(192);
  WorkingPrecision wp(256);
  auto e = LGExpansion::for_weight(LGBranch::oscillatory, 20, 1);
  EXPECT_EQ(e.u, 39);
  auto zy = z_y(xi2(ctx), e, ctx);
  EXPECT_TRUE(zy.envelope.bound.is_zero());
  EXPECT_NE(zy.envelope.shape.find("sqrt(xi2-xi)"), std::string::npos);
  Real xi("1e-12");
  auto zj = z_j(xi, e, ctx);
  EXPECT_NEAR((zj.value / sqrt(xi)).to_double(), 1.0, 1e-8);
  EXPECT_THROW(z_j(Real(3), e, ctx), std::domain_error);
  EXPECT_THROW(LGExpansion::for_weight(LGBranch::oscillatory, 20, 2), std::invalid_argument);
}

TEST(ZKernel, ExponentialMatchesQuadruplePrecisionAssembly) {
  auto ctx = ctx_bits(128);
  auto e = LGExpansion::for_weight(LGBranch::exponential, 10, 1);
  EXPECT_EQ(e.u, 9.5);
  Real v = z_k(Real(4), e, ctx).value;
  WorkingPrecision wp(512);
  auto big = ctx_bits(512);
  Real u(9.5), xi(4), z(2);
  Real ref = z * bessel_k0(u * z, big) * (1 + coeff_A1(LGBranch::exponential, xi, 0, big) / sqr(u)) -
             xi / u * bessel_k1(u * z, big) * coeff_B0(LGBranch::exponential, xi, big);
  EXPECT_LT(rel_log2(v, ref), -125);
}

TEST(ZKernel, AnalyticDerivativeMatchesDifferences) {
  auto ctx = ctx_bits(160);
  WorkingPrecision wp(320);
  Real h("1e-30");
  for (auto kind : {LGKernel::J, LGKernel::Y, LGKernel::K})
    for (int N : {0, 1}) {
      auto e = LGExpansion::for_weight(kind == LGKernel::K ? LGBranch::exponential : LGBranch::oscillatory, 15, N);
      auto f = [&](const Real& t) { return z_kernel(kind, t, e, ctx_bits(300)).value; };
      for (const char* s : {"0.2", "1.1", "2.2"}) {
        Real xi(s);
        EXPECT_LT(rel_log2(z_kernel_derivative(kind, xi, e, ctx), diff1(f, xi, h)), -120) << s;
      }
    }
}

// Z'' + q Z = 0 with q = u^2/(4xi) + 1/(4xi^2) + psi/xi (oscillatory) or
// -u^2/(4xi) + 1/(4xi^2) - psi/xi (exponential); the truncated N = 1 expansion
// leaves a residual of relative size O(u^-4) against the u^2/(4xi) Z scale.
TEST(ZKernel, OdeResidualShrinksWithOrder) {
  WorkingPrecision wp(320);
  Real h("1e-25");
  for (auto kind : {LGKernel::J, LGKernel::Y, LGKernel::K}) {
    bool osc = kind != LGKernel::K;
    LGBranch b = osc ? LGBranch::oscillatory : LGBranch::exponential;
    for (const char* s : {"0.5", "1.5"}) {
      Real xi(s);
      double prev = 0;
      for (long k : {10L, 40L}) {
        auto e = LGExpansion::for_weight(b, k, 1);
        auto f = [&](const Real& t) { return z_kernel(kind, t, e, ctx_bits(300)).value; };
        Real u(e.u), zv = f(xi);
        Real q = sqr(u) / (4 * xi) + 1 / (4 * sqr(xi)) + lg_psi(b, xi, ctx_bits(300)) / xi;
        if (!osc) q = -sqr(u) / (4 * xi) + 1 / (4 * sqr(xi)) - lg_psi(b, xi, ctx_bits(300)) / xi;
        auto kv_scale = z_kernel(kind, xi, e, ctx_bits(300)).envelope.bound;
        Real scale = sqr(u) / (4 * xi) * kv_scale * pow(u, 3L);
        double r = (abs(diff2(f, xi, h) + q * zv) / scale).to_double();
        EXPECT_LT(r * std::pow(e.u, 4.0), 50.0) << s << " k=" << k;
        if (prev > 0) {
          EXPECT_LT(r, prev / 16) << s;
        }
        prev = r;
      }
    }
  }
}

TEST(Connection, PhiConstantsNearIdentity) {
  auto ctx = ctx_bits(128);
  for (long k : {10L, 20L, 40L}) {
    auto c = connection_constants_phi(k, ctx);
    double kd = static_cast<double>(k);
    EXPECT_LE(std::fabs(c.C_Y.to_double() - 1), 5 / kd) << k;
    EXPECT_LE(std::fabs(c.C_J.to_double()), 5 / (kd * kd)) << k;
    WorkingPrecision wp(160);
    EXPECT_LT(rel_log2(c.C_Y * c.c2, Real(1)), -120);
  }
}

TEST(Connection, ZyAtTurningPointAsymptotics) {
  auto ctx = ctx_bits(128);
  WorkingPrecision wp(160);
  for (long k : {10L, 20L, 40L, 80L}) {
    auto e = LGExpansion::for_weight(LGBranch::oscillatory, k, 1);
    Real u(e.u);
    Real zy = z_y(xi2(ctx), e, ctx).value;
    Real pred = -detail::sign_pow(k) / sqrt(2 * u) * (1 - Real(1) / 16 / sqr(u));
    double rel = (abs(zy - pred) / abs(pred)).to_double();
    EXPECT_LT(rel * std::pow(e.u, 3.0), 2.0) << k;
  }
}

TEST(Connection, PsiConstant) {
  auto ctx = ctx_bits(128);
  WorkingPrecision wp(160);
  EXPECT_LE(std::fabs(connection_constant_psi(50, ctx).to_double() - 2), 10.0 / 50);
  for (long k : {10L, 40L, 160L}) {
    Real kr(k);
    Real ratio = exp(log_gamma(kr - 0.25, ctx) + log_gamma(kr + 0.25, ctx) - log_gamma(2 * kr, ctx));
    Real pred = 2 * sqrt(const_pi()) / (sqrt(kr) * pow(Real(2), 2 * k));
    EXPECT_LT((abs(ratio / pred - 1) * kr).to_double(), 1.0) << k;
    double diff = (connection_constant_psi(k, ctx, 1, 0) - connection_constant_psi(k, ctx, 1, 0.1)).to_double();
    EXPECT_LT(std::fabs(diff) * static_cast<double>(k * k), 2.0) << k;
  }
}

TEST(Connection, LegendreSymmetryAtHalf) {
  auto ctx = ctx_bits(160);
  WorkingPrecision wp(256);
  for (long k : {6L, 15L, 40L}) {
    Real half(0.5);
    // The reflected representation of G(1 - y) evaluated at y = 1/2 reproduces G(1/2).
    EXPECT_LT(rel_log2(legendre_g_reflected(half, k, ctx), legendre_g_series(half, k, ctx)), -150) << k;
    // One-sided differences through the two representations agree on G'(1/2).
    Real h("1e-30");
    auto ctxh = ctx_bits(240);
    Real left = (legendre_g_series(half, k, ctxh) - legendre_g_series(half - h, k, ctxh)) / h;
    Real right = (legendre_g_reflected(half - h, k, ctxh) - legendre_g_reflected(half, k, ctxh)) / h;
    EXPECT_LT(rel_log2(left, right), -80) << k;
    EXPECT_LT(rel_log2(legendre_g_derivative(half, k, ctx), left), -80) << k;
  }
}

TEST(ApproxPhi, WithinEnvelope) {
  auto ctx = ctx_bits(128);
  Real x = sqr(cos(Real(1)));
  auto ap = approx_phi(x, 20, 1, ctx);
  Real ex = phi_k(x, 20, ctx);
  EXPECT_LE(abs(ap.value - ex), ap.envelope.bound);
  EXPECT_GT(ap.envelope.bound, 0.0);
  EXPECT_THROW(approx_phi(Real(1), 20, 1, ctx), std::domain_error);
}

TEST(ApproxPhi, RecessiveIdentityWithinJEnvelope) {
  auto ctx = ctx_bits(128);
  auto e = LGExpansion::for_weight(LGBranch::oscillatory, 15, 1);
  for (const char* s : {"0.1", "0.5", "1.5"}) {
    Real xi(s);
    auto zj = z_j(xi, e, ctx);
    EXPECT_LE(abs(recessive_solution_j(xi, 15, ctx) - zj.value), zj.envelope.bound) << s;
  }
}

TEST(ApproxPhi, FirstOrderImproves) {
  auto ctx = ctx_bits(128);
  for (long k : {20L, 40L})
    for (const char* s : {"0.3", "0.9", "1.7"}) {
      Real x = sqr(cos(sqrt(Real(s))));
      Real ex = phi_k(x, k, ctx);
      Real e0 = abs(approx_phi(x, k, 0, ctx).value - ex);
      Real e1 = abs(approx_phi(x, k, 1, ctx).value - ex);
      EXPECT_LT(e1, e0) << k << " " << s;
    }
}

TEST(ApproxPsi, WithinEnvelopeAndDecayProfile) {
  auto ctx = ctx_bits(128);
  auto ap = approx_psi(Real(0.5), 20, 1, ctx);
  Real ex = psi_k(Real(0.5), 20, ctx);
  EXPECT_LE(abs(ap.value - ex), ap.envelope.bound);
  // Toward x -> 0 the ratio exact/approx stays near 1 while both decay like e^{-u sqrt xi}.
  for (const char* s : {"1e-3", "1e-6", "1e-10"}) {
    Real x(s);
    double r = (psi_k(x, 20, ctx) / approx_psi(x, 20, 1, ctx).value).to_double();
    EXPECT_NEAR(r, 1.0, 1e-4) << s;
  }
}

TEST(ApproxPsi, ZerothOrderErrorScalesInverse) {
  auto ctx = ctx_bits(128);
  Real x(0.5);
  double e10 = abs(approx_psi(x, 10, 0, ctx).value - psi_k(x, 10, ctx)).to_double() / psi_k(x, 10, ctx).to_double();
  double e40 = abs(approx_psi(x, 40, 0, ctx).value - psi_k(x, 40, ctx)).to_double() / psi_k(x, 40, ctx).to_double();
  double slope = std::log(e40 / e10) / std::log(39.5 / 9.5);
  EXPECT_NEAR(slope, -1.0, 0.35);
}

TEST(ErrorOrderTable, SlopesAndEnvelopes) {
  auto ctx = ctx_bits(128);
  for (auto b : {LGBranch::oscillatory, LGBranch::exponential})
    for (int N : {0, 1}) {
      auto t = error_order_table(b, {1.0}, {10, 20, 40, 80}, N, ctx);
      ASSERT_EQ(t.rows.size(), 1u);
      EXPECT_NEAR(t.rows[0].slope, -(2.0 * N + 1), 0.35) << branch_name(b) << " N=" << N;
      EXPECT_TRUE(t.rows[0].envelope_ok);
      EXPECT_FALSE(t.rows[0].precision_limited);
      EXPECT_EQ(t.rows[0].points.size(), 4u);
    }
  EXPECT_THROW(error_order_table(LGBranch::oscillatory, {1.0}, {10, 20, 40}, 1, ctx), std::invalid_argument);
  EXPECT_THROW(error_order_table(LGBranch::oscillatory, {1.0}, {10, 12, 14, 16}, 1, ctx), std::invalid_argument);
}

TEST(ErrorOrderTable, LowPrecisionIsReported) {
  // 30 bits without guard cannot resolve the N = 1 differences (relative 1e-7 and below).
  auto ctx = ctx_bits(30);
  ctx.guard_bits = 0;
  auto t = error_order_table(LGBranch::exponential, {1.0}, {10, 20, 40, 80}, 1, ctx);
  EXPECT_TRUE(t.rows[0].precision_limited);
}
