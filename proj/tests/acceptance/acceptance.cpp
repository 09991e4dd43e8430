// Acceptance run: one PASS/FAIL line per criterion, with measured figures and runtime.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "symsq/arith.hpp"
#include "symsq/kb.hpp"
#include "symsq/lg.hpp"
#include "symsq/lseries.hpp"
#include "symsq/moment.hpp"
#include "symsq/phipsi.hpp"
#include "symsq/zeta.hpp"

using namespace symsq;

namespace {

int failures = 0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = dt < limit_s;
  bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s %2d %s: %s [%.1f s, limit %.0f s%s]\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt, limit_s,
              in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// log2 of a residual, "exact" when the two sides round to the same value.
std::string show_log2(double v) { return v < -1e8 ? "exact" : fmt("%.1f", v); }

double rel_log2(const Real& a, const Real& b) { return log2_abs((a - b) / b); }

std::string run_cli(const std::string& args, int& code) {
  std::string cmd = std::string(SYMSQ_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    code = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int st = pclose(p);
  code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  auto ctx192 = PrecisionContext::with_bits(192);
  auto ctx128 = PrecisionContext::with_bits(128);

  criterion(1, "Mellin-Barnes contour vs closed forms", 60, [&] {
    WorkingPrecision wp(ctx128.internal_bits());
    double worst = 0;
    for (double x : {3.0, 1.2, 2 + 1e-4, 2 - 1e-4}) {
      auto q = mellin_barnes_I(x, 1.7, 6);
      double closed = mellin_barnes_closed(Real(x), Real(1.7), 6, ctx128).to_double();
      worst = std::max(worst, std::fabs(q.value - closed));
    }
    return Outcome{worst < 1e-8, fmt("max |I - closed| = %.2e (tol 1e-8)", worst)};
  });

  criterion(2, "shifted moment vs Kloosterman-Bessel side", 600, [&] {
    double worst = 0, worst_tail = 0;
    std::string where;
    for (long two_k : {12L, 16L})
      for (long l : {1L, 2L, 3L}) {
        auto rows = kloosterman_bessel_rows(l, two_k, 4000, 2000);
        for (double s : {1.6, 1.8, 2.2}) {
          double a = shifted_moment(l, s, two_k, 1e-13, ctx128).value.to_double();
          auto kb = kloosterman_bessel_side(rows, s);
          double d = std::fabs(a - kb.value);
          if (d > worst) {
            worst = d;
            worst_tail = kb.n_tail_estimate + kb.q_tail_estimate;
            where = fmt("l=%ld s=%.1f 2k=%ld", l, s, two_k);
          }
        }
      }
    return Outcome{worst < 1e-9, fmt("max |diff| = %.2e at %s, cutoff tail estimate %.2e (tol 1e-9)", worst,
                                     where.c_str(), worst_tail)};
  });

  criterion(3, "exact critical moment vs spectral side", 600, [&] {
    double worst = 0;
    for (long two_k : {12L, 16L, 18L, 20L, 22L, 26L})
      for (long l : {1L, 2L}) {
        WorkingPrecision wp(ctx128.internal_bits());
        Real e = exact_moment_critical(l, two_k, 1e-13, ctx128).total;
        Real sp = spectral_moment_dim1(l, two_k, 1e-13, ctx128).value;
        worst = std::max(worst, std::fabs(((e - sp) / sp).to_double()));
      }
    return Outcome{worst < 1e-8, fmt("max relative difference = %.2e (tol 1e-8)", worst)};
  });

  criterion(4, "twisted Kloosterman rows: exponential sum = closed form", 60, [&] {
    long checked = 0, bad = 0;
    double worst = 0;
    for (i64 l = 1; l <= 5; ++l)
      for (i64 q = 1; q <= 200; ++q) {
        auto row = kloosterman_row_double(l * l, q);
        for (i64 n = 0; n <= 20; ++n) {
          double direct = twisted_kloosterman_sum(row, n, q);
          i64 closed = twisted_kloosterman_closed(l, n, q);
          worst = std::max(worst, std::fabs(direct - static_cast<double>(closed)));
          if (std::llround(direct) != closed) ++bad;
          ++checked;
        }
      }
    return Outcome{bad == 0, fmt("%ld of %ld entries differ after rounding, max |sum - closed| = %.2e", bad, checked,
                                 worst)};
  });

  criterion(5, "functional equations at 192 bits", 60, [&] {
    long bits = ctx192.bits;
    WorkingPrecision wp(bits + 64);
    double lerch = -1e9, lstar = -1e9;
    for (auto [a, q] : std::vector<std::pair<long, long>>{{1, 3}, {1, 4}, {2, 5}})
      for (double s : {-0.3, 0.25, 0.7, 2.5}) {
        Real sr(s);
        lerch = std::max(lerch, log2_abs(lerch_pair(a, q, sr, ctx192).fe_residual(sr, ctx192)));
      }
    for (i64 n : {-4L, -12L, 5L, 12L, 45L})
      for (double s : {0.3, 0.7, 0.9}) {
        Real sr(s);
        lstar = std::max(lstar, log2_abs(completed_script_l(n, sr, ctx192) - completed_script_l(n, 1 - sr, ctx192)));
      }
    double lim = -static_cast<double>(bits) + 12;
    return Outcome{lerch < lim && lstar < lim,
                   "log2 max residual: Lerch " + show_log2(lerch) + ", completed L " + show_log2(lstar) +
                       fmt(" (limit %.0f)", lim)};
  });

  criterion(6, "hypergeometric value and derivative at 1/2", 60, [&] {
    long bits = ctx192.bits;
    WorkingPrecision wp(320);
    Real h = Real(1) / 2, c = 1 / sqrt(2 * const_pi());
    double wv = -1e9, wd = -1e9;
    for (long k = 6; k <= 40; ++k) {
      Real kr(k);
      Real ratio = exp(log_gamma(kr - 0.25, PrecisionContext::with_bits(320)) -
                       log_gamma(kr + 0.25, PrecisionContext::with_bits(320)));
      Real sgn = (k % 2) ? Real(1) : Real(-1);
      wv = std::max(wv, rel_log2(legendre_g(h, k, ctx192), sgn * c * ratio));
      wd = std::max(wd, rel_log2(legendre_g_derivative(h, k, ctx192), -4 * sgn * c / ratio));
    }
    double lim = -static_cast<double>(bits) + 8;
    return Outcome{wv < lim && wd < lim,
                   fmt("log2 max relative error: value %.1f, derivative %.1f (limit %.0f)", wv, wd, lim)};
  });

  criterion(7, "Liouville-Green error orders and envelopes", 900, [&] {
    bool ok = true;
    std::string d;
    const std::vector<long> ks{10, 20, 40, 80, 160};
    for (auto b : {LGBranch::oscillatory, LGBranch::exponential})
      for (int N : {0, 1}) {
        std::vector<double> xis = b == LGBranch::oscillatory ? std::vector<double>{0.4, 0.8, 1.2, 1.6}
                                                              : std::vector<double>{0.25, 1, 4};
        auto t = error_order_table(b, xis, ks, N, ctx192);
        double lo = 1e9, hi = -1e9, ratio = 0;
        bool env = true, lim = false;
        for (const auto& r : t.rows) {
          lo = std::min(lo, r.slope);
          hi = std::max(hi, r.slope);
          env = env && r.envelope_ok;
          lim = lim || r.precision_limited;
          for (const auto& p : r.points) ratio = std::max(ratio, p.envelope_ratio);
          if (std::fabs(r.slope + (2.0 * N + 1)) > 0.35) ok = false;
        }
        ok = ok && env && !lim;
        d += fmt("%s%s N=%d slopes [%.3f, %.3f] err/envelope <= %.2f%s", d.empty() ? "" : "; ", branch_name(b), N, lo,
                 hi, ratio, lim ? " precision-limited" : "");
      }
    return Outcome{ok, d};
  });

  criterion(8, "connection constants", 120, [&] {
    double wy = 0, wj = 0, wk = 0;
    for (long k = 10; k <= 160; ++k) {
      auto c = connection_constants_phi(k, ctx128);
      double kd = static_cast<double>(k);
      wy = std::max(wy, std::fabs(c.C_Y.to_double() - 1) * kd / 5);
      wj = std::max(wj, std::fabs(c.C_J.to_double()) * kd * kd / 5);
      wk = std::max(wk, std::fabs(connection_constant_psi(k, ctx128).to_double() - 2) * kd / 10);
    }
    return Outcome{wy <= 1 && wj <= 1 && wk <= 1,
                   fmt("max fraction of allowance used: C_Y %.1e, C_J %.1e, C_K %.1e", wy, wj, wk)};
  });

  criterion(9, "asymptotic corollaries", 1200, [&] {
    // l = 1: exponential decay of exact - main terms in k.
    std::vector<double> ks, logs;
    double tol = 1e-12;
    bool decreasing = true;
    for (long two_k = 12; two_k <= 60; two_k += 2) {
      WorkingPrecision wp(ctx192.internal_bits());
      Real e = exact_moment_critical(1, two_k, tol, ctx192).total;
      double d = std::fabs((e - asymptotic_main_terms(1, two_k, ctx192)).to_double());
      if (!logs.empty() && !(std::log(d) < logs.back())) decreasing = false;
      ks.push_back(static_cast<double>(two_k / 2));
      logs.push_back(std::log(d));
      tol = std::max(1e-8 * d, 1e-45);
    }
    auto fit = detail::fit_line(ks, logs);
    double curv = 0;
    for (std::size_t i = 1; i + 1 < logs.size(); ++i)
      curv = std::max(curv, std::fabs(logs[i + 1] - 2 * logs[i] + logs[i - 1]));
    bool linear = fit.residual < 0.05 * std::fabs(fit.slope) && curv < 0.1;
    std::string d = fmt("l=1: %s, log-slope %.3f per unit k, rms %.3f, max |2nd diff| %.3f",
                        decreasing ? "decreasing" : "NOT decreasing", fit.slope, fit.residual, curv);
    bool ok = decreasing && linear;
    // l > 1: frozen envelope and the k-slope of |exact - main|.
    std::vector<long> kk;
    for (long k = 10; k <= 100; k += 10) kk.push_back(k);
    for (long l : {5L, 10L, 20L}) {
      std::vector<double> x, y;
      double worst = 0;
      for (long k : kk) {
        WorkingPrecision wp(ctx128.internal_bits());
        Real e = exact_moment_critical(l, 2 * k, 1e-10, ctx128).total;
        double diff = std::fabs((e - asymptotic_main_terms(l, 2 * k, ctx128)).to_double());
        double env = kOffDiagonalEnvelope * std::pow(static_cast<double>(l), 5.0 / 6 + 0.05) / std::sqrt(k);
        worst = std::max(worst, diff / env);
        x.push_back(std::log(static_cast<double>(k)));
        y.push_back(std::log(diff));
      }
      auto f = detail::fit_line(x, y);
      bool slope_ok = std::fabs(f.slope + 0.5) <= 0.2;
      ok = ok && worst <= 1 && slope_ok;
      d += fmt("; l=%ld: diff/envelope <= %.2f, k-slope %.3f (rms %.2f)", l, worst, f.slope, f.residual);
    }
    return Outcome{ok, d + " (slope target -0.5 +- 0.2)"};
  });

  criterion(10, "determinism and schema", 60, [&] {
    bool ok = true;
    std::string d;
    for (const char* args : {"exact --l 2 --weight 16 --precision-bits 96 --json",
                             "lg-table --branch both --N 0,1 --k 10,20 --xi-osc 0.8 --xi-exp 1 --precision-bits 64"}) {
      int c1 = 0, c2 = 0;
      auto a = run_cli(args, c1), b = run_cli(args, c2);
      if (c1 != 0 || c2 != 0 || a != b || a.empty()) {
        ok = false;
        d += fmt("rerun mismatch for '%s'; ", args);
      }
    }
    std::string golden = std::string(SYMSQ_GOLDEN_DIR);
    int c = 0;
    auto lg = run_cli("lg-table --branch exponential --N 1 --k 10 --xi-exp 1 --precision-bits 64", c);
    auto header = [](const std::string& s) { return s.substr(0, s.find('\n') + 1); };
    if (c != 0 || header(lg) != slurp(golden + "/lg_table_header.csv")) {
      ok = false;
      d += "lg-table header differs from golden; ";
    }
    auto sc = run_cli("scan-error --l 1 --k 6,7,8 --precision-bits 64", c);
    if (c != 0 || header(sc) != slurp(golden + "/scan_error_header.csv")) {
      ok = false;
      d += "scan-error header differs from golden; ";
    }
    auto tb = run_cli("lg-table --branch both --N 0,1 --k 10,20 --xi-osc 0.8 --xi-exp 1 --precision-bits 64", c);
    if (tb != slurp(golden + "/lg_table_small.csv")) {
      ok = false;
      d += "golden table differs; ";
    }
    return Outcome{ok, ok ? "byte-identical reruns, golden headers and table match" : d};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
