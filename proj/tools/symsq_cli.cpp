#include <fstream>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "symsq/arith.hpp"
#include "symsq/cli.hpp"
#include "symsq/kb.hpp"
#include "symsq/lg.hpp"
#include "symsq/moment.hpp"
#include "symsq/zeta.hpp"

using namespace symsq;
using namespace symsq::cli;

namespace {

struct Report {
  Json json;
  std::string csv;
  bool ok = true;
};

Json header(const char* kind, const RunConfig& cfg) {
  Json j;
  j["report"] = kind;
  j["precision_bits"] = cfg.precision_bits;
  j["tol"] = fmt(cfg.tol, 64);
  return j;
}

Report run_exact(const RunConfig& cfg, long l, long two_k) {
  auto ctx = cfg.context();
  auto b = exact_moment_critical(l, two_k, cfg.tol, ctx);
  long p = cfg.precision_bits;
  Report r;
  r.json = header("exact", cfg);
  r.json["l"] = l;
  r.json["two_k"] = two_k;
  r.json["main_term"] = fmt(b.main_term, p);
  r.json["delta_term"] = fmt(b.delta_term, p);
  r.json["finite_sum"] = fmt(b.finite_sum, p);
  r.json["tail_sum"] = fmt(b.tail_sum, p);
  r.json["tail_cutoff"] = b.tail_cutoff;
  r.json["tail_bound"] = fmt(b.tail_bound, 64);
  r.json["total"] = fmt(b.total, p);
  r.csv = csv({"l", "two_k", "main_term", "delta_term", "finite_sum", "tail_sum", "tail_cutoff", "tail_bound", "total"},
              {{std::to_string(l), std::to_string(two_k), fmt(b.main_term, p), fmt(b.delta_term, p), fmt(b.finite_sum, p),
                fmt(b.tail_sum, p), std::to_string(b.tail_cutoff), fmt(b.tail_bound, 64), fmt(b.total, p)}});
  return r;
}

Report run_shifted(const RunConfig& cfg, long l, double s, long two_k) {
  if (s < -5 || s > 5) throw std::invalid_argument("--s must lie in [-5, 5]");
  auto v = shifted_moment(l, s, two_k, cfg.tol, cfg.context());
  long p = cfg.precision_bits;
  Report r;
  r.json = header("shifted", cfg);
  r.json["l"] = l;
  r.json["s"] = fmt(s, 64);
  r.json["two_k"] = two_k;
  r.json["value"] = fmt(v.value, p);
  r.json["cutoff"] = v.cutoff;
  r.json["tail_estimate"] = fmt(v.tail_estimate, 64);
  r.csv = csv({"l", "s", "two_k", "value", "cutoff", "tail_estimate"},
              {{std::to_string(l), fmt(s, 64), std::to_string(two_k), fmt(v.value, p), std::to_string(v.cutoff),
                fmt(v.tail_estimate, 64)}});
  return r;
}

Report run_kb(const RunConfig& cfg, long l, double s, long two_k, double agree) {
  auto m = shifted_moment(l, s, two_k, std::max(cfg.tol, 1e-12), cfg.context());
  auto kb = kloosterman_bessel_side(l, s, two_k, cfg.q_max, cfg.n_max);
  double diff = std::fabs(m.value.to_double() - kb.value);
  long p = cfg.precision_bits;
  Report r;
  r.ok = diff < agree;
  r.json = header("kb-check", cfg);
  r.json["l"] = l;
  r.json["s"] = fmt(s, 64);
  r.json["two_k"] = two_k;
  r.json["q_max"] = cfg.q_max;
  r.json["n_max"] = cfg.n_max;
  r.json["shifted"] = fmt(m.value, p);
  r.json["kloosterman_bessel"] = fmt(kb.value, p);
  r.json["difference"] = fmt(diff, 64);
  r.json["n_tail_estimate"] = fmt(kb.n_tail_estimate, 64);
  r.json["q_tail_estimate"] = fmt(kb.q_tail_estimate, 64);
  r.json["agree"] = fmt(agree, 64);
  r.json["pass"] = r.ok;
  r.csv = csv({"l", "s", "two_k", "q_max", "n_max", "shifted", "kloosterman_bessel", "difference", "n_tail_estimate",
               "q_tail_estimate", "pass"},
              {{std::to_string(l), fmt(s, 64), std::to_string(two_k), std::to_string(cfg.q_max), std::to_string(cfg.n_max),
                fmt(m.value, p), fmt(kb.value, p), fmt(diff, 64), fmt(kb.n_tail_estimate, 64),
                fmt(kb.q_tail_estimate, 64), r.ok ? "true" : "false"}});
  return r;
}

Report run_spectral(const RunConfig& cfg, long l, long two_k) {
  auto ctx = cfg.context();
  double tol = std::max(cfg.tol, 1e-14);
  auto sp = spectral_moment_dim1(l, two_k, tol, ctx);
  auto b = exact_moment_critical(l, two_k, tol, ctx);
  Real rel;
  {
    WorkingPrecision wp(ctx.internal_bits());
    rel = abs((sp.value - b.total) / b.total);
  }
  long p = cfg.precision_bits;
  Report r;
  r.json = header("spectral", cfg);
  r.json["l"] = l;
  r.json["two_k"] = two_k;
  r.json["omega"] = fmt(sp.omega, p);
  r.json["lambda_l2"] = fmt(sp.lambda_l2, p);
  r.json["sym2_central"] = fmt(sp.sym2, p);
  r.json["afe_terms"] = sp.afe_terms;
  r.json["spectral"] = fmt(sp.value, p);
  r.json["exact"] = fmt(b.total, p);
  r.json["relative_difference"] = fmt(rel, 64);
  r.csv = csv({"l", "two_k", "omega", "lambda_l2", "sym2_central", "spectral", "exact", "relative_difference"},
              {{std::to_string(l), std::to_string(two_k), fmt(sp.omega, p), fmt(sp.lambda_l2, p), fmt(sp.sym2, p),
                fmt(sp.value, p), fmt(b.total, p), fmt(rel, 64)}});
  return r;
}

Report run_lg_table(const RunConfig& cfg, const std::string& branch, const std::vector<long>& Ns,
                    const std::vector<long>& ks, const std::string& xi_osc, const std::string& xi_exp) {
  std::vector<LGBranch> branches;
  if (branch == "oscillatory" || branch == "both") branches.push_back(LGBranch::oscillatory);
  if (branch == "exponential" || branch == "both") branches.push_back(LGBranch::exponential);
  if (branches.empty()) throw std::invalid_argument("--branch must be oscillatory, exponential or both");
  auto ctx = cfg.context();
  long p = cfg.precision_bits;
  Report r;
  r.json = header("lg-table", cfg);
  r.json["rows"] = Json::array();
  std::vector<std::vector<std::string>> rows;
  for (auto b : branches) {
    auto xis = parse_double_range(b == LGBranch::oscillatory ? xi_osc : xi_exp);
    for (long N : Ns) {
      if (N != 0 && N != 1) throw std::invalid_argument("--N entries must be 0 or 1");
      for (long k : ks) {
        if (k < 6) throw std::invalid_argument("--k entries must be >= 6");
        for (double xi : xis) {
          auto pt = lg_table_point(b, Real(xi), k, static_cast<int>(N), ctx);
          std::vector<std::string> cells{b == LGBranch::oscillatory ? "oscillatory" : "exponential",
                                         std::to_string(k), fmt(pt.u, 64), std::to_string(N), fmt(xi, 64),
                                         fmt(pt.exact, p), fmt(pt.approx, p), fmt(pt.abs_err, 64),
                                         fmt(pt.envelope, 64)};
          Json j;
          const char* keys[] = {"branch", "k", "u", "N", "xi", "exact", "approx", "abs_err", "envelope"};
          for (std::size_t i = 0; i < cells.size(); ++i) j[keys[i]] = cells[i];
          j["k"] = k;
          j["N"] = N;
          r.json["rows"].push_back(j);
          rows.push_back(std::move(cells));
        }
      }
    }
  }
  r.csv = csv({"branch", "k", "u", "N", "xi", "exact", "approx", "abs_err", "envelope"}, rows);
  return r;
}

Report run_scan(const RunConfig& cfg, const std::vector<long>& ls, const std::vector<long>& ks) {
  for (long k : ks)
    if (k < 6) throw std::invalid_argument("--k entries must be >= 6 (weight 2k >= 12)");
  auto t = error_term_scan(ls, ks, std::max(cfg.tol, 1e-12), cfg.context());
  long p = cfg.precision_bits;
  Report r;
  r.json = header("scan-error", cfg);
  r.json["rows"] = Json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : t.rows) {
    std::vector<std::string> cells{std::to_string(row.l), std::to_string(row.k), fmt(row.E1, p), fmt(row.E2, p),
                                   fmt(row.main_term, p), fmt(row.total, p)};
    Json j;
    j["l"] = row.l;
    j["k"] = row.k;
    j["E1"] = cells[2];
    j["E2"] = cells[3];
    j["main_term"] = cells[4];
    j["total"] = cells[5];
    r.json["rows"].push_back(j);
    rows.push_back(std::move(cells));
  }
  r.json["fits"] = Json::array();
  for (const auto& f : t.fits) {
    Json j;
    j["l"] = f.l;
    j["e1_slope_vs_log_k"] = fmt(f.e1_slope, 64);
    j["e1_residual"] = fmt(f.e1_residual, 64);
    j["e2_slope_vs_k"] = fmt(f.e2_slope, 64);
    j["e2_residual"] = fmt(f.e2_residual, 64);
    r.json["fits"].push_back(j);
  }
  r.csv = csv({"l", "k", "E1", "E2", "main_term", "total"}, rows);
  return r;
}

// Quick invariant checks for every module.
Report run_selftest(const RunConfig& cfg) {
  auto ctx = cfg.context();
  long bits = cfg.precision_bits;
  std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"arithmetic: rho multiplicative, twisted rows exact",
       [] {
         for (i64 q1 = 1; q1 <= 12; ++q1)
           for (i64 q2 = 1; q2 <= 12; ++q2)
             if (std::gcd(q1, q2) == 1)
               for (i64 n = -40; n <= 40; ++n)
                 if (rho(q1 * q2, n) != rho(q1, n) * rho(q2, n)) return false;
         for (i64 q = 1; q <= 40; ++q)
           for (i64 l = 1; l <= 3; ++l)
             for (i64 n = 0; n <= 10; ++n) twisted_kloosterman_row(l, n, q, true);
         return true;
       }},
      {"special functions: zeta(2) = pi^2/6, Lerch functional equation",
       [&] {
         WorkingPrecision wp(ctx.internal_bits());
         Real z = riemann_zeta(Real(2), ctx), e = sqr(const_pi()) / 6;
         if (log2_abs(z - e) > -static_cast<double>(bits) + 8) return false;
         Real s(0.7);
         return log2_abs(lerch_pair(1, 3, s, ctx).fe_residual(s, ctx)) < -static_cast<double>(bits) + 12;
       }},
      {"quadratic L-series: completed functional equation",
       [&] {
         WorkingPrecision wp(ctx.internal_bits());
         for (i64 n : {-4, 5, 12}) {
           Real a = completed_script_l(n, Real(0.3), ctx), b = completed_script_l(n, 1 - Real(0.3), ctx);
           if (log2_abs(a - b) > -static_cast<double>(bits) + 12) return false;
         }
         return true;
       }},
      {"Phi/Psi: closed form vs contour quadrature",
       [&] {
         WorkingPrecision wp(ctx.internal_bits());
         for (double x : {3.0, 1.2}) {
           double c = mellin_barnes_closed(Real(x), Real(1.7), 6, ctx).to_double();
           if (std::fabs(c - mellin_barnes_I(x, 1.7, 6).value) > 1e-8) return false;
         }
         return true;
       }},
      {"Liouville-Green: connection constants",
       [&] {
         auto c = connection_constants_phi(20, ctx);
         auto ck = connection_constant_psi(20, ctx);
         WorkingPrecision wp(ctx.internal_bits());
         return std::fabs((c.C_Y - 1).to_double()) <= 5.0 / 20 && std::fabs(c.C_J.to_double()) <= 5.0 / 400 &&
                std::fabs((ck - 2).to_double()) <= 10.0 / 20;
       }},
      {"moment: exact vs spectral (l=1, 2k=12), exact vs s->1/2 limit",
       [&] {
         auto b = exact_moment_critical(1, 12, 1e-12, ctx);
         auto sp = spectral_moment_dim1(1, 12, 1e-12, ctx);
         auto lim = shifted_moment_critical_limit(1, 12, 1e-12, ctx);
         WorkingPrecision wp(ctx.internal_bits());
         return std::fabs(((b.total - sp.value) / b.total).to_double()) < 1e-8 &&
                std::fabs((lim.value - b.total).to_double()) < 1e-5;
       }},
  };
  Report r;
  r.json = header("selftest", cfg);
  r.json["checks"] = Json::array();
  std::vector<std::vector<std::string>> rows;
  for (auto& [name, fn] : checks) {
    bool ok = false;
    std::string err;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      err = e.what();
    }
    r.ok = r.ok && ok;
    Json j;
    j["check"] = name;
    j["pass"] = ok;
    if (!err.empty()) j["error"] = err;
    r.json["checks"].push_back(j);
    rows.push_back({"\"" + name + "\"", ok ? "PASS" : "FAIL"});
  }
  r.csv = csv({"check", "result"}, rows);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification harness for the first moment of symmetric-square L-functions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format;
  long bits = 0;
  double tol = 0;
  bool as_json = false;
  auto* o_config = app.add_option("--config", config_path, "key = value configuration file");
  auto* o_bits = app.add_option("--precision-bits", bits, "working precision in bits (>= 64)");
  auto* o_tol = app.add_option("--tol", tol, "target tolerance");
  auto* o_format = app.add_option("--format", format, "csv or json");
  app.add_flag("--json", as_json, "shorthand for --format json");
  app.add_option("--out", out_path, "write the report to FILE instead of stdout");
  (void)o_config;

  long l = 1, two_k = 12, q_max = 0, n_max = 0;
  double s = 0, agree = 1e-9;
  std::string branch = "both", n_list = "0,1", k_list, xi_osc = "0.4,0.8,1.2,1.6", xi_exp = "0.25,1,4", l_list = "1,5,10";

  auto* c_exact = app.add_subcommand("exact", "critical value M_1(l, 1/2) with its breakdown");
  c_exact->add_option("--l", l)->check(CLI::PositiveNumber);
  c_exact->add_option("--weight", two_k, "weight 2k");

  auto* c_shifted = app.add_subcommand("shifted", "shifted moment M_1(l, s)");
  c_shifted->add_option("--l", l)->check(CLI::PositiveNumber);
  c_shifted->add_option("--s", s)->required();
  c_shifted->add_option("--weight", two_k);

  auto* c_kb = app.add_subcommand("kb-check", "shifted moment against the Kloosterman-Bessel side");
  c_kb->add_option("--l", l)->check(CLI::PositiveNumber);
  c_kb->add_option("--s", s)->required();
  c_kb->add_option("--weight", two_k);
  auto* o_q = c_kb->add_option("--q-max", q_max);
  auto* o_n = c_kb->add_option("--n-max", n_max);
  c_kb->add_option("--agree", agree, "required agreement (default 1e-9)");

  auto* c_spec = app.add_subcommand("spectral", "omega * lambda(l^2) * L(sym^2 f, 1/2) against the exact formula");
  c_spec->add_option("--l", l)->check(CLI::PositiveNumber);
  c_spec->add_option("--weight", two_k);

  auto* c_lg = app.add_subcommand("lg-table", "Liouville-Green approximations against Phi_k / Psi_k");
  c_lg->add_option("--branch", branch, "oscillatory, exponential or both");
  c_lg->add_option("--N", n_list, "orders, e.g. 0,1");
  auto* o_lgk = c_lg->add_option("--k", k_list, "k values, start:stop:step or list (default 10,20,40,80,160)");
  c_lg->add_option("--xi-osc", xi_osc);
  c_lg->add_option("--xi-exp", xi_exp);

  auto* c_scan = app.add_subcommand("scan-error", "E1 / E2 error terms over an (l, k) grid");
  c_scan->add_option("--l", l_list, "l values, start:stop:step or list");
  auto* o_sk = c_scan->add_option("--k", k_list, "k values (default 10:100:10)");

  auto* c_self = app.add_subcommand("selftest", "invariant checks for every module");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgument;
  }

  RunConfig cfg;
  Report rep;
  try {
    cfg = default_config();
    if (!config_path.empty()) cfg = read_config(config_path, cfg);
    if (o_bits->count()) cfg.precision_bits = bits;
    if (o_tol->count()) cfg.tol = tol;
    if (o_format->count()) cfg.format = format;
    if (as_json) cfg.format = "json";
    if (o_q->count()) cfg.q_max = q_max;
    if (o_n->count()) cfg.n_max = n_max;
    cfg.validate();

    if (*c_exact) rep = run_exact(cfg, l, two_k);
    else if (*c_shifted) rep = run_shifted(cfg, l, s, two_k);
    else if (*c_kb) rep = run_kb(cfg, l, s, two_k, agree);
    else if (*c_spec) rep = run_spectral(cfg, l, two_k);
    else if (*c_lg) rep = run_lg_table(cfg, branch, parse_long_range(n_list),
                                       parse_long_range(o_lgk->count() ? k_list : "10,20,40,80,160"), xi_osc, xi_exp);
    else if (*c_scan) rep = run_scan(cfg, parse_long_range(l_list), parse_long_range(o_sk->count() ? k_list : "10:100:10"));
    else if (*c_self) rep = run_selftest(cfg);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  }

  std::string text = cfg.format == "json" ? dump(rep.json) : rep.csv;
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kExitArgument;
    }
    f << text;
  }
  return rep.ok ? kExitOk : kExitTolerance;
}
