#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "symsq/cli.hpp"

using namespace symsq::cli;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded unless `keep_err`.
RunResult run(const std::string& args, bool keep_err = false, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + SYMSQ_CLI_PATH + std::string(" ") + args + (keep_err ? " 2>&1" : " 2>/dev/null");
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n') + 1); }

std::string temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("symsq_cli_" + name);
  std::ofstream(p) << content;
  return p.string();
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  auto path = temp_file("empty.cfg", "");
  RunConfig base;
  auto c = read_config(path, base);
  EXPECT_EQ(c.precision_bits, 192);
  EXPECT_EQ(c.tol, 1e-10);
  EXPECT_EQ(c.format, "csv");
}

TEST(Config, KeysCommentsAndOverlay) {
  RunConfig c;
  apply_config_text(c, "# comment\n\nprecision_bits = 256\n tol=1e-12 \nq_max = 100\nformat = json\n", "t");
  EXPECT_EQ(c.precision_bits, 256);
  EXPECT_EQ(c.tol, 1e-12);
  EXPECT_EQ(c.q_max, 100);
  EXPECT_EQ(c.format, "json");
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectionsCarryLineNumbers) {
  auto expect_msg = [](const std::string& text, const std::string& fragment) {
    RunConfig c;
    try {
      apply_config_text(c, text, "cfg");
      ADD_FAILURE() << "no error for: " << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_msg("precision_bits = 32\n", "cfg:1");
  expect_msg("tol = 1e-8\nbogus = 1\n", "cfg:2: unknown key 'bogus'");
  expect_msg("\n\nq_max = ten\n", "cfg:3");
  expect_msg("precision_bits\n", "cfg:1: expected 'key = value'");
  expect_msg("format = xml\n", "cfg:1");
  RunConfig c;
  c.precision_bits = 64;
  c.tol = 1e-40;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, RangeSyntax) {
  EXPECT_EQ(parse_long_range("10:30:10"), (std::vector<long>{10, 20, 30}));
  EXPECT_EQ(parse_long_range("6,8:12:2"), (std::vector<long>{6, 8, 10, 12}));
  EXPECT_EQ(parse_double_range("0.5:1.5:0.5").size(), 3u);
  EXPECT_THROW(parse_long_range("10:5:1"), ConfigError);
  EXPECT_THROW(parse_long_range("1:2"), ConfigError);
  EXPECT_THROW(parse_long_range("a"), ConfigError);
}

TEST(Config, DigitsFollowPrecision) {
  EXPECT_EQ(output_digits(192), 57);
  EXPECT_EQ(output_digits(64), 19);
}

TEST(Cli, GoldenHeaders) {
  auto lg = run("lg-table --branch exponential --N 1 --k 10 --xi-exp 1 --precision-bits 64");
  ASSERT_EQ(lg.code, 0);
  EXPECT_EQ(first_line(lg.out), slurp(std::string(SYMSQ_GOLDEN_DIR) + "/lg_table_header.csv"));
  auto sc = run("scan-error --l 1 --k 6,7,8 --precision-bits 64");
  ASSERT_EQ(sc.code, 0);
  EXPECT_EQ(first_line(sc.out), slurp(std::string(SYMSQ_GOLDEN_DIR) + "/scan_error_header.csv"));
}

TEST(Cli, GoldenTableIsReproduced) {
  auto r = run("lg-table --branch both --N 0,1 --k 10,20 --xi-osc 0.8 --xi-exp 1 --precision-bits 64");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(std::string(SYMSQ_GOLDEN_DIR) + "/lg_table_small.csv"));
}

TEST(Cli, ExactJsonSchemaAndRoundTrip) {
  auto r = run("exact --l 1 --weight 12 --json --precision-bits 128");
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  for (const char* key : {"main_term", "delta_term", "finite_sum", "tail_sum", "total", "tail_bound"}) {
    ASSERT_TRUE(j.contains(key)) << key;
    EXPECT_TRUE(j[key].is_string()) << key;
  }
  EXPECT_EQ(dump(j), r.out);
  // decimal strings parse back to the same value at the output digit count
  symsq::WorkingPrecision wp(128);
  std::string total = j["total"];
  EXPECT_EQ(symsq::Real(total).to_string(output_digits(128)), total);
  EXPECT_NEAR(std::stod(total), 1.4359055079689, 1e-12);
}

TEST(Cli, ScanJsonRoundTrip) {
  auto r = run("scan-error --l 1 --k 6,7,8 --precision-bits 64 --format json");
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_EQ(dump(j), r.out);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(j["fits"].size(), 1u);
}

TEST(Cli, DeterministicReruns) {
  for (const char* args : {"exact --l 2 --weight 16 --precision-bits 96", "lg-table --branch oscillatory --N 1 --k 10 --xi-osc 1.2"}) {
    auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << args;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, OutFileAndConfigFile) {
  auto out = (std::filesystem::temp_directory_path() / "symsq_cli_out.csv").string();
  std::filesystem::remove(out);
  auto cfg = temp_file("run.cfg", "precision_bits = 64\nformat = json\n");
  auto r = run("exact --l 1 --weight 12 --config " + cfg + " --out " + out);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  auto j = Json::parse(slurp(out));
  EXPECT_EQ(j["precision_bits"], 64);
  // flags win over the file
  auto r2 = run("exact --l 1 --weight 12 --config " + cfg + " --format csv");
  EXPECT_EQ(first_line(r2.out).substr(0, 8), "l,two_k,");
}

TEST(Cli, EnvironmentSetsDefaultPrecision) {
  auto r = run("exact --l 1 --weight 12 --json", false, std::string(kPrecisionEnv) + "=80");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out)["precision_bits"], 80);
  auto r2 = run("exact --l 1 --weight 12 --json --precision-bits 96", false, std::string(kPrecisionEnv) + "=80");
  EXPECT_EQ(Json::parse(r2.out)["precision_bits"], 96);
  EXPECT_EQ(run("exact --l 1", false, std::string(kPrecisionEnv) + "=16").code, kExitArgument);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, kExitArgument);
  EXPECT_EQ(run("bogus").code, kExitArgument);
  EXPECT_EQ(run("shifted --l 1").code, kExitArgument);
  EXPECT_EQ(run("exact --l 1 --precision-bits 32").code, kExitArgument);
  EXPECT_EQ(run("exact --l 1 --weight 10").code, kExitArgument);
  EXPECT_EQ(run("shifted --l 1 --s 7").code, kExitArgument);
  auto bad_cfg = temp_file("bad.cfg", "tol = 1e-8\nunknown = 1\n");
  auto r = run("exact --config " + bad_cfg, true);
  EXPECT_EQ(r.code, kExitArgument);
  EXPECT_NE(r.out.find(":2:"), std::string::npos) << r.out;
  // cutoffs far too small for 1e-9 agreement: tolerance failure, report still written
  auto kb = run("kb-check --l 1 --s 1.8 --weight 12 --q-max 50 --n-max 50");
  EXPECT_EQ(kb.code, kExitTolerance);
  EXPECT_EQ(first_line(kb.out).substr(0, 5), "l,s,t");
  EXPECT_EQ(run("--help").code, kExitOk);
}

TEST(Cli, SelftestPasses) {
  auto r = run("selftest --precision-bits 128");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}
