#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "symsq/precision.hpp"
#include "symsq/real.hpp"

namespace symsq::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kPrecisionEnv = "SYMSQ_PRECISION_BITS";

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitArgument = 1;
inline constexpr int kExitTolerance = 2;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  long precision_bits = 192;
  double tol = 1e-10;
  long q_max = 4000;
  long n_max = 2000;
  std::string format = "csv";
  long parallelism = 1;

  void validate() const {
    if (precision_bits < 64) throw ConfigError("precision_bits must be >= 64");
    if (!(tol > 0) || std::log2(tol) < static_cast<double>(-precision_bits + 16))
      throw ConfigError("tol must be >= 2^(16 - precision_bits)");
    if (q_max < 1 || n_max < 1) throw ConfigError("q_max and n_max must be >= 1");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  }

  PrecisionContext context() const { return PrecisionContext::with_bits(precision_bits); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline long parse_long(const std::string& v, const std::string& what) {
  std::size_t pos = 0;
  long r = 0;
  try {
    r = std::stol(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError(what + ": expected an integer, got '" + v + "'");
  return r;
}

inline double parse_double(const std::string& v, const std::string& what) {
  std::size_t pos = 0;
  double r = 0;
  try {
    r = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError(what + ": expected a number, got '" + v + "'");
  return r;
}

}  // namespace detail

// Default precision, overridden by SYMSQ_PRECISION_BITS when set.
inline RunConfig default_config() {
  RunConfig c;
  if (const char* env = std::getenv(kPrecisionEnv); env && *env) {
    c.precision_bits = detail::parse_long(env, kPrecisionEnv);
    if (c.precision_bits < 64) throw ConfigError(std::string(kPrecisionEnv) + ": precision_bits must be >= 64");
  }
  return c;
}

// Overlay `key = value` lines onto cfg.  Blank lines and lines starting with '#' are skipped.
inline void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::string where = name + ":" + std::to_string(lineno);
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    std::string key = detail::trim(t.substr(0, eq)), val = detail::trim(t.substr(eq + 1));
    if (val.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    try {
      if (key == "precision_bits") {
        cfg.precision_bits = detail::parse_long(val, key);
        if (cfg.precision_bits < 64) throw ConfigError("precision_bits must be >= 64");
      } else if (key == "tol") {
        cfg.tol = detail::parse_double(val, key);
      } else if (key == "q_max") {
        cfg.q_max = detail::parse_long(val, key);
      } else if (key == "n_max") {
        cfg.n_max = detail::parse_long(val, key);
      } else if (key == "format") {
        cfg.format = val;
        if (val != "csv" && val != "json") throw ConfigError("format must be csv or json");
      } else if (key == "parallelism") {
        cfg.parallelism = detail::parse_long(val, key);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
}

inline RunConfig read_config(const std::string& path, RunConfig base = default_config()) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_text(base, ss.str(), path);
  return base;
}

// Significant digits for decimal output: floor(0.3 * bits).
inline int output_digits(long bits) { return static_cast<int>(0.3 * static_cast<double>(bits)); }

inline std::string fmt(const Real& x, long bits) { return x.to_string(output_digits(bits)); }

// Doubles carry at most 17 meaningful digits.
inline std::string fmt(double x, long bits) {
  int d = std::min(17, output_digits(bits));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", d - 1, x);
  return buf;
}

// "a:b:step" (inclusive), comma lists, or single values.
inline std::vector<long> parse_long_range(const std::string& spec) {
  std::vector<long> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + spec + "'");
    auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(detail::parse_long(item, "range"));
      continue;
    }
    auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("range '" + item + "' must be start:stop:step");
    long a = detail::parse_long(item.substr(0, c1), "range start");
    long b = detail::parse_long(item.substr(c1 + 1, c2 - c1 - 1), "range stop");
    long st = detail::parse_long(item.substr(c2 + 1), "range step");
    if (st <= 0 || b < a) throw ConfigError("range '" + item + "' needs step > 0 and stop >= start");
    for (long v = a; v <= b; v += st) out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

inline std::vector<double> parse_double_range(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + spec + "'");
    auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(detail::parse_double(item, "list"));
      continue;
    }
    auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("range '" + item + "' must be start:stop:step");
    double a = detail::parse_double(item.substr(0, c1), "range start");
    double b = detail::parse_double(item.substr(c1 + 1, c2 - c1 - 1), "range stop");
    double st = detail::parse_double(item.substr(c2 + 1), "range step");
    if (!(st > 0) || b < a) throw ConfigError("range '" + item + "' needs step > 0 and stop >= start");
    long n = static_cast<long>(std::floor((b - a) / st + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * st);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

// CSV from a header and rows of already formatted cells.
inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace symsq::cli
