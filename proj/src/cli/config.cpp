#include "polaron/cli/config.hpp"

#include <openssl/sha.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "polaron/error.hpp"

namespace polaron::cli {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& s) {
  if (s.empty()) throw ValidationError(key, "missing value");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError(key, "not a number: '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) throw ValidationError(key, "not a finite number: '" + s + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& s) {
  Int v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ValidationError(key, "not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ValidationError(key, "expected true or false, got '" + s + "'");
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class T>
Field field(T RunConfig::*m) {
  Field f;
  if constexpr (std::is_same_v<T, double>) {
    f.get = [m](const RunConfig& c) { return format_double(c.*m); };
  } else if constexpr (std::is_same_v<T, bool>) {
    f.get = [m](const RunConfig& c) { return std::string(c.*m ? "true" : "false"); };
  } else if constexpr (std::is_same_v<T, std::string>) {
    f.get = [m](const RunConfig& c) { return c.*m; };
  } else {
    f.get = [m](const RunConfig& c) { return std::to_string(c.*m); };
  }
  return f;
}

template <class T>
std::pair<std::string, Field> entry(const std::string& key, T RunConfig::*m) {
  Field f = field(m);
  f.set = [key, m](RunConfig& c, const std::string& s) {
    if constexpr (std::is_same_v<T, double>) {
      c.*m = parse_double(key, s);
    } else if constexpr (std::is_same_v<T, bool>) {
      c.*m = parse_bool(key, s);
    } else if constexpr (std::is_same_v<T, std::string>) {
      c.*m = s;
    } else {
      c.*m = parse_int<T>(key, s);
    }
  };
  return {key, f};
}

const std::vector<std::pair<std::string, Field>>& table() {
  static const std::vector<std::pair<std::string, Field>> t = {
      entry("task", &RunConfig::task),
      entry("alpha", &RunConfig::alpha),
      entry("u", &RunConfig::u),
      entry("n", &RunConfig::n),
      entry("grid_n", &RunConfig::grid_n),
      entry("grid_rmax", &RunConfig::grid_rmax),
      entry("tol", &RunConfig::tol),
      entry("pt_grid_n", &RunConfig::pt_grid_n),
      entry("pt_grid_rmax", &RunConfig::pt_grid_rmax),
      entry("pt_grid_nu", &RunConfig::pt_grid_nu),
      entry("scf_tol", &RunConfig::scf_tol),
      entry("period", &RunConfig::period),
      entry("slices", &RunConfig::slices),
      entry("sweeps", &RunConfig::sweeps),
      entry("seed", &RunConfig::seed),
      entry("schedule_points", &RunConfig::schedule_points),
      entry("burn_fraction", &RunConfig::burn_fraction),
      entry("blocks", &RunConfig::blocks),
      entry("oscillator", &RunConfig::oscillator),
      entry("u_min", &RunConfig::u_min),
      entry("u_max", &RunConfig::u_max),
      entry("u_steps", &RunConfig::u_steps),
      entry("find_critical", &RunConfig::find_critical),
      entry("critical_tol", &RunConfig::critical_tol),
      entry("suite", &RunConfig::suite),
      entry("inject_fault", &RunConfig::inject_fault),
      entry("output_dir", &RunConfig::output_dir),
      entry("format", &RunConfig::format),
      entry("dir", &RunConfig::dir),
  };
  return t;
}

const Field& lookup(const std::string& key) {
  for (const auto& [k, f] : table())
    if (k == key) return f;
  throw ValidationError(key, "unknown key");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : table()) k.push_back(e.first);
    return k;
  }();
  return keys;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) { lookup(key).set(cfg, value); }

std::string get_key(const RunConfig& cfg, const std::string& key) { return lookup(key).get(cfg); }

RunConfig parse_config(const std::string& text) { return parse_config(text, RunConfig{}); }

RunConfig parse_config(const std::string& text, RunConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", number);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", number);
    if (seen.count(key)) throw ParseError("duplicate key '" + key + "'", number);
    seen[key] = number;
    try {
      set_key(cfg, key, value);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), number);
    }
  }
  return cfg;
}

std::string emit_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, f] : table()) out += k + " = " + f.get(cfg) + "\n";
  return out;
}

void validate(const RunConfig& c) {
  static const char* tasks[] = {"pekar", "bipolaron", "pimc", "scan-binding", "verify", "report"};
  bool known = false;
  for (const char* t : tasks) known = known || c.task == t;
  if (c.task.empty()) throw ValidationError("task", "must be given");
  if (!known) throw ValidationError("task", "unknown task '" + c.task + "'");
  if (!(c.alpha > 0.0)) throw ValidationError("alpha", "must be positive");
  if (!(c.u >= 0.0)) throw ValidationError("u", "must be nonnegative");
  if (c.n < 1 || c.n > 2) throw ValidationError("n", "must be 1 or 2");
  if (c.grid_n < 16) throw ValidationError("grid_n", "must be at least 16");
  if (!(c.grid_rmax > 0.0)) throw ValidationError("grid_rmax", "must be positive");
  if (!(c.tol > 0.0)) throw ValidationError("tol", "must be positive");
  if (c.pt_grid_n < 16) throw ValidationError("pt_grid_n", "must be at least 16");
  if (!(c.pt_grid_rmax > 0.0)) throw ValidationError("pt_grid_rmax", "must be positive");
  if (c.pt_grid_nu < 1) throw ValidationError("pt_grid_nu", "must be positive");
  if (!(c.scf_tol > 0.0)) throw ValidationError("scf_tol", "must be positive");
  if (!(c.period > 0.0)) throw ValidationError("period", "must be positive");
  if (c.slices < 8) throw ValidationError("slices", "must be at least 8");
  if (c.sweeps < 1) throw ValidationError("sweeps", "must be positive");
  if (c.schedule_points < 2) throw ValidationError("schedule_points", "must be at least 2");
  if (!(c.burn_fraction >= 0.0 && c.burn_fraction < 1.0)) throw ValidationError("burn_fraction", "must lie in [0, 1)");
  if (c.blocks < 2) throw ValidationError("blocks", "must be at least 2");
  if (!(c.oscillator >= 0.0)) throw ValidationError("oscillator", "must be nonnegative");
  if (!(c.u_min >= 0.0)) throw ValidationError("u_min", "must be nonnegative");
  if (!(c.u_max >= c.u_min)) throw ValidationError("u_max", "must not be below u_min");
  if (c.u_steps < 1) throw ValidationError("u_steps", "must be positive");
  if (!(c.critical_tol > 0.0)) throw ValidationError("critical_tol", "must be positive");
  if (c.suite != "default") throw ValidationError("suite", "only 'default' is available");
  if (c.format != "json" && c.format != "csv") throw ValidationError("format", "must be json or csv");
  if (c.format == "csv" && c.task != "scan-binding") throw ValidationError("format", "csv is only written by scan-binding");
  if (c.task == "report" && c.dir.empty()) throw ValidationError("dir", "must be given for report");
  if (c.task != "report" && c.output_dir.empty()) throw ValidationError("output_dir", "must not be empty");
}

std::string config_hash(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.output_dir.clear();
  c.format.clear();
  c.dir.clear();
  const std::string text = emit_config(c);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  std::string hex;
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

}  // namespace polaron::cli
