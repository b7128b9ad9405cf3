#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polaron::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Every run parameter, with defaults. Grid radii are given at coupling 1
/// and divided by alpha.
struct RunConfig {
  std::string task;  // pekar | bipolaron | pimc | scan-binding | verify | report

  double alpha = 1.0;
  double u = 0.0;
  int n = 1;

  int grid_n = 2000;
  double grid_rmax = 40.0;
  double tol = 1e-8;
  int pt_grid_n = 96;
  double pt_grid_rmax = 20.0;
  int pt_grid_nu = 16;
  double scf_tol = 1e-8;

  double period = 32.0;
  int slices = 512;
  long sweeps = 200000;
  std::uint64_t seed = 1;
  int schedule_points = 8;
  double burn_fraction = 0.25;
  int blocks = 32;
  double oscillator = 0.0;

  double u_min = 0.0;
  double u_max = 5.0;
  int u_steps = 11;
  bool find_critical = false;
  double critical_tol = 0.01;

  std::string suite = "default";
  bool inject_fault = false;

  std::string output_dir = "results";
  std::string format = "json";
  std::string dir;

  bool operator==(const RunConfig&) const = default;
};

/// Keys in emission order.
const std::vector<std::string>& config_keys();

/// Assign one key from its text form. Throws ValidationError for unknown
/// keys and malformed values.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_key(const RunConfig& cfg, const std::string& key);

/// "key = value" lines; '#' starts a comment. Throws ParseError with the
/// line number for malformed lines and ValidationError for bad fields.
/// The result is not validated; call validate().
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const std::string& text, RunConfig base);
std::string emit_config(const RunConfig& cfg);

/// Field-level checks; throws ValidationError naming the field.
void validate(const RunConfig& cfg);

/// Hex SHA-256 of the emitted config without output_dir, format and dir.
std::string config_hash(const RunConfig& cfg);

}  // namespace polaron::cli
