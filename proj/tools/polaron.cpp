#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "polaron/cli/tasks.hpp"
#include "polaron/error.hpp"

using namespace polaron;

namespace {

struct Flag {
  std::string name;  // option name without dashes
  std::string key;   // config key
  std::string help;
};

struct Subcommand {
  CLI::App* app;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
  std::vector<Flag> flags;
};

const std::vector<Flag> kGrid = {{"grid-n", "grid_n", "radial nodes"},
                                 {"grid-rmax", "grid_rmax", "radial extent at coupling 1"},
                                 {"tol", "tol", "relative residual tolerance"}};
const std::vector<Flag> kPtGrid = {{"pt-grid-n", "pt_grid_n", "radial nodes of the two-body grid"},
                                   {"pt-grid-rmax", "pt_grid_rmax", "two-body radial extent at coupling 1"},
                                   {"pt-grid-nu", "pt_grid_nu", "angular nodes"},
                                   {"scf-tol", "scf_tol", "density change tolerance"}};
const std::vector<Flag> kMc = {{"period", "period", "imaginary-time period T"},
                               {"slices", "slices", "time slices M"},
                               {"sweeps", "sweeps", "sweeps per coupling"},
                               {"seed", "seed", "random seed"},
                               {"schedule-points", "schedule_points", "couplings in the integration"},
                               {"burn-fraction", "burn_fraction", "discarded fraction of sweeps"},
                               {"blocks", "blocks", "blocks for error bars"},
                               {"oscillator", "oscillator", "validation mode: strength v of v|x|^2"}};

std::vector<Flag> join(std::initializer_list<std::vector<Flag>> parts) {
  std::vector<Flag> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polaron and bipolaron ground-state solvers"};
  app.require_subcommand(0, 1);
  std::string config_file;
  bool dump_config = false;
  app.add_option("--config", config_file, "key = value file; flags override it");
  app.add_flag("--dump-config", dump_config, "print the effective config and exit");

  const std::vector<Flag> out_flags = {{"output-dir", "output_dir", "directory for results and manifest"},
                                       {"format", "format", "json or csv"}};
  const std::vector<Flag> coupling = {{"alpha", "alpha", "coupling"}};
  const std::vector<Flag> repulsion = {{"u", "u", "Coulomb repulsion"}};

  std::vector<std::pair<std::string, std::vector<Flag>>> specs = {
      {"pekar", join({coupling, kGrid, out_flags})},
      {"bipolaron", join({coupling, repulsion, kPtGrid, out_flags})},
      {"pimc", join({coupling, repulsion, {{"n", "n", "particles, 1 or 2"}}, kMc, out_flags})},
      {"scan-binding", join({coupling,
                             {{"u-min", "u_min", "lowest U"},
                              {"u-max", "u_max", "highest U"},
                              {"u-steps", "u_steps", "number of U values"},
                              {"tol", "critical_tol", "bracket width on U/alpha"}},
                             kPtGrid, out_flags})},
      {"verify", join({{{"suite", "suite", "check suite"}, {"seed", "seed", "random seed"}}, out_flags})},
      {"report", {{"dir", "dir", "results directory"}}},
  };
  const std::map<std::string, std::vector<Flag>> switches = {
      {"scan-binding", {{"find-critical", "find_critical", "bisect for the critical U/alpha"}}},
      {"verify", {{"inject-fault", "inject_fault", "corrupt one scan row"}}},
  };

  std::vector<Subcommand> subs;
  subs.reserve(specs.size());
  for (const auto& [name, flags] : specs) {
    Subcommand s;
    s.app = app.add_subcommand(name);
    s.flags = flags;
    subs.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < subs.size(); ++i) {
    auto& s = subs[i];
    for (const auto& f : s.flags) s.app->add_option("--" + f.name, s.values[f.name], f.help);
    const auto sw = switches.find(specs[i].first);
    if (sw != switches.end())
      for (const auto& f : sw->second) {
        s.switches[f.name] = false;
        s.app->add_flag("--" + f.name, s.switches[f.name], f.help);
        s.flags.push_back(f);
      }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInvalidInput;
  }

  cli::RunConfig cfg;
  try {
    cli::apply_thread_cap();
    if (!config_file.empty()) cfg = cli::parse_config(read_file(config_file));
    for (auto& s : subs) {
      if (!s.app->parsed()) continue;
      cfg.task = s.app->get_name();
      for (const auto& f : s.flags) {
        if (s.app->get_option("--" + f.name)->count() == 0) continue;
        if (s.switches.count(f.name)) cli::set_key(cfg, f.key, s.switches[f.name] ? "true" : "false");
        else cli::set_key(cfg, f.key, s.values[f.name]);
      }
    }
    if (dump_config) {
      std::cout << cli::emit_config(cfg);
      return cli::kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "polaron: " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
  return cli::run_task(cfg, std::cout, std::cerr).exit_code;
}
