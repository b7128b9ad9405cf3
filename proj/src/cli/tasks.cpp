#include "polaron/cli/tasks.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>

#include "polaron/binding/verify.hpp"
#include "polaron/error.hpp"
#include "polaron/pekar/pekar.hpp"

namespace polaron::cli {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const DegenerateInput*>(&e) ||
      dynamic_cast<const GridMismatch*>(&e))
    return kInvalidInput;
  return kNoConvergence;
}

int apply_thread_cap() {
  const char* env = std::getenv("POLARON_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long cap = std::strtol(env, &end, 10);
  if (*end != '\0' || cap < 1) throw ValidationError("POLARON_THREADS", "must be a positive integer");
  const int threads = static_cast<int>(std::min<long>(cap, omp_get_max_threads()));
  omp_set_num_threads(threads);
  return threads;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

Json params_json(double alpha, double u, int n) {
  Json p;
  p["alpha"] = alpha;
  p["u"] = u;
  p["n"] = n;
  return p;
}

Json convergence_json(long iterations, double residual) {
  Json c;
  c["iterations"] = iterations;
  c["residual"] = residual;
  return c;
}

Json meta_json(const Json& grid, const std::uint64_t* seed) {
  Json m;
  if (seed) m["seed"] = *seed;
  m["grid"] = grid;
  m["version"] = kVersion;
  return m;
}

std::shared_ptr<const pt::InternalGrid> pt_grid(const RunConfig& c) {
  return pt::InternalGrid::build(c.pt_grid_rmax / c.alpha, c.pt_grid_n, c.pt_grid_nu);
}

Json pt_grid_json(const RunConfig& c) {
  Json g;
  g["kind"] = "internal";
  g["r_max"] = c.pt_grid_rmax / c.alpha;
  g["n_r"] = c.pt_grid_n;
  g["n_u"] = c.pt_grid_nu;
  return g;
}

pt::ScfOptions scf_options(const RunConfig& c) {
  pt::ScfOptions o;
  o.tol = c.scf_tol;
  return o;
}

TaskResult run_pekar(const RunConfig& c) {
  auto grid = core::make_grid(c.grid_rmax / c.alpha, c.grid_n);
  pekar::PekarOptions opts;
  opts.tol = c.tol;
  const auto res = pekar::solve_pekar(c.alpha, grid, opts);

  Json g;
  g["kind"] = "radial";
  g["r_max"] = grid->r_max();
  g["n"] = grid->size();

  TaskResult out;
  Json& d = out.document;
  d["task"] = "pekar";
  d["params"] = params_json(c.alpha, 0.0, 1);
  d["energy"] = res.energy;
  d["components"]["kinetic"] = res.kinetic;
  d["components"]["attraction"] = -c.alpha * res.attraction;
  d["convergence"] = convergence_json(res.iterations, res.residual);
  d["meta"] = meta_json(g, nullptr);
  d["pekar_constant"] = -res.energy / (c.alpha * c.alpha);
  d["virial"] = std::abs(res.kinetic + res.energy) / std::abs(res.energy);
  d["gaussian_trial"] = pekar::gaussian_trial_energy(c.alpha);
  out.diagnostics = d["convergence"];
  return out;
}

Json binding_json(const binding::BindingReport& r) {
  Json b;
  b["e1"] = r.e1;
  b["e2"] = r.e2;
  b["delta_e"] = r.delta_e;
  b["breakup"] = r.breakup;
  b["threshold"] = binding::binding_threshold(r.alpha);
  b["unbound"] = r.unbound;
  b["inv_r12"] = r.inv_r12;
  if (r.method == binding::Method::PT) b["e2_one_center"] = r.e2_one_center;
  else b["stderr_e1"] = r.stderr_e1;
  return b;
}

TaskResult run_bipolaron(const RunConfig& c) {
  const binding::PtContext ctx(c.alpha, pt_grid(c), scf_options(c));
  const auto r = binding::binding_energy(ctx, c.u);

  TaskResult out;
  Json& d = out.document;
  d["task"] = "bipolaron";
  d["params"] = params_json(c.alpha, c.u, 2);
  d["energy"] = r.e2;
  if (r.e2 < r.e2_one_center) {
    // two separated polarons
    d["components"]["kinetic"] = 2.0 * ctx.pekar().kinetic;
    d["components"]["attraction"] = -2.0 * c.alpha * ctx.pekar().attraction;
    d["components"]["repulsion"] = 0.0;
  } else {
    d["components"]["kinetic"] = r.kinetic;
    d["components"]["attraction"] = -c.alpha * r.attraction;
    d["components"]["repulsion"] = c.u * r.inv_r12;
  }
  d["convergence"] = convergence_json(r.scf_iterations, r.scf_residual);
  d["meta"] = meta_json(pt_grid_json(c), nullptr);
  d["binding"] = binding_json(r);
  out.diagnostics = d["convergence"];
  return out;
}

pimc::SamplerOptions sampler_options(const RunConfig& c) {
  pimc::SamplerOptions o;
  o.period = c.period;
  o.slices = c.slices;
  o.sweeps = c.sweeps;
  o.seed = c.seed;
  o.burn_fraction = c.burn_fraction;
  o.blocks = c.blocks;
  o.oscillator = c.oscillator;
  return o;
}

Json point_json(const pimc::CouplingPoint& p) {
  Json j;
  j["alpha"] = p.alpha;
  j["action"] = p.action;
  j["stderr"] = p.stderr;
  j["repulsion"] = p.repulsion;
  j["autocorrelation_time"] = p.autocorrelation_time;
  j["plateau"] = p.plateau;
  j["acceptance"] = {{"slice", p.acceptance.slice}, {"bridge", p.acceptance.bridge}, {"shift", p.acceptance.shift}};
  j["tuning_ok"] = p.tuning_ok;
  j["action_drift"] = p.action_drift;
  return j;
}

TaskResult run_pimc(const RunConfig& c) {
  const auto opts = sampler_options(c);
  const bool oscillator = c.oscillator > 0.0;
  const auto est = oscillator ? pimc::estimate_oscillator(c.oscillator, opts)
                              : pimc::estimate_energy(c.alpha, c.u, c.n, opts, c.schedule_points);

  Json g;
  g["kind"] = "paths";
  g["period"] = c.period;
  g["slices"] = c.slices;

  TaskResult out;
  Json& d = out.document;
  d["task"] = "pimc";
  d["params"] = oscillator ? params_json(0.0, 0.0, 1) : params_json(c.alpha, c.u, c.n);
  d["energy"] = est.energy;
  d["stderr"] = est.stderr;
  if (oscillator) {
    const double potential = 0.5 * est.raw_energy;
    d["components"]["kinetic"] = est.energy - potential;
    d["components"]["attraction"] = 0.0;
    d["components"]["potential"] = potential;
  } else {
    const auto& top = est.points.back();
    const double attraction = -c.alpha * top.action;
    const double repulsion = c.n == 2 ? c.u * top.repulsion : 0.0;
    d["components"]["kinetic"] = est.energy - attraction - repulsion;
    d["components"]["attraction"] = attraction;
    if (c.n == 2) d["components"]["repulsion"] = repulsion;
  }
  d["convergence"] = convergence_json(c.sweeps, est.action_drift);
  d["meta"] = meta_json(g, &c.seed);
  Json p;
  if (oscillator) {
    p["oscillator"] = c.oscillator;
    p["raw_energy"] = est.raw_energy;
  }
  p["quadrature_error"] = est.quadrature_error;
  p["insufficient_statistics"] = est.insufficient_statistics;
  p["tuning_ok"] = est.tuning_ok;
  p["schedule"] = est.schedule;
  Json pts = Json::array();
  for (const auto& q : est.points) pts.push_back(point_json(q));
  p["points"] = pts;
  d["pimc"] = p;
  out.diagnostics = d["convergence"];
  out.diagnostics["insufficient_statistics"] = est.insufficient_statistics;
  return out;
}

Json row_json(const binding::BindingReport& r) {
  Json j;
  j["alpha"] = r.alpha;
  j["u"] = r.u;
  j["method"] = binding::method_name(r.method);
  j["e1"] = r.e1;
  j["e2"] = r.e2;
  j["delta_e"] = r.delta_e;
  j["inv_r12"] = r.inv_r12;
  j["unbound"] = r.unbound;
  j["e2_one_center"] = r.e2_one_center;
  j["scf_iterations"] = r.scf_iterations;
  j["scf_residual"] = r.scf_residual;
  return j;
}

TaskResult run_scan(const RunConfig& c) {
  const binding::PtContext ctx(c.alpha, pt_grid(c), scf_options(c));
  binding::ScanResult scan;
  if (c.find_critical) {
    scan = binding::find_critical_ratio(ctx, c.critical_tol);
  } else {
    std::vector<double> us;
    for (int k = 0; k < c.u_steps; ++k)
      us.push_back(c.u_steps == 1 ? c.u_min : c.u_min + (c.u_max - c.u_min) * k / (c.u_steps - 1));
    scan = binding::scan_binding(ctx, us);
  }

  TaskResult out;
  out.csv = binding::to_csv(scan);
  Json& d = out.document;
  d["task"] = "scan-binding";
  d["params"] = params_json(c.alpha, c.u_min, 2);
  d["e1"] = ctx.e1();
  d["threshold"] = binding::binding_threshold(c.alpha);
  if (scan.has_critical) {
    d["nu_c"] = scan.nu_c;
    d["bracket"] = {scan.u_low, scan.u_high};
    d["tolerance"] = scan.tolerance;
  }
  long iterations = 0;
  double residual = 0.0;
  Json rows = Json::array();
  for (const auto& r : scan.rows) {
    rows.push_back(row_json(r));
    iterations += r.scf_iterations;
    residual = std::max(residual, r.scf_residual);
  }
  d["convergence"] = convergence_json(iterations, residual);
  d["meta"] = meta_json(pt_grid_json(c), nullptr);
  d["rows"] = rows;
  out.diagnostics = d["convergence"];
  out.diagnostics["rows"] = scan.rows.size();
  return out;
}

TaskResult run_verify(const RunConfig& c) {
  auto suite = binding::default_suite();
  suite.mc.seed = c.seed;
  suite.inject_fault = c.inject_fault;
  const auto inputs = binding::run_suite(suite);
  const auto report = binding::verify_bounds(inputs);

  TaskResult out;
  Json& d = out.document;
  d["task"] = "verify";
  d["suite"] = c.suite;
  d["passed"] = report.passed();
  Json checks = Json::array();
  for (const auto& ch : report.checks)
    checks.push_back({{"id", ch.id}, {"subject", ch.subject}, {"pass", ch.pass}, {"detail", ch.detail}});
  d["checks"] = checks;
  Json pimc = Json::array();
  for (const auto& e : inputs.pimc) pimc.push_back({{"alpha", e.alpha}, {"energy", e.energy}, {"stderr", e.stderr}});
  d["pimc"] = pimc;
  Json pt = Json::array();
  for (const auto& e : inputs.pt) pt.push_back({{"alpha", e.alpha}, {"energy", e.energy}});
  d["pt"] = pt;
  if (inputs.nu_c) d["nu_c"] = *inputs.nu_c;
  Json rows = Json::array();
  for (const auto& r : inputs.rows) rows.push_back(row_json(r));
  d["rows"] = rows;
  d["meta"] = meta_json(pt_grid_json(c), &c.seed);
  out.verified = report.passed();
  out.diagnostics["passed"] = report.passed();
  out.diagnostics["failures"] = report.failures().size();
  return out;
}

std::string timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t s = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&s, &tm);
  const long ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch()).count() % 1000000000L;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%09ldZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, ns);
  return buf;
}

}  // namespace

TaskResult compute_task(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.task == "pekar") return run_pekar(cfg);
  if (cfg.task == "bipolaron") return run_bipolaron(cfg);
  if (cfg.task == "pimc") return run_pimc(cfg);
  if (cfg.task == "scan-binding") return run_scan(cfg);
  if (cfg.task == "verify") return run_verify(cfg);
  throw ValidationError("task", "'" + cfg.task + "' produces no result file");
}

RunOutcome run_task(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  RunOutcome outcome;
  try {
    validate(cfg);
    if (cfg.task == "report") {
      out << emit_report(cfg.dir).dump(2) << "\n";
      return outcome;
    }
    const auto started = std::chrono::system_clock::now();
    TaskResult res = compute_task(cfg);
    const auto finished = std::chrono::system_clock::now();

    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    const std::string hash = config_hash(cfg);
    const std::string stem = cfg.task + "-" + hash.substr(0, 16);
    std::vector<std::string> names;
    const std::string json_text = res.document.dump(2) + "\n";
    write_atomic(dir / (stem + ".json"), json_text);
    names.push_back(stem + ".json");
    if (!res.csv.empty()) {
      write_atomic(dir / (stem + ".csv"), res.csv);
      names.push_back(stem + ".csv");
    }

    Json m;
    Json config;
    for (const auto& k : config_keys()) config[k] = get_key(cfg, k);
    m["config"] = config;
    m["config_hash"] = hash;
    m["version"] = kVersion;
    m["started"] = timestamp(started);
    m["finished"] = timestamp(finished);
    m["input_hashes"] = {{"config", hash}};
    m["results"] = names;
    m["diagnostics"] = res.diagnostics;
    m["exit_code"] = res.verified ? kOk : kVerifyFailure;
    const long long ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(finished.time_since_epoch()).count();
    outcome.manifest = dir / ("manifest-" + hash.substr(0, 16) + "-" + std::to_string(ns) + ".json");
    write_atomic(outcome.manifest, m.dump(2) + "\n");

    for (const auto& n : names) outcome.files.push_back(dir / n);
    out << (cfg.format == "csv" ? res.csv : json_text);
    if (!res.verified) {
      for (const auto& ch : res.document["checks"])
        if (!ch["pass"].get<bool>())
          err << "verify: check " << ch["id"].get<std::string>() << " failed for " << ch["subject"].get<std::string>()
              << ": " << ch["detail"].get<std::string>() << "\n";
      outcome.exit_code = kVerifyFailure;
    }
  } catch (const std::exception& e) {
    err << "polaron " << cfg.task << ": " << e.what() << "\n";
    outcome.exit_code = exit_code_for(e);
  }
  return outcome;
}

}  // namespace polaron::cli
