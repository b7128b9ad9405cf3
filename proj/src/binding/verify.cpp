#include "polaron/binding/verify.hpp"

#include <cmath>
#include <cstdio>

namespace polaron::binding {

bool VerificationReport::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<const VerifyCheck*> VerificationReport::failures() const {
  std::vector<const VerifyCheck*> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(&c);
  return out;
}

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::string row_name(const BindingReport& r) {
  return fmt("row alpha=%g U=%g", r.alpha, r.u) + " " + method_name(r.method);
}

}  // namespace

VerificationReport verify_bounds(const VerifyInputs& in) {
  VerificationReport rep;
  for (const auto& e : in.pimc) {
    const double a = e.alpha, s = e.stderr;
    VerifyCheck c{"a", fmt("pimc alpha=%g", a), false, ""};
    if (a <= 0.5) {
      const double lo = -a - a * a / 3.0;
      c.pass = e.energy >= lo - 2.0 * s && e.energy <= -a + 2.0 * s;
      c.detail = fmt("E=%.6f +- %.6f, bracket [%.6f, %.6f]", e.energy, s, lo, -a);
    } else {
      c.pass = e.energy <= -a + 2.0 * s;
      c.detail = fmt("E=%.6f +- %.6f, upper %.6f", e.energy, s, -a);
    }
    rep.checks.push_back(c);
  }
  for (const auto& p : in.pt) {
    const double target = -in.pekar_constant * p.alpha * p.alpha;
    VerifyCheck c{"b", fmt("pt alpha=%g", p.alpha), std::abs(p.energy - target) <= 0.01 * std::abs(target),
                  fmt("E=%.8f, -C_P alpha^2=%.8f", p.energy, target)};
    rep.checks.push_back(c);
    for (const auto& e : in.pimc) {
      if (e.alpha != p.alpha) continue;
      rep.checks.push_back({"b", fmt("pimc below pt alpha=%g", p.alpha),
                            e.energy <= p.energy + 2.0 * e.stderr,
                            fmt("E_pimc=%.6f +- %.6f, E_pt=%.6f", e.energy, e.stderr, p.energy)});
    }
  }
  for (const auto& r : in.rows) {
    const double tol = 1e-6 + 2.0 * std::hypot(2.0 * r.stderr_e1, r.stderr_e2);
    rep.checks.push_back({"c", row_name(r), r.e2 <= 2.0 * r.e1 + tol,
                          fmt("e2=%.8f, 2 e1=%.8f", r.e2, 2.0 * r.e1)});
  }
  if (in.nu_c) {
    for (const auto& r : in.rows) {
      if (r.method != Method::PT || r.u < 1.1 * *in.nu_c * r.alpha) continue;
      const double eps = binding_threshold(r.alpha);
      rep.checks.push_back({"d", row_name(r), std::abs(r.delta_e) <= eps,
                            fmt("delta_e=%.3e, threshold %.1e", r.delta_e, eps)});
    }
  }
  std::vector<BindingReport> pt_rows;
  for (const auto& r : in.rows)
    if (r.method == Method::PT) pt_rows.push_back(r);
  if (pt_rows.size() > 1) {
    const int k = first_monotonicity_violation(pt_rows);
    rep.checks.push_back({"monotone", "delta_e along U", k < 0,
                          k < 0 ? std::string("nonincreasing") : row_name(pt_rows[k]) + " rises"});
  }
  return rep;
}

SuiteOptions default_suite() {
  SuiteOptions o;
  o.mc.sweeps = 20000;
  return o;
}

VerifyInputs run_suite(const SuiteOptions& opts) {
  VerifyInputs in;
  for (size_t k = 0; k < opts.pimc_alphas.size(); ++k) {
    pimc::SamplerOptions mc = opts.mc;
    mc.seed = pimc::derive_seed(opts.mc.seed, static_cast<int>(100 + k));
    in.pimc.push_back(pimc::estimate_energy(opts.pimc_alphas[k], 0.0, 1, mc));
  }
  const PtContext ctx(opts.alpha);
  in.pt.push_back({opts.alpha, ctx.e1()});
  const ScanResult crit = find_critical_ratio(ctx, opts.nu_tol);
  in.nu_c = crit.nu_c;
  std::vector<double> us;
  for (double r : opts.scan_ratios) us.push_back(r * opts.alpha);
  us.push_back(1.1 * crit.nu_c * opts.alpha);
  us.push_back(1.5 * crit.nu_c * opts.alpha);
  in.rows = scan_binding(ctx, us).rows;
  if (opts.inject_fault && !in.rows.empty()) in.rows.back().e2 += 0.1;
  return in;
}

}  // namespace polaron::binding
