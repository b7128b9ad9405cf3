#include "polaron/binding/binding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "polaron/error.hpp"

namespace polaron::binding {

const char* method_name(Method m) { return m == Method::PT ? "PT" : "PIMC"; }

double binding_threshold(double alpha) { return 1e-4 * alpha * alpha; }

PtContext::PtContext(double alpha, std::shared_ptr<const pt::InternalGrid> grid, pt::ScfOptions scf)
    : alpha_(alpha), grid_(std::move(grid)), scf_(std::move(scf)) {
  if (!(alpha > 0.0)) throw ValidationError("alpha", "must be positive");
  if (!grid_) grid_ = pt::default_internal_grid(alpha);
  op_ = std::make_unique<pt::TwoBodyOperator>(grid_);
  pekar_ = pekar::solve_pekar(alpha, grid_->radial);
}

pt::BipolaronResult PtContext::solve(double u, const std::optional<pt::BipolaronState>& initial) const {
  pt::ScfOptions o = scf_;
  if (initial) o.initial = initial;
  return pt::scf_minimize(core::CouplingParams{alpha_, u, 2}, *op_, o);
}

namespace {

BindingReport from_scf(const PtContext& ctx, double u, const pt::BipolaronResult& res) {
  BindingReport r;
  r.alpha = ctx.alpha();
  r.u = u;
  r.method = Method::PT;
  r.e1 = ctx.e1();
  r.breakup = breakup_energy(2, r.e1, 0.0);
  r.e2_one_center = res.energy;
  r.e2 = std::min(res.energy, r.breakup);
  r.delta_e = 2.0 * r.e1 - r.e2;
  r.unbound = r.delta_e <= binding_threshold(r.alpha);
  r.inv_r12 = res.repulsion_expect;
  r.scf_iterations = res.scf_iterations;
  r.scf_residual = res.scf_residual;
  r.kinetic = res.kinetic;
  r.attraction = res.attraction;
  return r;
}

}  // namespace

BindingReport binding_energy(const PtContext& ctx, double u) { return from_scf(ctx, u, ctx.solve(u)); }

BindingReport binding_energy(double alpha, double u) { return binding_energy(PtContext(alpha), u); }

BindingReport binding_from_estimates(const pimc::PimcEstimate& one, const pimc::PimcEstimate& two) {
  if (one.n_particles != 1 || two.n_particles != 2)
    throw InvalidArgument("need one single-particle and one two-particle estimate");
  if (one.alpha != two.alpha) throw InvalidArgument("estimates at different couplings");
  BindingReport r;
  r.alpha = two.alpha;
  r.u = two.repulsion_u;
  r.method = Method::PIMC;
  r.e1 = one.energy;
  r.e2 = two.energy;
  r.stderr_e1 = one.stderr;
  r.stderr_e2 = two.stderr;
  r.breakup = 2.0 * r.e1;
  r.delta_e = 2.0 * r.e1 - r.e2;
  const double err = std::hypot(2.0 * one.stderr, two.stderr);
  r.unbound = r.delta_e <= std::max(binding_threshold(r.alpha), 2.0 * err);
  if (!two.points.empty()) r.inv_r12 = two.points.back().repulsion;
  r.e2_one_center = r.e2;
  return r;
}

BindingReport binding_energy_pimc(double alpha, double u, const pimc::SamplerOptions& opts) {
  if (!(alpha > 0.0)) throw ValidationError("alpha", "must be positive");
  const auto one = pimc::estimate_energy(alpha, 0.0, 1, opts);
  pimc::SamplerOptions o2 = opts;
  o2.seed = pimc::derive_seed(opts.seed, 1000);
  const auto two = pimc::estimate_energy(alpha, u, 2, o2);
  return binding_from_estimates(one, two);
}

double breakup_energy(int n, double e1, double e2) {
  if (n >= 4) throw UnsupportedN("break-up energies are available for N = 2, 3");
  if (n < 2) throw InvalidArgument("break-up needs at least two particles");
  return n == 2 ? 2.0 * e1 : e1 + e2;
}

ScanResult scan_binding(const PtContext& ctx, std::vector<double> u_values) {
  for (double u : u_values)
    if (!(u >= 0.0)) throw ValidationError("u", "must be nonnegative");
  std::sort(u_values.begin(), u_values.end());
  ScanResult scan;
  scan.alpha = ctx.alpha();
  scan.rows.resize(u_values.size());
  const int n = static_cast<int>(u_values.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < n; ++k) scan.rows[k] = binding_energy(ctx, u_values[k]);
  return scan;
}

ScanResult find_critical_ratio(const PtContext& ctx, double tol, double nu_low, double nu_high) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (!(nu_low >= 0.0 && nu_high > nu_low)) throw InvalidArgument("bad bisection bracket");
  const double alpha = ctx.alpha();
  const double eps = binding_threshold(alpha);
  ScanResult scan;
  scan.alpha = alpha;
  scan.tolerance = tol;
  double lo = nu_low, hi = nu_high;
  const auto low = ctx.solve(lo * alpha);
  scan.rows.push_back(from_scf(ctx, lo * alpha, low));
  if (!(scan.rows.back().delta_e > eps)) throw BracketFailure("no binding at the lower end U/alpha = " + std::to_string(lo));
  const auto high = ctx.solve(hi * alpha);
  scan.rows.push_back(from_scf(ctx, hi * alpha, high));
  if (scan.rows.back().delta_e > eps) throw BracketFailure("still bound at the upper end U/alpha = " + std::to_string(hi));
  pt::BipolaronState bound = low.state;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const auto res = ctx.solve(mid * alpha, bound);
    scan.rows.push_back(from_scf(ctx, mid * alpha, res));
    if (scan.rows.back().delta_e > eps) {
      lo = mid;
      bound = res.state;
    } else {
      hi = mid;
    }
  }
  std::sort(scan.rows.begin(), scan.rows.end(),
            [](const BindingReport& a, const BindingReport& b) { return a.u < b.u; });
  scan.nu_c = 0.5 * (lo + hi);
  scan.u_low = lo * alpha;
  scan.u_high = hi * alpha;
  scan.has_critical = true;
  return scan;
}

std::vector<RadiusRow> radius_profile(const PtContext& ctx, std::vector<double> u_values) {
  const ScanResult scan = scan_binding(ctx, std::move(u_values));
  std::vector<RadiusRow> out;
  for (const auto& r : scan.rows) out.push_back({r.u, r.inv_r12, r.delta_e, r.unbound});
  return out;
}

DerivativeCheck feynman_hellmann(const PtContext& ctx, double u, double h) {
  if (!(h > 0.0) || u - h < 0.0) throw InvalidArgument("need 0 < h <= u");
  const auto mid = ctx.solve(u);
  const auto up = ctx.solve(u + h, mid.state);
  const auto down = ctx.solve(u - h, mid.state);
  DerivativeCheck c;
  c.u = u;
  c.finite_difference = (up.energy - down.energy) / (2.0 * h);
  c.inv_r12 = mid.repulsion_expect;
  c.relative_error = std::abs(c.finite_difference - c.inv_r12) / std::abs(c.inv_r12);
  return c;
}

int first_monotonicity_violation(const std::vector<BindingReport>& rows, double tol) {
  for (size_t k = 1; k < rows.size(); ++k)
    if (rows[k].u >= rows[k - 1].u && rows[k].delta_e > rows[k - 1].delta_e + tol) return static_cast<int>(k);
  return -1;
}

std::string csv_header() { return "alpha,U,method,e1,e2,delta_e,inv_r12,unbound_flag,stderr_e2"; }

std::string csv_row(const BindingReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.12g,%.12g,%s,%.12g,%.12g,%.12g,%.12g,%d,", r.alpha, r.u,
                method_name(r.method), r.e1, r.e2, r.delta_e, r.inv_r12, r.unbound ? 1 : 0);
  std::string s = buf;
  if (r.method == Method::PIMC) {
    std::snprintf(buf, sizeof buf, "%.12g", r.stderr_e2);
    s += buf;
  }
  return s;
}

std::string to_csv(const ScanResult& scan) {
  std::string s = csv_header() + "\n";
  for (const auto& r : scan.rows) s += csv_row(r) + "\n";
  return s;
}

}  // namespace polaron::binding
