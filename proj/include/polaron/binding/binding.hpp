#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polaron/pekar/pekar.hpp"
#include "polaron/pimc/estimate.hpp"
#include "polaron/pt/scf.hpp"

namespace polaron::binding {

enum class Method { PT, PIMC };
const char* method_name(Method m);

/// Binding threshold 1e-4 alpha^2.
double binding_threshold(double alpha);

struct BindingReport {
  double alpha = 0.0;
  double u = 0.0;
  Method method = Method::PT;
  double e1 = 0.0;
  /// min(one-center minimum, 2 e1): two far-apart polarons are always admissible.
  double e2 = 0.0;
  double delta_e = 0.0;  // 2 e1 - e2
  double breakup = 0.0;  // 2 e1
  double inv_r12 = 0.0;
  bool unbound = false;
  double stderr_e1 = 0.0;
  double stderr_e2 = 0.0;
  /// PT only: the radial one-center solution behind e2.
  double e2_one_center = 0.0;
  long scf_iterations = 0;
  double scf_residual = 0.0;
  double kinetic = 0.0;
  double attraction = 0.0;
};

/// Shared state for PT evaluations at one coupling: grid, operator and e1 on
/// the same radial grid.
class PtContext {
 public:
  explicit PtContext(double alpha, std::shared_ptr<const pt::InternalGrid> grid = nullptr,
                     pt::ScfOptions scf = {});

  double alpha() const { return alpha_; }
  double e1() const { return pekar_.energy; }
  const pekar::PekarResult& pekar() const { return pekar_; }
  const pt::TwoBodyOperator& op() const { return *op_; }
  std::shared_ptr<const pt::InternalGrid> grid() const { return grid_; }
  const pt::ScfOptions& scf_options() const { return scf_; }

  pt::BipolaronResult solve(double u, const std::optional<pt::BipolaronState>& initial = {}) const;

 private:
  double alpha_;
  std::shared_ptr<const pt::InternalGrid> grid_;
  std::unique_ptr<pt::TwoBodyOperator> op_;
  pt::ScfOptions scf_;
  pekar::PekarResult pekar_;
};

BindingReport binding_energy(const PtContext& ctx, double u);
BindingReport binding_energy(double alpha, double u);
/// PIMC binding energy from independent N=1 and N=2 estimates.
BindingReport binding_energy_pimc(double alpha, double u, const pimc::SamplerOptions& opts);
BindingReport binding_from_estimates(const pimc::PimcEstimate& one, const pimc::PimcEstimate& two);

/// min over splits of E(n) + E(N - n) for N = 2, 3 from e1 and e2.
double breakup_energy(int n, double e1, double e2);

struct ScanResult {
  double alpha = 0.0;
  std::vector<BindingReport> rows;
  double nu_c = 0.0;
  double u_low = 0.0;
  double u_high = 0.0;
  double tolerance = 0.0;
  bool has_critical = false;
};

/// Rows sorted by U; each row is an independent solve.
ScanResult scan_binding(const PtContext& ctx, std::vector<double> u_values);

/// Bisection of delta_e(U) > 1e-4 alpha^2 over nu = U / alpha in
/// [nu_low, nu_high] until the bracket is narrower than tol. Throws
/// BracketFailure when the ends do not straddle the transition.
ScanResult find_critical_ratio(const PtContext& ctx, double tol, double nu_low = 2.0,
                               double nu_high = 10.0);

struct RadiusRow {
  double u = 0.0;
  double inv_r12 = 0.0;
  double delta_e = 0.0;
  bool unbound = false;
};
std::vector<RadiusRow> radius_profile(const PtContext& ctx, std::vector<double> u_values);

struct DerivativeCheck {
  double u = 0.0;
  double finite_difference = 0.0;
  double inv_r12 = 0.0;
  double relative_error = 0.0;
};
/// Central difference of the one-center energy in U against <1/r12>.
DerivativeCheck feynman_hellmann(const PtContext& ctx, double u, double h);

/// Pairwise nonincrease of delta_e within tol; returns the offending index or -1.
int first_monotonicity_violation(const std::vector<BindingReport>& rows, double tol = 1e-6);

std::string csv_header();
std::string csv_row(const BindingReport& r);
std::string to_csv(const ScanResult& scan);

}  // namespace polaron::binding
