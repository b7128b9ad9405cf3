#pragma once

#include <optional>
#include <vector>

#include "polaron/core/params.hpp"
#include "polaron/core/radial_field.hpp"
#include "polaron/pt/state.hpp"
#include "polaron/pt/two_body.hpp"

namespace polaron::pt {

struct PtEnergy {
  double energy;
  double kinetic;
  double repulsion_expect;  // <1/|x-y|>
  double attraction;        // D(rho, rho)
};

/// Pekar-Tomasevich functional T + U <1/r12> - alpha D(rho, rho) of a normalized state.
PtEnergy pt_energy(const BipolaronState& state, const core::CouplingParams& params);
PtEnergy pt_energy(const TwoBodyOperator& op, const Eigen::VectorXd& x, const core::CouplingParams& params);

double expectation_inv_r12(const BipolaronState& state);

struct InnerOptions {
  double tol = 1e-7;
  long max_iterations = 5000;
  std::optional<BipolaronState> initial;
};

struct InnerResult {
  BipolaronState state;
  double eigenvalue = 0.0;
  double residual = 0.0;
  long iterations = 0;
};

/// Lowest exchange-symmetric eigenstate of -Lap_x - Lap_y + V(x) + V(y) + u/|x-y|.
InnerResult inner_ground_state(const core::RadialField& potential, double u_repulsion,
                               std::shared_ptr<const InternalGrid> grid, const InnerOptions& opts = {});

/// Preconditioned block-1 LOBPCG on the scaled vector, in place. Returns
/// (eigenvalue, residual, iterations) through the result fields.
struct InnerStats {
  double eigenvalue;
  double residual;
  long iterations;
};
InnerStats lowest_eigenpair(const TwoBodyOperator& op, std::span<const double> potential, double u,
                            Eigen::VectorXd& x, double tol, long max_iterations);

struct ScfOptions {
  /// Bound on sup|rho_new - rho_old| / sup|rho_new|.
  double tol = 1e-8;
  double mixing = 0.3;
  /// Anderson history length on top of linear mixing; 0 gives plain mixing.
  long history = 6;
  long max_iterations = 1000;
  /// Inner residual at coupling 1; scaled by alpha^2.
  double inner_tol = 1e-7;
  std::optional<BipolaronState> initial;
  /// At U = 0 compare with twice the Pekar solution at coupling 2 alpha on the same radial grid.
  bool self_test = true;
};

struct BipolaronResult {
  core::CouplingParams params;
  double energy = 0.0;
  double kinetic = 0.0;
  double repulsion_expect = 0.0;
  double attraction = 0.0;
  core::RadialField density;
  BipolaronState state;
  long scf_iterations = 0;
  double scf_residual = 0.0;
  long inner_iterations = 0;
  double final_mixing = 0.0;
  /// False when Anderson extrapolation was dropped after energy increases.
  bool accelerated = true;
  /// Energies of the accepted outer iterations.
  std::vector<double> energy_trace;
  /// |E - 2 E_Pekar(2 alpha)| / |E| when the U = 0 self-test ran, else negative.
  double self_test_deviation = -1.0;
};

BipolaronResult scf_minimize(const core::CouplingParams& params, std::shared_ptr<const InternalGrid> grid,
                             const ScfOptions& opts = {});
/// Reuses a prebuilt operator (the expensive part for repeated solves on one grid).
BipolaronResult scf_minimize(const core::CouplingParams& params, const TwoBodyOperator& op,
                             const ScfOptions& opts = {});

/// Energy of the product state phi(r1) phi(r2).
PtEnergy product_energy(const core::RadialField& phi, const core::CouplingParams& params,
                        std::shared_ptr<const InternalGrid> grid);

}  // namespace polaron::pt
