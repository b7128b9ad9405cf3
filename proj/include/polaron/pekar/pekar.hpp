#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "polaron/core/radial_field.hpp"

namespace polaron::pekar {

struct EnergyParts {
  double energy;
  double kinetic;
  double attraction;  // D(psi^2, psi^2)
};

/// Pekar functional T[psi] - beta D(psi^2, psi^2) for a normalized radial psi.
EnergyParts pekar_energy(const core::RadialField& psi, double beta);

/// Unconstrained gradient of the functional with respect to the nodal values of psi.
std::vector<double> pekar_gradient(const core::RadialField& psi, double beta);

struct PekarOptions {
  double tol = 1e-8;
  long max_iterations = 50000;
  bool record_trace = false;
  /// Starting guess; defaults to exp(-beta r).
  std::optional<core::RadialField> initial;
};

struct PekarResult {
  double beta = 1.0;
  double energy = 0.0;
  double kinetic = 0.0;
  double attraction = 0.0;
  double chemical_potential = 0.0;
  core::RadialField psi;
  double residual = 0.0;
  long iterations = 0;
  std::vector<double> energy_trace;
};

/// Minimize the Pekar functional on the sphere ||psi|| = 1 by preconditioned
/// projected gradient descent with energy backtracking. The outermost node is
/// a Dirichlet boundary. Throws NoConvergence if the cap is hit.
PekarResult solve_pekar(double beta, std::shared_ptr<const core::RadialGrid> grid, const PekarOptions& opts = {});

/// Default grid for the Pekar problem at coupling 1: r_max = 40, 2000 nodes.
/// The minimizer has a Coulomb tail (potential ~ -2/r), so r_max = 20 would
/// still cost about 1e-5 in the energy.
std::shared_ptr<const core::RadialGrid> default_pekar_grid();

/// Pekar constant C_P = -min of the functional at beta = 1.
double pekar_constant(std::shared_ptr<const core::RadialGrid> grid, const PekarOptions& opts = {});

/// Solve at coupling beta on the default grid rescaled by 1/beta.
PekarResult solve_pekar_scaled(double beta, const PekarOptions& opts = {});

/// Energy of the optimal Gaussian trial, -beta^2 / (3 pi).
double gaussian_trial_energy(double beta);

}  // namespace polaron::pekar
