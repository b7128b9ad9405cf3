#pragma once

#include <vector>

#include "polaron/pimc/sampler.hpp"

namespace polaron::pimc {

/// n Chebyshev-Lobatto couplings on [0, alpha], ascending.
std::vector<double> chebyshev_schedule(double alpha, int points);
/// Clenshaw-Curtis weights matching chebyshev_schedule.
std::vector<double> clenshaw_curtis_weights(double alpha, int points);

struct CouplingPoint {
  double alpha = 0.0;
  double action = 0.0;  // <A>/T
  double stderr = 0.0;
  double repulsion = 0.0;  // <B>/T, the time-averaged 1/|x1 - x2|
  double autocorrelation_time = 0.0;
  bool plateau = false;
  Acceptance acceptance;
  bool tuning_ok = true;
  double action_drift = 0.0;
};

struct PimcEstimate {
  double alpha = 0.0;
  double repulsion_u = 0.0;
  int n_particles = 1;
  double energy = 0.0;
  double stderr = 0.0;
  double quadrature_error = 0.0;
  /// Oscillator mode: 2v<|x|^2> before the time-step factor sqrt(1 + v dt^2).
  double raw_energy = 0.0;
  double action_drift = 0.0;
  std::vector<double> schedule;
  std::vector<CouplingPoint> points;
  bool insufficient_statistics = false;
  bool tuning_ok = true;
  SamplerOptions options;
};

/// E(alpha, u) = -int_0^alpha <A>_a / T da by coupling-constant integration,
/// with E(0, u) = 0. Couplings run in parallel; each uses its own seed.
PimcEstimate estimate_energy(double alpha, double u, int n_particles, const SamplerOptions& opts,
                             int schedule_points = 8);

/// Oscillator validation: ground energy of -Laplacian + v|x|^2 from
/// 2v<|x|^2> sqrt(1 + v dt^2), exact for the discretized chain at large T.
PimcEstimate estimate_oscillator(double v, const SamplerOptions& opts);

struct CrossCheck {
  bool pass = false;
  double margin = 0.0;  // upper + 2 stderr - energy
};

/// Upper-bound comparison E_pimc <= upper + 2 stderr.
CrossCheck cross_validate_with_pt(const PimcEstimate& estimate, double upper);

/// Per-coupling seed derived from the base seed.
std::uint64_t derive_seed(std::uint64_t seed, int index);

}  // namespace polaron::pimc
