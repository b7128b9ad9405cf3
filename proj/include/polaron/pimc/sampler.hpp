#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "polaron/pimc/action.hpp"
#include "polaron/pimc/blocking.hpp"

namespace polaron::pimc {

struct SamplerOptions {
  double period = 32.0;
  int slices = 512;
  long sweeps = 200000;
  double burn_fraction = 0.25;
  int blocks = 32;
  std::uint64_t seed = 1;
  /// Strength v of an external v * int |x|^2 dt term (oscillator validation).
  double oscillator = 0.0;
  KernelKind kernel = KernelKind::corrected;
  bool tune = true;
  double step = 0.3;
  int bridge_length = 8;
  double shift = 0.5;
  int recompute_interval = 1000;
  bool keep_trace = false;
};

/// Throws InvalidArgument on undersized settings.
void validate(const SamplerOptions& opts);

struct Acceptance {
  double slice = 0.0;
  double bridge = 0.0;
  double shift = 0.0;
};

/// Metropolis chain over T-periodic paths with weight
/// exp(-S_kin + alpha A - u B - v int |x|^2).
class PathSampler {
 public:
  PathSampler(double alpha, double u, int n_particles, const SamplerOptions& opts,
              std::uint64_t seed);

  void sweep();
  /// Rescale step sizes from the acceptance seen since the last call.
  void tune();

  double attraction() const { return attraction_; }
  double repulsion() const { return repulsion_; }
  double potential() const { return potential_; }
  /// Rebuilds the distance caches; returns the largest change of a tracked total.
  double recompute();

  const Paths& paths() const { return paths_; }
  const ActionKernel& kernel() const { return kernel_; }
  /// Mean |x_{k+1} - x_k|^2 and mean |x_k|^2 over slices and particles.
  double link_mean() const;
  double radius2_mean() const;

  Acceptance acceptance() const;
  void reset_acceptance();
  double step() const { return step_; }
  int bridge_length() const { return bridge_length_; }
  double shift_step() const { return shift_; }
  void set_step(double step) { step_ = step; }
  void set_bridge_length(int length);

  void slice_move(int p, int a);
  void bridge_move(int p, int start);
  void shift_move(int p);

 private:
  double slice_delta(int p, int a, const Eigen::Vector3d& rn, const Eigen::Vector3d& r,
                     double& d_cross, double& d_rep) const;

  double alpha_, u_, v_;
  Paths paths_;
  ActionKernel kernel_;
  std::mt19937_64 rng_;
  double step_;
  int bridge_length_;
  double shift_;
  double attraction_ = 0.0, repulsion_ = 0.0, potential_ = 0.0;
  std::vector<double> row_, saved_;
  long tried_[3] = {0, 0, 0}, taken_[3] = {0, 0, 0};
};

/// Block averages of one equilibrated chain.
struct PathEnsemble {
  Paths paths;
  std::uint64_t rng_seed = 0;
  double alpha = 0.0;
  double repulsion_u = 0.0;
  std::vector<double> block_action;     // <A>/T
  std::vector<double> block_repulsion;  // <B>/T
  std::vector<double> block_link;       // <|x_{k+1} - x_k|^2>
  std::vector<double> block_radius2;    // <|x_k|^2>
  std::vector<double> trace;            // A/T per measured sweep when kept
  BlockingCurve action_curve;
  BlockingCurve radius2_curve;
  Acceptance acceptance;
  double step = 0.0;
  int bridge_length = 0;
  bool tuning_ok = true;
  double action_drift = 0.0;
  long sweeps = 0;

  BlockStats action() const { return block_statistics(block_action); }
};

PathEnsemble sample_paths(double alpha, double u, int n_particles, const SamplerOptions& opts);

}  // namespace polaron::pimc
