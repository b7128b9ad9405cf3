#pragma once

#include <Eigen/Core>
#include <vector>

namespace polaron::pimc {

/// T-periodic discretized paths, one per particle. Coordinates are stored
/// per particle and axis so each axis of a path is contiguous.
class Paths {
 public:
  Paths() = default;
  Paths(int n_particles, double period, int slices);

  int n_particles() const { return n_particles_; }
  int slices() const { return slices_; }
  double period() const { return period_; }
  double dt() const { return period_ / slices_; }

  double* axis(int p, int d) { return data_.data() + (p * 3 + d) * slices_; }
  const double* axis(int p, int d) const { return data_.data() + (p * 3 + d) * slices_; }

  Eigen::Vector3d position(int p, int k) const;
  void set_position(int p, int k, const Eigen::Vector3d& r);
  void translate(int p, const Eigen::Vector3d& shift);

  bool operator==(const Paths&) const = default;

 private:
  int n_particles_ = 0;
  int slices_ = 0;
  double period_ = 0.0;
  std::vector<double> data_;
};

enum class KernelKind {
  // Lag weights integrate e^{-tau} against a free-particle local profile;
  // the equal-time contribution enters as a path-independent constant.
  corrected,
  // Plain product trapezoid with the equal-time term dropped.
  plain,
};

/// Discretized retarded kernel on a periodic slice grid.
class ActionKernel {
 public:
  ActionKernel(double period, int slices, KernelKind kind = KernelKind::corrected);

  int slices() const { return slices_; }
  double dt() const { return dt_; }
  double cap() const { return dt_; }
  KernelKind kind() const { return kind_; }

  /// Weights W(a, b) for b = 0..M-1 of the self term sum_{a<b} W/|x_a - x_b|.
  const double* self_row(int a) const { return self_.data() + (slices_ - a); }
  /// Weights V(a, b) of the cross term sum_{a,b} V/|x1_a - x2_b|.
  const double* cross_row(int a) const { return cross_.data() + (slices_ - a); }
  double self_lag(int m) const { return self_[slices_ + m]; }
  double cross_lag(int m) const { return cross_[slices_ + m]; }
  /// Path-independent part of the self term, per particle.
  double self_constant() const { return self_constant_; }

 private:
  int slices_;
  double dt_;
  KernelKind kind_;
  std::vector<double> self_;   // doubled: index M + (b - a)
  std::vector<double> cross_;
  double self_constant_ = 0.0;
};

struct ActionParts {
  double self = 0.0;
  double cross = 0.0;
  double repulsion = 0.0;

  double attraction() const { return self + cross; }
};

/// Interaction functionals of the paths: attraction A (self plus cross
/// terms) and repulsion B = sum_{i<j} int dt/|x_i - x_j|. OpenMP parallel.
ActionParts action_interaction(const Paths& paths, const ActionKernel& kernel);
/// Serial double loop over slice pairs.
ActionParts action_interaction_reference(const Paths& paths, const ActionKernel& kernel);

/// sum_k |x_{k+1} - x_k|^2 / (4 dt) summed over particles.
double kinetic_action(const Paths& paths);

/// Periodic trapezoid value of int e^{-|t - s|} ds over one period.
double kernel_time_integral(double period, int slices);

}  // namespace polaron::pimc
