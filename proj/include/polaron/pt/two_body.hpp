#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "polaron/pt/state.hpp"

namespace polaron::pt {

/// Discretized two-electron operator -Lap_x - Lap_y + V(x) + V(y) + U/|x-y|
/// on an InternalGrid, acting on the scaled vector
///   x_ijk = sqrt(8 pi^2 W_i W_j w_k) r_i r_j psi_ijk
/// over the free radial nodes (all but r_max) and the angular nodes. In x the
/// state norm is Euclidean. Layout: index (i * n + j) * n_u + k.
class TwoBodyOperator {
 public:
  explicit TwoBodyOperator(std::shared_ptr<const InternalGrid> grid);

  const std::shared_ptr<const InternalGrid>& grid() const noexcept { return grid_; }
  std::size_t n_free() const noexcept { return n_; }
  std::size_t n_u() const noexcept { return nu_; }
  std::size_t dim() const noexcept { return n_ * n_ * nu_; }

  Eigen::VectorXd to_vector(const BipolaronState& state) const;
  /// Back to a state; the exchange-symmetric part is kept.
  BipolaronState to_state(const Eigen::VectorXd& x) const;

  /// y = H x, with `potential` given on the radial nodes. OpenMP over rows.
  void apply(const Eigen::VectorXd& x, std::span<const double> potential, double u, Eigen::VectorXd& y) const;
  /// Same operator by plain loops, single-threaded.
  void apply_reference(const Eigen::VectorXd& x, std::span<const double> potential, double u,
                       Eigen::VectorXd& y) const;

  double kinetic_form(const Eigen::VectorXd& x) const;
  /// <1/|x-y|> for a normalized x.
  double repulsion_form(const Eigen::VectorXd& x) const;
  /// Radial density (norm 2 for a normalized x) on all radial nodes.
  std::vector<double> density(const Eigen::VectorXd& x) const;

  /// out = (T + sigma)^-1 r with T the kinetic part; sigma > -lowest_kinetic().
  void precondition(const Eigen::VectorXd& r, double sigma, Eigen::VectorXd& out) const;
  /// Lowest eigenvalue of the discrete kinetic operator (both particles).
  double lowest_kinetic() const noexcept { return 2.0 * eig_[0][0]; }

  /// Product-integration weight replacing 1/max(r_i, r_j) for multipole L.
  double radial_kernel(int L, std::size_t i, std::size_t j) const { return kernel_[L](i, j); }

 private:
  std::size_t pair(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return i * (2 * n_ - i + 1) / 2 + (j - i);
  }
  void build_kinetic();
  void build_repulsion();

  std::shared_ptr<const InternalGrid> grid_;
  std::size_t n_;
  std::size_t nu_;
  std::vector<double> scale_r_;   // sqrt(W_i) r_i
  std::vector<double> scale_u_;   // sqrt(w_k)
  std::vector<double> inv_r2_;
  Eigen::MatrixXd S_;              // W^-1/2 K W^-1/2 on free nodes
  Eigen::MatrixXd legendre_;       // orthogonal DVR -> Legendre transform
  Eigen::MatrixXd angular_;        // T^T diag(l(l+1)) T
  std::vector<Eigen::MatrixXd> basis_;  // eigenvectors of S + l(l+1)/r^2 per l
  std::vector<Eigen::VectorXd> eig_;
  std::vector<Eigen::MatrixXd> kernel_;  // per L, n x n
  std::vector<double> pair_rep_;         // packed pairs, n_u x n_u each
};

}  // namespace polaron::pt
