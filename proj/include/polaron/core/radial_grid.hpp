#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <span>
#include <vector>

namespace polaron::core {

/// Radial grid on (0, r_max] built from equal finite elements, each carrying
/// Gauss-Lobatto nodes of a fixed polynomial order. Interior element
/// boundaries are shared ("bridge") nodes; the origin is not a node, r_max is.
///
/// The node values of u(r) = r psi(r) define a continuous piecewise polynomial;
/// kinetic energy and cumulative integrals act on that interpolant, while
/// plain integrals use the lumped Lobatto weights.
class RadialGrid {
 public:
  static constexpr int kOrder = 8;                  // polynomial degree per element
  static constexpr int kElementPoints = kOrder + 1;  // Lobatto points per element

  /// n_points is rounded up to a multiple of kOrder.
  static RadialGrid build(double r_max, int n_points);

  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  int n_elements() const noexcept { return n_elements_; }
  double element_width() const noexcept { return r_max_ / n_elements_; }

  std::span<const double> nodes() const noexcept { return nodes_; }
  /// Weights for the integral of f(r) r^2 dr over (0, r_max].
  std::span<const double> weights() const noexcept { return weights_; }
  /// Weights for the integral of f(r) dr over (0, r_max].
  std::span<const double> line_weights() const noexcept { return line_weights_; }

  /// Integral from 0 to each node of the interpolant of f. `f_origin` is the
  /// value at r = 0, which is not a grid node.
  std::vector<double> cumulative_from_origin(std::span<const double> f, double f_origin = 0.0) const;
  /// Transpose of cumulative_from_origin (with f_origin = 0) as a linear map.
  std::vector<double> cumulative_from_origin_adjoint(std::span<const double> y) const;
  /// Integral from each node to r_max of the interpolant of f.
  std::vector<double> cumulative_to_end(std::span<const double> f, double f_origin = 0.0) const;

  /// Stiffness matrix K_ij = int chi_i' chi_j' dr for the nodal basis of
  /// u = r psi with u(0) = 0. Exact for the interpolant (degree 2*kOrder - 2).
  Eigen::SparseMatrix<double> kinetic_matrix() const;

  /// Interpolate nodal values (with value `f_origin` at r = 0) at radius r.
  double interpolate(std::span<const double> f, double r, double f_origin = 0.0) const;

  /// Same node layout on (0, r_max / factor]. Used for exact coupling rescaling.
  RadialGrid scaled(double factor) const;

  bool same_as(const RadialGrid& other) const noexcept {
    return r_max_ == other.r_max_ && nodes_.size() == other.nodes_.size();
  }

 private:
  RadialGrid() = default;

  // global index of local node q in element e; -1 is the origin
  static long global_index(int e, int q) noexcept { return static_cast<long>(e) * kOrder + q - 1; }

  double r_max_ = 0.0;
  int n_elements_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> line_weights_;
  std::array<double, kElementPoints> ref_nodes_{};
  std::array<double, kElementPoints> ref_weights_{};
  // derivative_[q][m] = l_m'(x_q); integration_[q][m] = int_{-1}^{x_q} l_m
  std::array<std::array<double, kElementPoints>, kElementPoints> derivative_{};
  std::array<std::array<double, kElementPoints>, kElementPoints> integration_{};
};

}  // namespace polaron::core
