#include "polaron/core/radial_grid.hpp"

#include <algorithm>
#include <cmath>

#include "polaron/core/quadrature.hpp"
#include "polaron/error.hpp"

namespace polaron::core {

RadialGrid RadialGrid::build(double r_max, int n_points) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InvalidArgument("radial grid: r_max must be positive");
  if (n_points < 16) throw InvalidArgument("radial grid: n_points must be >= 16");

  RadialGrid g;
  g.r_max_ = r_max;
  g.n_elements_ = (n_points + kOrder - 1) / kOrder;

  const auto lob = gauss_lobatto(kElementPoints);
  std::copy(lob.nodes.begin(), lob.nodes.end(), g.ref_nodes_.begin());
  std::copy(lob.weights.begin(), lob.weights.end(), g.ref_weights_.begin());

  // Lagrange derivative matrix on the Lobatto nodes (barycentric form).
  std::array<double, kElementPoints> bary{};
  for (int j = 0; j < kElementPoints; ++j) {
    double prod = 1.0;
    for (int k = 0; k < kElementPoints; ++k)
      if (k != j) prod *= g.ref_nodes_[j] - g.ref_nodes_[k];
    bary[j] = 1.0 / prod;
  }
  for (int i = 0; i < kElementPoints; ++i) {
    double diag = 0.0;
    for (int j = 0; j < kElementPoints; ++j) {
      if (i == j) continue;
      const double d = bary[j] / bary[i] / (g.ref_nodes_[i] - g.ref_nodes_[j]);
      g.derivative_[i][j] = d;
      diag -= d;
    }
    g.derivative_[i][i] = diag;
  }

  // integration_[q][m] = int_{-1}^{x_q} l_m(x) dx, exact with 8 Gauss points
  const std::vector<double> ref(g.ref_nodes_.begin(), g.ref_nodes_.end());
  const auto gl = gauss_legendre(kElementPoints);
  for (int q = 0; q < kElementPoints; ++q) {
    const double a = -1.0;
    const double b = g.ref_nodes_[q];
    for (auto& v : g.integration_[q]) v = 0.0;
    if (q == 0) continue;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double x = 0.5 * (b - a) * gl.nodes[k] + 0.5 * (b + a);
      const auto l = lagrange_basis(ref, x);
      for (int m = 0; m < kElementPoints; ++m) g.integration_[q][m] += 0.5 * (b - a) * gl.weights[k] * l[m];
    }
  }

  const std::size_t n = static_cast<std::size_t>(g.n_elements_) * kOrder;
  g.nodes_.assign(n, 0.0);
  g.line_weights_.assign(n, 0.0);
  const double h = r_max / g.n_elements_;
  for (int e = 0; e < g.n_elements_; ++e) {
    const double a = e * h;
    for (int q = 1; q < kElementPoints; ++q) {
      const long gi = global_index(e, q);
      g.nodes_[gi] = a + 0.5 * h * (g.ref_nodes_[q] + 1.0);
      g.line_weights_[gi] += 0.5 * h * g.ref_weights_[q];
      if (q == kOrder && e + 1 < g.n_elements_) g.line_weights_[gi] += 0.5 * h * g.ref_weights_[0];
    }
  }
  g.nodes_.back() = r_max;
  g.weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.weights_[i] = g.line_weights_[i] * g.nodes_[i] * g.nodes_[i];
  return g;
}

std::vector<double> RadialGrid::cumulative_from_origin(std::span<const double> f, double f_origin) const {
  if (f.size() != size()) throw GridMismatch("cumulative_from_origin: size mismatch");
  std::vector<double> out(size());
  const double half = 0.5 * element_width();
  double start = 0.0;
  std::array<double, kElementPoints> local{};
  for (int e = 0; e < n_elements_; ++e) {
    for (int q = 0; q < kElementPoints; ++q) {
      const long gi = global_index(e, q);
      local[q] = gi < 0 ? f_origin : f[gi];
    }
    double last = 0.0;
    for (int q = 1; q < kElementPoints; ++q) {
      double c = 0.0;
      for (int m = 0; m < kElementPoints; ++m) c += integration_[q][m] * local[m];
      last = start + half * c;
      out[global_index(e, q)] = last;
    }
    start = last;
  }
  return out;
}

std::vector<double> RadialGrid::cumulative_from_origin_adjoint(std::span<const double> y) const {
  if (y.size() != size()) throw GridMismatch("cumulative_from_origin_adjoint: size mismatch");
  std::vector<double> x(size(), 0.0);
  const double half = 0.5 * element_width();
  // later[e] = sum of y over nodes owned by elements after e
  double later = 0.0;
  for (int e = n_elements_ - 1; e >= 0; --e) {
    for (int m = 0; m < kElementPoints; ++m) {
      const long gm = global_index(e, m);
      if (gm < 0) continue;
      double c = integration_[kOrder][m] * later;
      for (int q = 1; q < kElementPoints; ++q) c += integration_[q][m] * y[global_index(e, q)];
      x[gm] += half * c;
    }
    for (int q = 1; q < kElementPoints; ++q) later += y[global_index(e, q)];
  }
  return x;
}

std::vector<double> RadialGrid::cumulative_to_end(std::span<const double> f, double f_origin) const {
  auto out = cumulative_from_origin(f, f_origin);
  const double total = out.back();
  for (auto& v : out) v = total - v;
  out.back() = 0.0;
  return out;
}

Eigen::SparseMatrix<double> RadialGrid::kinetic_matrix() const {
  const long n = static_cast<long>(size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n_elements_) * kElementPoints * kElementPoints);
  const double scale = 2.0 / element_width();
  for (int e = 0; e < n_elements_; ++e) {
    for (int m = 0; m < kElementPoints; ++m) {
      const long gm = global_index(e, m);
      if (gm < 0) continue;
      for (int k = 0; k < kElementPoints; ++k) {
        const long gk = global_index(e, k);
        if (gk < 0) continue;
        double s = 0.0;
        for (int q = 0; q < kElementPoints; ++q) s += ref_weights_[q] * derivative_[q][m] * derivative_[q][k];
        trip.emplace_back(gm, gk, scale * s);
      }
    }
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

double RadialGrid::interpolate(std::span<const double> f, double r, double f_origin) const {
  if (f.size() != size()) throw GridMismatch("interpolate: size mismatch");
  if (r <= 0.0) return f_origin;
  if (r >= r_max_) return f.back();
  const double h = element_width();
  const int e = std::min(n_elements_ - 1, static_cast<int>(r / h));
  const double x = 2.0 * (r - e * h) / h - 1.0;
  const std::vector<double> ref(ref_nodes_.begin(), ref_nodes_.end());
  const auto l = lagrange_basis(ref, x);
  double s = 0.0;
  for (int q = 0; q < kElementPoints; ++q) {
    const long gi = global_index(e, q);
    s += l[q] * (gi < 0 ? f_origin : f[gi]);
  }
  return s;
}

RadialGrid RadialGrid::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("radial grid: scale factor must be positive");
  return build(r_max_ / factor, static_cast<int>(size()));
}

}  // namespace polaron::core
