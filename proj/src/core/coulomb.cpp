#include "polaron/core/coulomb.hpp"

#include <numbers>

#include "polaron/error.hpp"

namespace polaron::core {

std::vector<double> hartree_potential(const RadialGrid& grid, std::span<const double> rho) {
  const auto r = grid.nodes();
  const std::size_t n = grid.size();
  if (rho.size() != n) throw GridMismatch("hartree_potential: size mismatch");
  std::vector<double> inner(n), outer(n);
  for (std::size_t i = 0; i < n; ++i) {
    inner[i] = rho[i] * r[i] * r[i];
    outer[i] = rho[i] * r[i];
  }
  const auto q = grid.cumulative_from_origin(inner);
  const auto p = grid.cumulative_to_end(outer);
  std::vector<double> v(n);
  constexpr double four_pi = 4.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) v[i] = four_pi * (q[i] / r[i] + p[i]);
  return v;
}

std::vector<double> variational_potential(const RadialGrid& grid, std::span<const double> rho) {
  const auto r = grid.nodes();
  const auto W = grid.line_weights();
  const std::size_t n = grid.size();
  auto v = hartree_potential(grid, rho);
  // adjoint part: A^T z with z = W r^2 rho, divided back by W r^2
  std::vector<double> z(n), zr(n);
  double zsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = W[i] * r[i] * r[i] * rho[i];
    zr[i] = z[i] / r[i];
    zsum += z[i];
  }
  const auto c1 = grid.cumulative_from_origin_adjoint(zr);
  const auto c2 = grid.cumulative_from_origin_adjoint(z);
  constexpr double four_pi = 4.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double at = four_pi * (r[i] * r[i] * c1[i] + r[i] * W[i] * zsum - r[i] * c2[i]);
    v[i] = 0.5 * (v[i] + at / (W[i] * r[i] * r[i]));
  }
  return v;
}

RadialField radial_hartree_potential(const RadialField& density) {
  if (density.kind != FieldKind::density) throw InvalidArgument("radial_hartree_potential: expected a density");
  return RadialField{density.grid, hartree_potential(*density.grid, density.values), FieldKind::potential, 0.0};
}

double radial_inner(const RadialGrid& grid, std::span<const double> f, std::span<const double> g) {
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * g[i];
  return 4.0 * std::numbers::pi * s;
}

double coulomb_double_integral(const RadialField& rho1, const RadialField& rho2) {
  if (rho1.kind != FieldKind::density || rho2.kind != FieldKind::density)
    throw InvalidArgument("coulomb_double_integral: expected densities");
  if (rho1.grid != rho2.grid && !rho1.grid->same_as(*rho2.grid))
    throw GridMismatch("coulomb_double_integral: densities live on different grids");
  const auto v2 = variational_potential(*rho2.grid, rho2.values);
  return radial_inner(*rho1.grid, rho1.values, v2);
}

}  // namespace polaron::core
