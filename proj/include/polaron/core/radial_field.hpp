#pragma once

#include <memory>
#include <vector>

#include "polaron/core/radial_grid.hpp"

namespace polaron::core {

enum class FieldKind { wavefunction, density, potential };

/// Spherically symmetric function sampled on a RadialGrid.
///
/// Wavefunctions are normalized by 4 pi int psi^2 r^2 dr = 1, densities by
/// 4 pi int rho r^2 dr = norm_target.
struct RadialField {
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> values;
  FieldKind kind = FieldKind::wavefunction;
  double norm_target = 1.0;

  static RadialField wavefunction(std::shared_ptr<const RadialGrid> grid, std::vector<double> values);
  static RadialField density(std::shared_ptr<const RadialGrid> grid, std::vector<double> values,
                             double norm_target);

  /// Sample a callable at the grid nodes.
  template <class F>
  static RadialField sample(std::shared_ptr<const RadialGrid> grid, F&& f, FieldKind kind,
                            double norm_target = 1.0) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->nodes()[i]);
    return RadialField{std::move(grid), std::move(v), kind, norm_target};
  }

  /// 4 pi int values^2 r^2 dr for wavefunctions, 4 pi int values r^2 dr otherwise.
  double norm() const;
};

std::shared_ptr<const RadialGrid> make_grid(double r_max, int n_points);

RadialField normalize(const RadialField& field);

/// rho = n * psi^2 for a normalized wavefunction psi.
RadialField density_of(const RadialField& psi, double particles = 1.0);

}  // namespace polaron::core
