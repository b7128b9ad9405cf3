#pragma once

#include <memory>

#include "polaron/core/quadrature.hpp"
#include "polaron/core/radial_field.hpp"

namespace polaron::pt {

/// Grid for rotation-invariant two-electron states psi(r1, r2, u), u = cos theta_12.
/// Both radii share one RadialGrid; u uses Gauss-Legendre nodes.
struct InternalGrid {
  std::shared_ptr<const core::RadialGrid> radial;
  core::QuadratureRule angular;

  static std::shared_ptr<const InternalGrid> build(double r_max, int n_r, int n_u);

  std::size_t n_r() const noexcept { return radial->size(); }
  std::size_t n_u() const noexcept { return angular.nodes.size(); }
};

/// Default internal grid at coupling alpha: r_max = 20 / alpha, 96 radial nodes, 16 angular nodes.
std::shared_ptr<const InternalGrid> default_internal_grid(double alpha);

}  // namespace polaron::pt
