#pragma once

#include <span>
#include <vector>

#include "polaron/core/radial_field.hpp"

namespace polaron::core {

/// Coulomb potential (rho * |x|^-1)(r) of a spherical density, from Newton's
/// theorem: V(r) = 4 pi [ (1/r) int_0^r rho s^2 ds + int_r^{r_max} rho s ds ].
RadialField radial_hartree_potential(const RadialField& density);

/// Raw-array form of the potential, used inside the solvers.
std::vector<double> hartree_potential(const RadialGrid& grid, std::span<const double> rho);

/// Potential generating the symmetric discrete Coulomb form: the exact
/// gradient of D(rho, rho) / 2 divided by the quadrature weights. Agrees with
/// hartree_potential to quadrature accuracy; the solvers use it so that their
/// energy descent is consistent with the discrete functional.
std::vector<double> variational_potential(const RadialGrid& grid, std::span<const double> rho);

/// D(rho1, rho2) = double integral of rho1(x) rho2(y) / |x - y|, exactly
/// symmetric in its arguments.
double coulomb_double_integral(const RadialField& rho1, const RadialField& rho2);

/// 4 pi int f g r^2 dr.
double radial_inner(const RadialGrid& grid, std::span<const double> f, std::span<const double> g);

}  // namespace polaron::core
