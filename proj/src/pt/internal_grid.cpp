#include "polaron/pt/internal_grid.hpp"

#include "polaron/error.hpp"

namespace polaron::pt {

std::shared_ptr<const InternalGrid> InternalGrid::build(double r_max, int n_r, int n_u) {
  if (n_u < 1) throw InvalidArgument("internal grid: n_u must be >= 1");
  auto g = std::make_shared<InternalGrid>();
  g->radial = core::make_grid(r_max, n_r);
  g->angular = core::gauss_legendre(n_u);
  return g;
}

std::shared_ptr<const InternalGrid> default_internal_grid(double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("internal grid: alpha must be positive");
  return InternalGrid::build(20.0 / alpha, 96, 16);
}

}  // namespace polaron::pt
