#include "polaron/core/radial_field.hpp"

#include <cmath>
#include <numbers>

#include "polaron/error.hpp"

namespace polaron::core {

RadialField RadialField::wavefunction(std::shared_ptr<const RadialGrid> grid, std::vector<double> values) {
  if (values.size() != grid->size()) throw GridMismatch("wavefunction: size does not match grid");
  return RadialField{std::move(grid), std::move(values), FieldKind::wavefunction, 1.0};
}

RadialField RadialField::density(std::shared_ptr<const RadialGrid> grid, std::vector<double> values,
                                 double norm_target) {
  if (values.size() != grid->size()) throw GridMismatch("density: size does not match grid");
  return RadialField{std::move(grid), std::move(values), FieldKind::density, norm_target};
}

double RadialField::norm() const {
  const auto w = grid->weights();
  double s = 0.0;
  if (kind == FieldKind::wavefunction) {
    for (std::size_t i = 0; i < values.size(); ++i) s += w[i] * values[i] * values[i];
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) s += w[i] * values[i];
  }
  return 4.0 * std::numbers::pi * s;
}

std::shared_ptr<const RadialGrid> make_grid(double r_max, int n_points) {
  return std::make_shared<const RadialGrid>(RadialGrid::build(r_max, n_points));
}

RadialField normalize(const RadialField& field) {
  if (field.kind == FieldKind::potential) throw InvalidArgument("normalize: potentials have no norm");
  if (field.kind == FieldKind::density) {
    for (double v : field.values)
      if (v < 0.0) throw InvalidArgument("normalize: density has negative values");
  }
  const double n = field.norm();
  if (!(n > 1e-300) || !std::isfinite(n)) throw DegenerateInput("normalize: field norm vanishes");
  RadialField out = field;
  const double scale = field.kind == FieldKind::wavefunction ? 1.0 / std::sqrt(n) : field.norm_target / n;
  for (auto& v : out.values) v *= scale;
  return out;
}

RadialField density_of(const RadialField& psi, double particles) {
  if (psi.kind != FieldKind::wavefunction) throw InvalidArgument("density_of: expected a wavefunction");
  std::vector<double> rho(psi.values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = particles * psi.values[i] * psi.values[i];
  return RadialField::density(psi.grid, std::move(rho), particles);
}

}  // namespace polaron::core
