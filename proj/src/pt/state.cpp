#include "polaron/pt/state.hpp"

#include <cmath>
#include <numbers>

#include "polaron/error.hpp"

namespace polaron::pt {

BipolaronState::BipolaronState(std::shared_ptr<const InternalGrid> grid)
    : grid_(std::move(grid)), n_r_(grid_->n_r()), n_u_(grid_->n_u()) {
  values_.assign(n_r_ * (n_r_ + 1) / 2 * n_u_, 0.0);
}

BipolaronState BipolaronState::product(std::shared_ptr<const InternalGrid> grid, const core::RadialField& phi) {
  if (!phi.grid->same_as(*grid->radial)) throw GridMismatch("product state: orbital on a different grid");
  BipolaronState s(std::move(grid));
  for (std::size_t i = 0; i < s.n_r_; ++i)
    for (std::size_t j = i; j < s.n_r_; ++j)
      for (std::size_t k = 0; k < s.n_u_; ++k) s.ref(i, j, k) = phi.values[i] * phi.values[j];
  return s;
}

double BipolaronState::norm() const {
  const auto w = grid_->radial->weights();
  const auto& wu = grid_->angular.weights;
  double s = 0.0;
  for (std::size_t i = 0; i < n_r_; ++i) {
    for (std::size_t j = i; j < n_r_; ++j) {
      const double pair = (i == j ? 1.0 : 2.0) * w[i] * w[j];
      for (std::size_t k = 0; k < n_u_; ++k) {
        const double v = at(i, j, k);
        s += pair * wu[k] * v * v;
      }
    }
  }
  return 8.0 * std::numbers::pi * std::numbers::pi * s;
}

void BipolaronState::scale(double factor) noexcept {
  for (auto& v : values_) v *= factor;
}

BipolaronState normalize(const BipolaronState& state) {
  const double n = state.norm();
  if (!(n > 1e-300) || !std::isfinite(n)) throw DegenerateInput("bipolaron state: norm vanishes");
  BipolaronState out = state;
  out.scale(1.0 / std::sqrt(n));
  return out;
}

core::RadialField density_from_state(const BipolaronState& state) {
  if (std::abs(state.norm() - 1.0) > 1e-6) throw InvalidArgument("density_from_state: state is not normalized");
  const auto& g = *state.grid();
  const auto w = g.radial->weights();
  const auto& wu = g.angular.weights;
  const std::size_t n = g.n_r();
  std::vector<double> rho(n, 0.0);
  // rho(r_i) = 2 * 2 pi * int r2^2 dr2 du psi^2
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < g.n_u(); ++k) {
        const double v = state.at(i, j, k);
        s += w[j] * wu[k] * v * v;
      }
    rho[i] = 4.0 * std::numbers::pi * s;
  }
  return core::RadialField::density(g.radial, std::move(rho), 2.0);
}

}  // namespace polaron::pt
