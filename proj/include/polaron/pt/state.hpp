#pragma once

#include <memory>
#include <vector>

#include "polaron/core/radial_field.hpp"
#include "polaron/pt/internal_grid.hpp"

namespace polaron::pt {

/// Exchange-symmetric two-electron state on an InternalGrid. Only r1 <= r2
/// is stored, so psi(r1, r2, u) = psi(r2, r1, u) holds exactly.
class BipolaronState {
 public:
  BipolaronState() = default;
  explicit BipolaronState(std::shared_ptr<const InternalGrid> grid);

  /// Sample f(r1, r2, u); the symmetric part is stored.
  template <class F>
  static BipolaronState sample(std::shared_ptr<const InternalGrid> grid, F&& f) {
    BipolaronState s(std::move(grid));
    const auto r = s.grid_->radial->nodes();
    const auto& u = s.grid_->angular.nodes;
    for (std::size_t i = 0; i < s.n_r_; ++i)
      for (std::size_t j = i; j < s.n_r_; ++j)
        for (std::size_t k = 0; k < s.n_u_; ++k)
          s.ref(i, j, k) = 0.5 * (f(r[i], r[j], u[k]) + f(r[j], r[i], u[k]));
    return s;
  }

  /// Product state phi(r1) phi(r2).
  static BipolaronState product(std::shared_ptr<const InternalGrid> grid, const core::RadialField& phi);

  const std::shared_ptr<const InternalGrid>& grid() const noexcept { return grid_; }
  double at(std::size_t i, std::size_t j, std::size_t k) const noexcept { return values_[index(i, j, k)]; }
  double& ref(std::size_t i, std::size_t j, std::size_t k) noexcept { return values_[index(i, j, k)]; }
  bool symmetric() const noexcept { return true; }

  /// 8 pi^2 int psi^2 r1^2 r2^2 dr1 dr2 du.
  double norm() const;
  void scale(double factor) noexcept;

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    if (i > j) std::swap(i, j);
    return (i * (2 * n_r_ - i + 1) / 2 + (j - i)) * n_u_ + k;
  }

  std::shared_ptr<const InternalGrid> grid_;
  std::size_t n_r_ = 0;
  std::size_t n_u_ = 0;
  std::vector<double> values_;
};

BipolaronState normalize(const BipolaronState& state);

/// rho(x) = 2 int |psi(x, y)|^2 dy as a radial density with norm 2.
core::RadialField density_from_state(const BipolaronState& state);

}  // namespace polaron::pt
