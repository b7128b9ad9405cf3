#pragma once

#include "polaron/error.hpp"

namespace polaron::core {

/// Physical inputs: phonon coupling, Coulomb repulsion and particle count.
struct CouplingParams {
  double alpha = 1.0;
  double repulsion_u = 0.0;
  int n_particles = 1;

  void validate() const {
    if (!(alpha > 0.0)) throw ValidationError("alpha", "must be positive");
    if (!(repulsion_u >= 0.0)) throw ValidationError("u", "must be nonnegative");
    if (n_particles < 1 || n_particles > 3) throw ValidationError("n", "must be 1, 2 or 3");
  }
};

}  // namespace polaron::core
