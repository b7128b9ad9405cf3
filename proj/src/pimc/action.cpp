#include "polaron/pimc/action.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polaron/core/quadrature.hpp"
#include "polaron/error.hpp"
#include "row_kernel.hpp"

namespace polaron::pimc {

Paths::Paths(int n_particles, double period, int slices)
    : n_particles_(n_particles), slices_(slices), period_(period) {
  if (n_particles < 1 || n_particles > 2) throw UnsupportedN("paths support one or two particles");
  if (slices < 8) throw InvalidArgument("need at least 8 slices");
  if (!(period > 0.0)) throw InvalidArgument("period must be positive");
  data_.assign(static_cast<size_t>(n_particles) * 3 * slices, 0.0);
}

Eigen::Vector3d Paths::position(int p, int k) const {
  return {axis(p, 0)[k], axis(p, 1)[k], axis(p, 2)[k]};
}

void Paths::set_position(int p, int k, const Eigen::Vector3d& r) {
  for (int d = 0; d < 3; ++d) axis(p, d)[k] = r[d];
}

void Paths::translate(int p, const Eigen::Vector3d& shift) {
  for (int d = 0; d < 3; ++d) {
    double* x = axis(p, d);
    for (int k = 0; k < slices_; ++k) x[k] += shift[d];
  }
}

namespace {

// int_{t0}^{t1} hat(tau) e^{-tau} sqrt(s/tau) dtau with tau = v^2.
double singular_piece(double t0, double t1, double s, double centre, double h) {
  static const core::QuadratureRule gl = core::gauss_legendre(32);
  const double v0 = std::sqrt(t0), v1 = std::sqrt(t1);
  const double mid = 0.5 * (v0 + v1), half = 0.5 * (v1 - v0);
  double sum = 0.0;
  for (size_t q = 0; q < gl.nodes.size(); ++q) {
    const double v = mid + half * gl.nodes[q];
    const double tau = v * v;
    const double hat = std::max(0.0, 1.0 - std::abs(tau - centre) / h);
    sum += gl.weights[q] * hat * std::exp(-tau);
  }
  return 2.0 * std::sqrt(s) * half * sum;
}

}  // namespace

ActionKernel::ActionKernel(double period, int slices, KernelKind kind)
    : slices_(slices), dt_(period / slices), kind_(kind) {
  if (slices < 8) throw InvalidArgument("need at least 8 slices");
  if (!(period > 0.0)) throw InvalidArgument("period must be positive");
  const int m_count = slices;
  const double h = dt_;
  std::vector<double> self_lag(m_count), cross_lag(m_count);
  for (int m = 0; m < m_count; ++m) {
    const int l = std::min(m, m_count - m);
    cross_lag[m] = h * h * std::exp(-l * h);
    if (m == 0) {
      self_lag[m] = 0.0;
    } else if (kind == KernelKind::plain) {
      self_lag[m] = cross_lag[m];
    } else {
      const double centre = l * h;
      double c = singular_piece((l - 1) * h, centre, centre, centre, h);
      if (2 * l == m_count)
        c *= 2.0;
      else
        c += singular_piece(centre, (l + 1) * h, centre, centre, h);
      self_lag[m] = h * c;
    }
  }
  if (kind == KernelKind::corrected) {
    // Free-particle value <1/|x(t+tau) - x(t)|> = 1/sqrt(pi tau) on the first interval.
    static const core::QuadratureRule gl = core::gauss_legendre(32);
    const double v1 = std::sqrt(h);
    double sum = 0.0;
    for (size_t q = 0; q < gl.nodes.size(); ++q) {
      const double v = 0.5 * v1 * (1.0 + gl.nodes[q]);
      sum += gl.weights[q] * (1.0 - v * v / h) * std::exp(-v * v);
    }
    const double c0 = 2.0 / std::sqrt(std::numbers::pi) * 0.5 * v1 * sum;
    self_constant_ = period * c0;
  }
  self_.resize(2 * m_count);
  cross_.resize(2 * m_count);
  for (int k = 0; k < 2 * m_count; ++k) {
    self_[k] = self_lag[k % m_count];
    cross_[k] = cross_lag[k % m_count];
  }
}

namespace {

double capped_inverse(double dx, double dy, double dz, double cap) {
  return 1.0 / std::max(std::sqrt(dx * dx + dy * dy + dz * dz), cap);
}

void check_kernel(const Paths& paths, const ActionKernel& kernel) {
  if (paths.slices() != kernel.slices() || std::abs(paths.dt() - kernel.dt()) > 1e-14 * kernel.dt())
    throw GridMismatch("kernel and paths use different slicings");
}

}  // namespace

ActionParts action_interaction_reference(const Paths& paths, const ActionKernel& kernel) {
  check_kernel(paths, kernel);
  const int m = paths.slices();
  const double cap = kernel.cap();
  ActionParts out;
  for (int p = 0; p < paths.n_particles(); ++p) {
    const double *x = paths.axis(p, 0), *y = paths.axis(p, 1), *z = paths.axis(p, 2);
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        out.self += kernel.self_lag(b - a) * capped_inverse(x[a] - x[b], y[a] - y[b], z[a] - z[b], cap);
    out.self += kernel.self_constant();
  }
  if (paths.n_particles() == 2) {
    const double *x1 = paths.axis(0, 0), *y1 = paths.axis(0, 1), *z1 = paths.axis(0, 2);
    const double *x2 = paths.axis(1, 0), *y2 = paths.axis(1, 1), *z2 = paths.axis(1, 2);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const int lag = (b - a + m) % m;
        out.cross += kernel.cross_lag(lag) *
                     capped_inverse(x1[a] - x2[b], y1[a] - y2[b], z1[a] - z2[b], cap);
      }
      out.repulsion += paths.dt() * capped_inverse(x1[a] - x2[a], y1[a] - y2[a], z1[a] - z2[a], cap);
    }
  }
  return out;
}

ActionParts action_interaction(const Paths& paths, const ActionKernel& kernel) {
  check_kernel(paths, kernel);
  const int m = paths.slices();
  const double cap = kernel.cap();
  double self = 0.0, cross = 0.0, repulsion = 0.0;
  const int n = paths.n_particles();
#pragma omp parallel
  {
    std::vector<double> row(m);
#pragma omp for reduction(+ : self, cross, repulsion) schedule(static)
    for (int a = 0; a < m; ++a) {
      for (int p = 0; p < n; ++p) {
        const double *x = paths.axis(p, 0), *y = paths.axis(p, 1), *z = paths.axis(p, 2);
        self += 0.5 * detail::inverse_row(x[a], y[a], z[a], x, y, z, m, cap, kernel.self_row(a),
                                          nullptr, row.data());
      }
      if (n == 2) {
        const double *x1 = paths.axis(0, 0), *y1 = paths.axis(0, 1), *z1 = paths.axis(0, 2);
        cross += detail::inverse_row(x1[a], y1[a], z1[a], paths.axis(1, 0), paths.axis(1, 1),
                                     paths.axis(1, 2), m, cap, kernel.cross_row(a), nullptr,
                                     row.data());
        repulsion += paths.dt() * row[a];
      }
    }
  }
  return {self + n * kernel.self_constant(), cross, repulsion};
}

double kinetic_action(const Paths& paths) {
  const int m = paths.slices();
  double s = 0.0;
  for (int p = 0; p < paths.n_particles(); ++p)
    for (int d = 0; d < 3; ++d) {
      const double* x = paths.axis(p, d);
      for (int k = 0; k < m; ++k) {
        const double dx = x[(k + 1) % m] - x[k];
        s += dx * dx;
      }
    }
  return s / (4.0 * paths.dt());
}

double kernel_time_integral(double period, int slices) {
  if (slices < 1 || !(period > 0.0)) throw InvalidArgument("bad slicing");
  const double h = period / slices;
  double s = 0.0;
  for (int m = 0; m < slices; ++m) s += std::exp(-std::min(m, slices - m) * h);
  return h * s;
}

}  // namespace polaron::pimc
