#include "polaron/pimc/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "polaron/error.hpp"

namespace polaron::pimc {

std::vector<double> chebyshev_schedule(double alpha, int points) {
  if (points < 2) throw InvalidArgument("schedule needs at least two points");
  const int n = points - 1;
  std::vector<double> out(points);
  for (int k = 0; k <= n; ++k) out[k] = 0.5 * alpha * (1.0 - std::cos(std::numbers::pi * k / n));
  out.front() = 0.0;
  out.back() = alpha;
  return out;
}

std::vector<double> clenshaw_curtis_weights(double alpha, int points) {
  if (points < 2) throw InvalidArgument("schedule needs at least two points");
  const int n = points - 1;
  std::vector<double> w(points, 0.0);
  for (int k = 0; k <= n; ++k) {
    const double theta = std::numbers::pi * k / n;
    double s = 0.0;
    for (int j = 1; j <= n / 2; ++j) {
      const double b = (2 * j == n) ? 1.0 : 2.0;
      s += b * std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
    }
    const double c = (k == 0 || k == n) ? 1.0 : 2.0;
    w[k] = c / n * (1.0 - s);
  }
  for (double& v : w) v *= 0.5 * alpha;
  return w;
}

std::uint64_t derive_seed(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

CouplingPoint summarize(const PathEnsemble& e, double coupling) {
  CouplingPoint c;
  c.alpha = coupling;
  const BlockStats st = e.action();
  c.action = st.mean;
  c.stderr = st.stderr;
  if (!e.block_repulsion.empty()) c.repulsion = block_statistics(e.block_repulsion).mean;
  c.autocorrelation_time = e.action_curve.autocorrelation_time;
  c.plateau = e.action_curve.plateau;
  c.acceptance = e.acceptance;
  c.tuning_ok = e.tuning_ok;
  c.action_drift = e.action_drift;
  return c;
}

}  // namespace

PimcEstimate estimate_energy(double alpha, double u, int n_particles, const SamplerOptions& opts,
                             int schedule_points) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
  if (!(u >= 0.0)) throw InvalidArgument("u must be nonnegative");
  if (n_particles < 1 || n_particles > 2) throw UnsupportedN("sampling supports one or two particles");
  validate(opts);
  PimcEstimate est;
  est.alpha = alpha;
  est.repulsion_u = u;
  est.n_particles = n_particles;
  est.options = opts;
  if (alpha == 0.0) {
    est.schedule = {0.0};
    return est;
  }
  est.schedule = chebyshev_schedule(alpha, schedule_points);
  const auto weights = clenshaw_curtis_weights(alpha, schedule_points);
  const int n = schedule_points;
  est.points.resize(n);
  // The zero-coupling chain still carries the repulsion when u > 0.
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < n; ++k) {
    SamplerOptions o = opts;
    o.seed = derive_seed(opts.seed, k);
    const PathEnsemble e = sample_paths(est.schedule[k], u, n_particles, o);
    est.points[k] = summarize(e, est.schedule[k]);
  }
  double integral = 0.0, var = 0.0, trapezoid = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto& c = est.points[k];
    est.action_drift = std::max(est.action_drift, c.action_drift);
    integral += weights[k] * c.action;
    var += weights[k] * weights[k] * c.stderr * c.stderr;
    if (k > 0) {
      const auto& b = est.points[k - 1];
      trapezoid += 0.5 * (c.alpha - b.alpha) * (c.action + b.action);
    }
    if (!c.plateau) est.insufficient_statistics = true;
    if (!c.tuning_ok) est.tuning_ok = false;
  }
  est.energy = -integral;
  est.stderr = std::sqrt(var);
  est.quadrature_error = std::abs(integral - trapezoid);
  return est;
}

PimcEstimate estimate_oscillator(double v, const SamplerOptions& opts) {
  if (!(v > 0.0)) throw InvalidArgument("oscillator strength must be positive");
  SamplerOptions o = opts;
  o.oscillator = v;
  const PathEnsemble e = sample_paths(0.0, 0.0, 1, o);
  // Exact time-step factor of the discretized harmonic chain.
  const double dt = o.period / o.slices;
  const double factor = std::sqrt(1.0 + v * dt * dt);
  std::vector<double> energy(e.block_radius2.size());
  for (size_t b = 0; b < energy.size(); ++b) energy[b] = 2.0 * v * e.block_radius2[b];
  const BlockStats raw = block_statistics(energy);
  for (double& x : energy) x *= factor;
  const BlockStats st = block_statistics(energy);
  PimcEstimate est;
  est.raw_energy = raw.mean;
  est.options = o;
  est.schedule = {0.0};
  est.energy = st.mean;
  est.stderr = st.stderr;
  CouplingPoint c = summarize(e, 0.0);
  c.plateau = e.radius2_curve.plateau;
  c.autocorrelation_time = e.radius2_curve.autocorrelation_time;
  est.points = {c};
  est.insufficient_statistics = !c.plateau;
  est.tuning_ok = c.tuning_ok;
  return est;
}

CrossCheck cross_validate_with_pt(const PimcEstimate& estimate, double upper) {
  CrossCheck c;
  c.margin = upper + 2.0 * estimate.stderr - estimate.energy;
  c.pass = c.margin >= 0.0;
  return c;
}

}  // namespace polaron::pimc
