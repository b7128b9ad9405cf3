#include "polaron/pimc/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "polaron/error.hpp"
#include "row_kernel.hpp"

namespace polaron::pimc {

void validate(const SamplerOptions& o) {
  if (!(o.period >= 16.0)) throw InvalidArgument("period T must be at least 16");
  if (o.slices < 8 || o.slices < 8.0 * o.period - 1e-9)
    throw InvalidArgument("need at least 8 slices per unit time");
  if (o.sweeps < 1000) throw InvalidArgument("need at least 1000 sweeps");
  if (!(o.burn_fraction >= 0.0 && o.burn_fraction < 1.0))
    throw InvalidArgument("burn fraction must lie in [0, 1)");
  if (o.blocks < 2) throw InvalidArgument("need at least two blocks");
  const long measured = o.sweeps - static_cast<long>(o.sweeps * o.burn_fraction);
  if (measured < o.blocks) throw InvalidArgument("fewer measured sweeps than blocks");
  if (!(o.oscillator >= 0.0)) throw InvalidArgument("oscillator strength must be nonnegative");
  if (!(o.step > 0.0) || !(o.shift > 0.0)) throw InvalidArgument("step sizes must be positive");
  if (o.recompute_interval < 1) throw InvalidArgument("recompute interval must be positive");
}

namespace {

double sq(double v) { return v * v; }

}  // namespace

PathSampler::PathSampler(double alpha, double u, int n_particles, const SamplerOptions& opts,
                         std::uint64_t seed)
    : alpha_(alpha),
      u_(u),
      v_(opts.oscillator),
      paths_(n_particles, opts.period, opts.slices),
      kernel_(opts.period, opts.slices, opts.kernel),
      rng_(seed),
      step_(opts.step),
      bridge_length_(2),
      shift_(opts.shift) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
  if (!(u >= 0.0)) throw InvalidArgument("u must be nonnegative");
  if (!(opts.oscillator >= 0.0)) throw InvalidArgument("oscillator strength must be nonnegative");
  set_bridge_length(opts.bridge_length);
  const int m = paths_.slices();
  const double h = paths_.dt();
  std::normal_distribution<double> normal;
  for (int p = 0; p < n_particles; ++p) {
    const Eigen::Vector3d origin(p, 0.0, 0.0);
    paths_.set_position(p, 0, origin);
    Eigen::Vector3d prev = origin;
    for (int k = 1; k < m; ++k) {
      const double rem = m - k + 1;
      Eigen::Vector3d r = prev + (origin - prev) / rem;
      const double sd = std::sqrt(2.0 * h * (rem - 1.0) / rem);
      for (int d = 0; d < 3; ++d) r[d] += sd * normal(rng_);
      paths_.set_position(p, k, r);
      prev = r;
    }
  }
  row_.resize(m);
  recompute();
}

void PathSampler::set_bridge_length(int length) {
  bridge_length_ = std::clamp(length, 2, std::max(2, paths_.slices() / 4));
}

double PathSampler::recompute() {
  const int m = paths_.slices();
  const int n = paths_.n_particles();
  const double cap = kernel_.cap();
  const double h = paths_.dt();
  double self = 0.0, cross = 0.0, rep = 0.0, pot = 0.0;
  for (int p = 0; p < n; ++p) {
    const double *x = paths_.axis(p, 0), *y = paths_.axis(p, 1), *z = paths_.axis(p, 2);
    for (int a = 0; a < m; ++a) {
      self += 0.5 * detail::inverse_row(x[a], y[a], z[a], x, y, z, m, cap, kernel_.self_row(a),
                                        nullptr, row_.data());
      pot += sq(x[a]) + sq(y[a]) + sq(z[a]);
    }
    self += kernel_.self_constant();
  }
  if (n == 2) {
    const double *x = paths_.axis(0, 0), *y = paths_.axis(0, 1), *z = paths_.axis(0, 2);
    for (int a = 0; a < m; ++a) {
      cross += detail::inverse_row(x[a], y[a], z[a], paths_.axis(1, 0), paths_.axis(1, 1),
                                   paths_.axis(1, 2), m, cap, kernel_.cross_row(a), nullptr,
                                   row_.data());
      rep += h * row_[a];
    }
  }
  pot *= v_ * h;
  const double drift = std::max({std::abs(self + cross - attraction_), std::abs(rep - repulsion_),
                                 std::abs(pot - potential_)});
  attraction_ = self + cross;
  repulsion_ = rep;
  potential_ = pot;
  return drift;
}

// Change of the self term when slice a of particle p moves from r to rn,
// with cross and repulsion changes returned through the references.
double PathSampler::slice_delta(int p, int a, const Eigen::Vector3d& rn, const Eigen::Vector3d& r,
                                double& d_cross, double& d_rep) const {
  const int m = paths_.slices();
  const double cap = kernel_.cap();
  const double d_self = detail::inverse_row_delta(rn.data(), r.data(), paths_.axis(p, 0),
                                                  paths_.axis(p, 1), paths_.axis(p, 2), m, cap,
                                                  kernel_.self_row(a));
  d_cross = 0.0;
  d_rep = 0.0;
  if (paths_.n_particles() == 2) {
    const int q = 1 - p;
    const double *x = paths_.axis(q, 0), *y = paths_.axis(q, 1), *z = paths_.axis(q, 2);
    d_cross = detail::inverse_row_delta(rn.data(), r.data(), x, y, z, m, cap, kernel_.cross_row(a));
    d_rep = paths_.dt() * (detail::capped_inverse(rn[0] - x[a], rn[1] - y[a], rn[2] - z[a], cap) -
                           detail::capped_inverse(r[0] - x[a], r[1] - y[a], r[2] - z[a], cap));
  }
  return d_self;
}

void PathSampler::slice_move(int p, int a) {
  const int m = paths_.slices();
  const double h = paths_.dt();
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const Eigen::Vector3d r = paths_.position(p, a);
  const Eigen::Vector3d rn(r[0] + step_ * uni(rng_), r[1] + step_ * uni(rng_), r[2] + step_ * uni(rng_));
  const Eigen::Vector3d prev = paths_.position(p, (a + m - 1) % m);
  const Eigen::Vector3d next = paths_.position(p, (a + 1) % m);
  const double d_kin = ((rn - prev).squaredNorm() + (next - rn).squaredNorm() -
                        (r - prev).squaredNorm() - (next - r).squaredNorm()) /
                       (4.0 * h);
  double d_cross, d_rep;
  const double d_self = slice_delta(p, a, rn, r, d_cross, d_rep);
  const double d_pot = v_ * h * (rn.squaredNorm() - r.squaredNorm());
  const double log_w = -d_kin + alpha_ * (d_self + d_cross) - u_ * d_rep - d_pot;
  ++tried_[0];
  if (log_w < 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) >= std::exp(log_w)) return;
  ++taken_[0];
  paths_.set_position(p, a, rn);
  attraction_ += d_self + d_cross;
  repulsion_ += d_rep;
  potential_ += d_pot;
}

void PathSampler::bridge_move(int p, int start) {
  const int m = paths_.slices();
  const int len = bridge_length_;
  const int inner = len - 1;
  const double h = paths_.dt();
  std::normal_distribution<double> normal;
  saved_.resize(3 * inner);
  auto slice = [&](int k) { return (start + k) % m; };

  // Regrow the segment from the free bridge, accumulating the change one slice at a time.
  const Eigen::Vector3d end = paths_.position(p, slice(len));
  Eigen::Vector3d prev = paths_.position(p, start);
  double d_att = 0.0, d_rep = 0.0, d_pot = 0.0;
  for (int k = 1; k <= inner; ++k) {
    const Eigen::Vector3d old = paths_.position(p, slice(k));
    for (int d = 0; d < 3; ++d) saved_[3 * (k - 1) + d] = old[d];
    const double rem = len - k + 1;
    Eigen::Vector3d r = prev + (end - prev) / rem;
    const double sd = std::sqrt(2.0 * h * (rem - 1.0) / rem);
    for (int d = 0; d < 3; ++d) r[d] += sd * normal(rng_);
    double dc, dr;
    d_att += slice_delta(p, slice(k), r, old, dc, dr) + dc;
    d_rep += dr;
    d_pot += r.squaredNorm() - old.squaredNorm();
    paths_.set_position(p, slice(k), r);
    prev = r;
  }
  d_pot *= v_ * h;

  const double log_w = alpha_ * d_att - u_ * d_rep - d_pot;
  ++tried_[1];
  if (log_w < 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) >= std::exp(log_w)) {
    for (int k = 1; k <= inner; ++k)
      paths_.set_position(p, slice(k),
                          {saved_[3 * (k - 1)], saved_[3 * (k - 1) + 1], saved_[3 * (k - 1) + 2]});
    return;
  }
  ++taken_[1];
  attraction_ += d_att;
  repulsion_ += d_rep;
  potential_ += d_pot;
}

void PathSampler::shift_move(int p) {
  const int m = paths_.slices();
  const double h = paths_.dt();
  const double cap = kernel_.cap();
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const Eigen::Vector3d delta(shift_ * uni(rng_), shift_ * uni(rng_), shift_ * uni(rng_));
  double d_pot = 0.0, d_cross = 0.0, d_rep = 0.0;
  const double *x = paths_.axis(p, 0), *y = paths_.axis(p, 1), *z = paths_.axis(p, 2);
  for (int a = 0; a < m; ++a) {
    const Eigen::Vector3d r(x[a], y[a], z[a]);
    const Eigen::Vector3d rn(x[a] + delta[0], y[a] + delta[1], z[a] + delta[2]);
    d_pot += rn.squaredNorm() - r.squaredNorm();
    if (paths_.n_particles() == 2) {
      const int q = 1 - p;
      const double *xq = paths_.axis(q, 0), *yq = paths_.axis(q, 1), *zq = paths_.axis(q, 2);
      d_cross += detail::inverse_row_delta(rn.data(), r.data(), xq, yq, zq, m, cap,
                                           kernel_.cross_row(a));
      d_rep += h * (detail::capped_inverse(rn[0] - xq[a], rn[1] - yq[a], rn[2] - zq[a], cap) -
                    detail::capped_inverse(r[0] - xq[a], r[1] - yq[a], r[2] - zq[a], cap));
    }
  }
  d_pot *= v_ * h;
  const double log_w = alpha_ * d_cross - u_ * d_rep - d_pot;
  ++tried_[2];
  if (log_w < 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) >= std::exp(log_w)) return;
  ++taken_[2];
  paths_.translate(p, delta);
  attraction_ += d_cross;
  repulsion_ += d_rep;
  potential_ += d_pot;
}

void PathSampler::sweep() {
  const int m = paths_.slices();
  const int n = paths_.n_particles();
  for (int p = 0; p < n; ++p)
    for (int a = 0; a < m; ++a) slice_move(p, a);
  std::uniform_int_distribution<int> start(0, m - 1);
  const int bridges = std::max(1, m / (4 * bridge_length_));
  for (int p = 0; p < n; ++p)
    for (int k = 0; k < bridges; ++k) bridge_move(p, start(rng_));
  const int p = n == 2 ? std::uniform_int_distribution<int>(0, 1)(rng_) : 0;
  shift_move(p);
}

Acceptance PathSampler::acceptance() const {
  auto rate = [&](int k) { return tried_[k] ? static_cast<double>(taken_[k]) / tried_[k] : 0.0; };
  return {rate(0), rate(1), rate(2)};
}

void PathSampler::reset_acceptance() {
  for (int k = 0; k < 3; ++k) tried_[k] = taken_[k] = 0;
}

void PathSampler::tune() {
  const Acceptance acc = acceptance();
  if (tried_[0]) step_ *= std::clamp(acc.slice / 0.4, 0.5, 2.0);
  if (tried_[1]) {
    const int delta = std::max(1, bridge_length_ / 4);
    if (acc.bridge > 0.5) set_bridge_length(bridge_length_ + delta);
    if (acc.bridge < 0.3) set_bridge_length(bridge_length_ - delta);
  }
  if (tried_[2] && (paths_.n_particles() == 2 || v_ > 0.0))
    shift_ = std::min(shift_ * std::clamp(acc.shift / 0.4, 0.5, 2.0), paths_.period());
  reset_acceptance();
}

double PathSampler::link_mean() const {
  const int m = paths_.slices();
  double s = 0.0;
  for (int p = 0; p < paths_.n_particles(); ++p)
    for (int d = 0; d < 3; ++d) {
      const double* x = paths_.axis(p, d);
      for (int k = 0; k < m; ++k) s += sq(x[(k + 1) % m] - x[k]);
    }
  return s / (m * paths_.n_particles());
}

double PathSampler::radius2_mean() const {
  const int m = paths_.slices();
  double s = 0.0;
  for (int p = 0; p < paths_.n_particles(); ++p)
    for (int d = 0; d < 3; ++d) {
      const double* x = paths_.axis(p, d);
      for (int k = 0; k < m; ++k) s += x[k] * x[k];
    }
  return s / (m * paths_.n_particles());
}

PathEnsemble sample_paths(double alpha, double u, int n_particles, const SamplerOptions& opts) {
  validate(opts);
  PathSampler chain(alpha, u, n_particles, opts, opts.seed);
  const long burn = static_cast<long>(opts.sweeps * opts.burn_fraction);
  const long measured = opts.sweeps - burn;
  PathEnsemble out;
  out.rng_seed = opts.seed;
  out.alpha = alpha;
  out.repulsion_u = u;
  out.sweeps = opts.sweeps;
  for (long s = 0; s < burn; ++s) {
    chain.sweep();
    if (opts.tune && (s + 1) % 100 == 0) chain.tune();
    if ((s + 1) % opts.recompute_interval == 0)
      out.action_drift = std::max(out.action_drift, chain.recompute());
  }
  chain.reset_acceptance();
  std::vector<double> action(measured), rep(measured), link(measured), rad(measured);
  const double period = opts.period;
  for (long s = 0; s < measured; ++s) {
    chain.sweep();
    if ((s + 1) % opts.recompute_interval == 0)
      out.action_drift = std::max(out.action_drift, chain.recompute());
    action[s] = chain.attraction() / period;
    rep[s] = chain.repulsion() / period;
    link[s] = chain.link_mean();
    rad[s] = chain.radius2_mean();
  }
  out.block_action = block_means(action, opts.blocks);
  out.block_repulsion = block_means(rep, opts.blocks);
  out.block_link = block_means(link, opts.blocks);
  out.block_radius2 = block_means(rad, opts.blocks);
  out.action_curve = blocking_curve(action);
  out.radius2_curve = blocking_curve(rad);
  out.acceptance = chain.acceptance();
  out.step = chain.step();
  out.bridge_length = chain.bridge_length();
  out.tuning_ok = out.acceptance.slice >= 0.2 && out.acceptance.slice <= 0.6;
  out.paths = chain.paths();
  if (opts.keep_trace) out.trace = std::move(action);
  return out;
}

}  // namespace polaron::pimc
