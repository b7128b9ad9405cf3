#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "polaron/error.hpp"
#include "polaron/pimc/estimate.hpp"

using namespace polaron;
using namespace polaron::pimc;

namespace {

constexpr double kPi = std::numbers::pi;

Paths random_paths(int n, double period, int slices, unsigned seed, double spread = 1.0) {
  Paths p(n, period, slices);
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, spread);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < slices; ++k)
      p.set_position(i, k, Eigen::Vector3d(normal(gen) + 2.0 * i, normal(gen), normal(gen)));
  return p;
}

Paths smooth_pair(double period, int slices) {
  Paths p(2, period, slices);
  for (int k = 0; k < slices; ++k) {
    const double t = 2.0 * kPi * k / slices;
    p.set_position(0, k, {0.5 * std::cos(t), 0.5 * std::sin(t), 0.1 * std::sin(2 * t)});
    p.set_position(1, k, {3.0 + 0.3 * std::sin(2 * t), 0.2 * std::cos(t), 0.4});
  }
  return p;
}

// E[1/max(r, c)] for a centred 3D Gaussian with per-axis deviation s.
double capped_gaussian_inverse(double s, double c) {
  const double u = c / (s * std::sqrt(2.0));
  const double g = std::sqrt(2.0 / kPi) * std::exp(-u * u);
  return g / s + (std::erf(u) - g * c / s) / c;
}

// <A>/T for free closed paths, exact for the discretized functional.
double free_action_oracle(const ActionKernel& k, double period) {
  const int m = k.slices();
  const double h = k.dt();
  double a = 0.0;
  for (int lag = 1; lag < m; ++lag) {
    const double s = std::sqrt(2.0 * h * lag * (m - lag) / m);
    a += 0.5 * m * k.self_lag(lag) * capped_gaussian_inverse(s, k.cap());
  }
  return (a + k.self_constant()) / period;
}

// Continuum value int_0^{T/2} e^{-t} / sqrt(pi t (1 - t/T)) dt, t = v^2, composite Simpson.
double free_action_continuum(double period) {
  const int n = 20000;
  const double vmax = std::sqrt(0.5 * period), hv = vmax / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double v = i * hv;
    const double f = 2.0 * std::exp(-v * v) / std::sqrt(kPi * (1.0 - v * v / period));
    s += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return s * hv / 3.0;
}

SamplerOptions quick(long sweeps, double period = 16.0, int slices = 128) {
  SamplerOptions o;
  o.period = period;
  o.slices = slices;
  o.sweeps = sweeps;
  return o;
}

}  // namespace

TEST_CASE("kernel normalization and weights") {
  const double t = 16.0;
  double prev_err = 0.0;
  for (int m : {128, 256, 512}) {
    const double err = kernel_time_integral(t, m) - 2.0 * (1.0 - std::exp(-t / 2));
    const double h = t / m;
    CHECK(std::abs(err) < h * h);
    if (prev_err != 0.0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.02));
    prev_err = err;
  }
  CHECK(kernel_time_integral(64.0, 1024) == doctest::Approx(2.0).epsilon(1e-3));

  const ActionKernel plain(16.0, 128, KernelKind::plain);
  const ActionKernel corr(16.0, 128);
  CHECK(plain.self_constant() == 0.0);
  CHECK(corr.self_constant() > 0.0);
  CHECK(plain.self_lag(0) == 0.0);
  CHECK(corr.self_lag(0) == 0.0);
  for (int lag = 1; lag < 128; ++lag) {
    CHECK(corr.self_lag(lag) == corr.self_lag(128 - lag));
    CHECK(plain.cross_lag(lag) == plain.cross_lag(128 - lag));
    const int l = std::min(lag, 128 - lag);
    // hat-function average of e^{-tau} adds h^2/12 on top of the local correction
    const double h = corr.dt();
    if (l >= 4 && l < 64)
      CHECK(std::abs(corr.self_lag(lag) / plain.self_lag(lag) - 1.0) < h * h / 8.0 + 1.0 / (l * l));
  }
  CHECK(corr.cross_row(5)[5] == corr.cross_lag(0));
  CHECK(corr.self_row(7)[10] == corr.self_lag(3));
  CHECK(corr.self_row(10)[7] == corr.self_lag(125));
  CHECK_THROWS_AS(ActionKernel(16.0, 4), InvalidArgument);
}

TEST_CASE("interaction action") {
  SUBCASE("parallel kernel matches the serial loop") {
    for (int n : {1, 2}) {
      const Paths p = random_paths(n, 16.0, 200, 7 + n);
      const ActionKernel k(16.0, 200);
      const auto a = action_interaction(p, k);
      const auto r = action_interaction_reference(p, k);
      CHECK(a.self == doctest::Approx(r.self).epsilon(1e-8));
      CHECK(a.cross == doctest::Approx(r.cross).epsilon(1e-8));
      CHECK(a.repulsion == doctest::Approx(r.repulsion).epsilon(1e-8));
      CHECK(r.self > 0.0);
      if (n == 1) CHECK(r.cross == 0.0);
    }
  }
  SUBCASE("pinned particles give -U T / d") {
    Paths p(2, 16.0, 128);
    for (int k = 0; k < 128; ++k) p.set_position(1, k, {0.0, 0.0, 2.5});
    const ActionKernel k(16.0, 128);
    CHECK(action_interaction_reference(p, k).repulsion == doctest::Approx(16.0 / 2.5).epsilon(1e-14));
    CHECK(action_interaction(p, k).repulsion == doctest::Approx(16.0 / 2.5).epsilon(1e-8));
    // cross term of static paths: (1/d) sum_{a,b} h^2 e^{-|t_a - t_b|}
    CHECK(action_interaction_reference(p, k).cross ==
          doctest::Approx(16.0 * kernel_time_integral(16.0, 128) / 2.5).epsilon(1e-12));
  }
  SUBCASE("static path and the kernel integral") {
    const Paths p(1, 32.0, 256);
    const ActionKernel k(32.0, 256, KernelKind::plain);
    const double h = k.dt();
    const double a = action_interaction_reference(p, k).self;
    CHECK(2.0 * h * a / 32.0 + h == doctest::Approx(kernel_time_integral(32.0, 256)).epsilon(1e-12));
    const ActionKernel c(32.0, 256);
    double w = 0.0;
    for (int lag = 1; lag < 256; ++lag) w += c.self_lag(lag);
    CHECK(action_interaction_reference(p, c).self ==
          doctest::Approx(0.5 * 256 * w / h + c.self_constant()).epsilon(1e-12));
  }
  SUBCASE("translation invariance") {
    Paths p = random_paths(2, 16.0, 128, 3);
    const ActionKernel k(16.0, 128);
    const auto before = action_interaction_reference(p, k);
    p.translate(0, {0.75, -1.25, 2.0});
    const auto one = action_interaction_reference(p, k);
    CHECK(one.self == doctest::Approx(before.self).epsilon(1e-12));
    p.translate(1, {0.75, -1.25, 2.0});
    const auto both = action_interaction_reference(p, k);
    CHECK(both.self == doctest::Approx(before.self).epsilon(1e-12));
    CHECK(both.cross == doctest::Approx(before.cross).epsilon(1e-12));
    CHECK(both.repulsion == doctest::Approx(before.repulsion).epsilon(1e-12));
  }
  SUBCASE("refinement of cross and repulsion terms on smooth paths") {
    const double t = 16.0;
    std::vector<ActionParts> v;
    for (int m : {128, 256, 512}) v.push_back(action_interaction_reference(smooth_pair(t, m), ActionKernel(t, m)));
    const double c1 = v[0].cross - v[1].cross, c2 = v[1].cross - v[2].cross;
    CHECK(std::abs(c2) < std::abs(c1) / 3.0);
    CHECK(c1 / c2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(std::abs(v[2].repulsion - v[1].repulsion) < 1e-10);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(Paths(3, 16.0, 128), UnsupportedN);
    CHECK_THROWS_AS(Paths(1, 16.0, 4), InvalidArgument);
    CHECK_THROWS_AS(action_interaction(Paths(1, 16.0, 128), ActionKernel(16.0, 256)), GridMismatch);
    CHECK_THROWS_AS(kernel_time_integral(0.0, 8), InvalidArgument);
  }
}

TEST_CASE("kinetic action") {
  Paths p(1, 16.0, 128);
  for (int k = 0; k < 128; ++k) p.set_position(0, k, {std::cos(2 * kPi * k / 128), 0.0, 0.0});
  // sum of squared chord lengths on the unit circle projection
  double s = 0.0;
  for (int k = 0; k < 128; ++k) {
    const double d = std::cos(2 * kPi * (k + 1) / 128) - std::cos(2 * kPi * k / 128);
    s += d * d;
  }
  CHECK(kinetic_action(p) == doctest::Approx(s / (4.0 * 0.125)).epsilon(1e-14));
}

TEST_CASE("sampler settings") {
  CHECK_THROWS_AS(validate(quick(2000, 8.0, 64)), InvalidArgument);
  CHECK_THROWS_AS(validate(quick(2000, 16.0, 100)), InvalidArgument);
  CHECK_THROWS_AS(validate(quick(500)), InvalidArgument);
  CHECK_NOTHROW(validate(quick(1000)));
  auto o = quick(2000);
  o.burn_fraction = 1.0;
  CHECK_THROWS_AS(validate(o), InvalidArgument);
  CHECK_THROWS_AS(PathSampler(-1.0, 0.0, 1, quick(2000), 1), InvalidArgument);
  CHECK_THROWS_AS(PathSampler(1.0, -1.0, 2, quick(2000), 1), InvalidArgument);
  CHECK_THROWS_AS(sample_paths(1.0, 0.0, 3, quick(2000)), UnsupportedN);
}

TEST_CASE("free paths") {
  const auto o = quick(20000);
  const auto e = sample_paths(0.0, 0.0, 1, o);
  const double dt = o.period / o.slices;
  const auto link = block_statistics(e.block_link);
  // closed free chain: 3 axes of variance 2 dt, less the loop constraint
  CHECK(std::abs(link.mean - 6.0 * dt * (1.0 - 1.0 / o.slices)) < 2.0 * link.stderr);
  const auto a = e.action();
  const ActionKernel k(o.period, o.slices);
  CHECK(std::abs(a.mean - free_action_oracle(k, o.period)) < 3.0 * a.stderr);
  CHECK(e.tuning_ok);
  CHECK(e.acceptance.slice >= 0.2);
  CHECK(e.acceptance.slice <= 0.6);
  CHECK(e.action_drift < 1e-10);
  CHECK(e.block_action.size() == 32);
}

TEST_CASE("discretized free action approaches the continuum") {
  for (double t : {16.0, 32.0}) {
    const int m = static_cast<int>(16 * t);
    const double cont = free_action_continuum(t);
    const double corrected = free_action_oracle(ActionKernel(t, m), t);
    const double plain = free_action_oracle(ActionKernel(t, m, KernelKind::plain), t);
    CHECK(std::abs(corrected - cont) < 2e-3);
    CHECK(std::abs(corrected - cont) < 0.1 * std::abs(plain - cont));
  }
  CHECK(free_action_continuum(400.0) == doctest::Approx(1.0 + 1.0 / 1600.0).epsilon(1e-5));
}

TEST_CASE("oscillator validation") {
  auto o = quick(40000, 16.0, 256);
  const auto est = estimate_oscillator(1.0, o);
  const double dt = o.period / o.slices;
  // exact discretized chain: 6 v <x^2>/3 summed over the normal modes
  double chain = 0.0;
  for (int k = 0; k < o.slices; ++k) chain += 1.0 / ((1.0 - std::cos(2 * kPi * k / o.slices)) / dt + 2.0 * dt);
  chain *= 6.0 / o.slices;
  CHECK(std::abs(est.raw_energy - chain) < 3.0 * est.stderr);
  CHECK(std::abs(est.energy - 3.0) < 2.0 * est.stderr);
  CHECK(est.stderr > 0.0);
  CHECK(est.stderr < 0.03);
  CHECK_THROWS_AS(estimate_oscillator(0.0, o), InvalidArgument);
}

TEST_CASE("determinism") {
  const auto o = quick(2000);
  const auto a = sample_paths(0.5, 0.3, 2, o);
  const auto b = sample_paths(0.5, 0.3, 2, o);
  CHECK(a.block_action == b.block_action);
  CHECK(a.block_repulsion == b.block_repulsion);
  CHECK(a.paths == b.paths);
  auto o2 = o;
  o2.seed = 2;
  CHECK(sample_paths(0.5, 0.3, 2, o2).block_action != a.block_action);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("tracked action stays exact") {
  SUBCASE("vanishing steps reproduce the current action") {
    PathSampler s(1.0, 0.5, 2, quick(2000), 11);
    for (int i = 0; i < 20; ++i) s.sweep();
    s.recompute();
    const double a0 = s.attraction(), b0 = s.repulsion();
    s.set_step(1e-13);
    s.reset_acceptance();
    for (int p = 0; p < 2; ++p)
      for (int a = 0; a < 128; ++a) s.slice_move(p, a);
    CHECK(s.acceptance().slice > 0.99);
    CHECK(std::abs(s.attraction() - a0) < 1e-12 * a0);
    CHECK(std::abs(s.repulsion() - b0) < 1e-12 * b0);
    CHECK(s.recompute() < 1e-12 * a0);
  }
  SUBCASE("long chain with every move kind") {
    auto o = quick(2000);
    o.oscillator = 0.3;
    PathSampler s(1.5, 0.7, 2, o, 5);
    for (int i = 0; i < 300; ++i) {
      s.sweep();
      if (i % 50 == 49) s.tune();
    }
    const double a = s.attraction();
    CHECK(s.recompute() < 1e-10 * a);
    const auto full = action_interaction_reference(s.paths(), s.kernel());
    CHECK(s.attraction() == doctest::Approx(full.attraction()).epsilon(1e-7));
    CHECK(s.repulsion() == doctest::Approx(full.repulsion).epsilon(1e-7));
  }
  SUBCASE("whole-path shift of one particle leaves its action unchanged") {
    PathSampler s(1.0, 0.0, 1, quick(2000), 9);
    for (int i = 0; i < 10; ++i) s.sweep();
    s.recompute();
    const double a = s.attraction();
    s.reset_acceptance();
    s.shift_move(0);
    CHECK(s.acceptance().shift == 1.0);
    CHECK(std::abs(s.attraction() - a) < 1e-12 * a);
    CHECK(s.recompute() < 1e-10 * a);
  }
}

TEST_CASE("blocking") {
  CHECK_THROWS_AS(block_statistics({1.0}), InvalidArgument);
  const auto st = block_statistics({1.0, 2.0, 3.0, 4.0});
  CHECK(st.mean == 2.5);
  CHECK(st.stderr == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  const auto bm = block_means({9.0, 1.0, 2.0, 3.0, 4.0}, 2);
  CHECK(bm == std::vector<double>{1.5, 3.5});
  CHECK_THROWS_AS(block_means({1.0}, 2), InvalidArgument);

  std::mt19937_64 gen(4);
  std::normal_distribution<double> normal;
  std::vector<double> iid(1 << 16), ar(1 << 16);
  const double rho = 0.9;
  double x = 0.0;
  for (size_t i = 0; i < iid.size(); ++i) {
    iid[i] = normal(gen);
    x = rho * x + std::sqrt(1 - rho * rho) * normal(gen);
    ar[i] = x;
  }
  const auto c1 = blocking_curve(iid);
  CHECK(c1.plateau);
  CHECK(c1.plateau_stderr == doctest::Approx(1.0 / 256.0).epsilon(0.25));
  const auto c2 = blocking_curve(ar);
  CHECK(c2.plateau);
  // AR(1): integrated time (1 + rho) / (2 (1 - rho)) = 9.5
  CHECK(c2.autocorrelation_time == doctest::Approx(9.5).epsilon(0.3));
  std::vector<double> drift(1 << 12);
  for (size_t i = 0; i < drift.size(); ++i) drift[i] = std::sin(i * 1e-3) + 0.01 * normal(gen);
  CHECK_FALSE(blocking_curve(drift).plateau);
}

TEST_CASE("integration schedule") {
  const auto s = chebyshev_schedule(0.8, 8);
  REQUIRE(s.size() == 8);
  CHECK(s.front() == 0.0);
  CHECK(s.back() == 0.8);
  for (size_t k = 1; k < s.size(); ++k) CHECK(s[k] > s[k - 1]);
  const auto w = clenshaw_curtis_weights(0.8, 8);
  for (int p = 0; p <= 7; ++p) {
    double q = 0.0;
    for (int k = 0; k < 8; ++k) q += w[k] * std::pow(s[k], p);
    CHECK(q == doctest::Approx(std::pow(0.8, p + 1) / (p + 1)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(chebyshev_schedule(1.0, 1), InvalidArgument);
}

TEST_CASE("energy estimates") {
  SUBCASE("zero coupling") {
    const auto e = estimate_energy(0.0, 0.0, 1, quick(2000));
    CHECK(e.energy == 0.0);
    CHECK(e.schedule == std::vector<double>{0.0});
    const auto c = cross_validate_with_pt(e, 0.0);
    CHECK(c.pass);
    CHECK(c.margin == 0.0);
  }
  SUBCASE("weak-coupling bracket") {
    const double alpha = 0.25;
    const auto e = estimate_energy(alpha, 0.0, 1, quick(10000, 32.0, 512));
    CHECK(e.stderr > 0.0);
    CHECK(e.energy <= -alpha + 2.0 * e.stderr);
    CHECK(e.energy >= -alpha - alpha * alpha / 3.0 - 2.0 * e.stderr);
    CHECK_FALSE(e.insufficient_statistics);
    CHECK(e.tuning_ok);
    CHECK(e.action_drift < 1e-9);
    for (size_t k = 0; k < e.points.size(); ++k) {
      CHECK(e.points[k].action > 0.0);
      if (k > 0) CHECK(e.points[k].action > e.points[k - 1].action - 3.0 * e.points[k].stderr);
    }
    CHECK(cross_validate_with_pt(e, -alpha).pass);
    CHECK_FALSE(cross_validate_with_pt(e, -1.0).pass);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(estimate_energy(-1.0, 0.0, 1, quick(2000)), InvalidArgument);
    CHECK_THROWS_AS(estimate_energy(1.0, 0.0, 3, quick(2000)), UnsupportedN);
    CHECK_THROWS_AS(estimate_energy(1.0, 0.0, 1, quick(100)), InvalidArgument);
  }
}

TEST_CASE("finite period") {
  // The centre of mass contributes -(3 / 2T) log m* with m* = 1 + alpha/6 at weak coupling.
  const double alpha = 0.5;
  auto o32 = quick(5000, 32.0, 512);
  auto o64 = quick(5000, 64.0, 1024);
  const auto e32 = estimate_energy(alpha, 0.0, 1, o32);
  const auto e64 = estimate_energy(alpha, 0.0, 1, o64);
  const double com = 1.5 * (1.0 / 32.0 - 1.0 / 64.0) * std::log(1.0 + alpha / 6.0);
  const double err = std::hypot(e32.stderr, e64.stderr);
  MESSAGE("E(32) = " << e32.energy << " +- " << e32.stderr << ", E(64) = " << e64.energy << " +- " << e64.stderr);
  CHECK(std::abs(e64.energy - e32.energy - com) < 2.0 * err + 0.25 * com);
}
