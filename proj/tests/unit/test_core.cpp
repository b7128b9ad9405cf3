#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "polaron/core/coulomb.hpp"
#include "polaron/core/params.hpp"
#include "polaron/core/quadrature.hpp"
#include "polaron/error.hpp"

using namespace polaron;
using namespace polaron::core;

namespace {

constexpr double kPi = std::numbers::pi;

// normalized density exp(-a r^2) (a/pi)^{3/2} * q
RadialField gaussian_density(std::shared_ptr<const RadialGrid> g, double a, double q = 1.0) {
  const double c = q * std::pow(a / kPi, 1.5);
  return RadialField::sample(g, [&](double r) { return c * std::exp(-a * r * r); }, FieldKind::density, q);
}

double relerr(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  for (int n : {1, 4, 16, 32}) {
    const auto q = gauss_legendre(n);
    double s = 0.0;
    for (double w : q.weights) s += w;
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += q.weights[i] * std::pow(q.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(std::abs(v - exact) < 1e-13);
    }
  }
}

TEST_CASE("gauss-lobatto includes the endpoints and is exact to degree 2n-3") {
  const auto q = gauss_lobatto(9);
  CHECK(q.nodes.front() == -1.0);
  CHECK(q.nodes.back() == 1.0);
  for (int deg = 0; deg <= 15; ++deg) {
    double v = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) v += q.weights[i] * std::pow(q.nodes[i], deg);
    CHECK(std::abs(v - (deg % 2 ? 0.0 : 2.0 / (deg + 1))) < 1e-13);
  }
}

TEST_CASE("radial grid invariants") {
  const auto g = RadialGrid::build(20.0, 2000);
  const auto r = g.nodes();
  const auto w = g.weights();
  REQUIRE(g.size() >= 2000);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(r[i] > 0.0);
    CHECK(r[i] <= 20.0);
    CHECK(w[i] > 0.0);
    if (i) CHECK(r[i] > r[i - 1]);
    s += w[i];
  }
  CHECK(relerr(s, 8000.0 / 3.0) < 1e-10);
  CHECK(r[g.size() - 1] == 20.0);

  SUBCASE("closed-form exponential moment") {
    double v = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) v += w[i] * std::exp(-r[i]);
    const double exact = 2.0 - std::exp(-20.0) * (400.0 + 40.0 + 2.0);
    CHECK(std::abs(v - exact) < 1e-8);
  }
  SUBCASE("smallest grid") {
    const auto s16 = RadialGrid::build(1.0, 16);
    for (double x : s16.nodes()) CHECK(x <= 1.0);
    CHECK(s16.size() == 16);
  }
  SUBCASE("deterministic layout") {
    const auto h = RadialGrid::build(20.0, 2000);
    CHECK(std::equal(r.begin(), r.end(), h.nodes().begin()));
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(RadialGrid::build(0.0, 100), InvalidArgument);
    CHECK_THROWS_AS(RadialGrid::build(-1.0, 100), InvalidArgument);
    CHECK_THROWS_AS(RadialGrid::build(1.0, 15), InvalidArgument);
  }
}

TEST_CASE("normalize") {
  const auto g = make_grid(20.0, 400);
  auto psi = RadialField::sample(g, [](double r) { return std::exp(-r); }, FieldKind::wavefunction);
  const auto n1 = normalize(psi);
  CHECK(std::abs(n1.norm() - 1.0) < 1e-12);
  const auto n2 = normalize(n1);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(n2.values[i] == doctest::Approx(n1.values[i]).epsilon(1e-14));

  auto scaled = psi;
  for (auto& v : scaled.values) v *= 7.0;
  const auto n3 = normalize(scaled);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(n3.values[i] == doctest::Approx(n1.values[i]).epsilon(1e-14));

  const auto rho = normalize(gaussian_density(g, 1.0, 3.0));
  CHECK(std::abs(rho.norm() - 3.0) < 1e-8);

  auto zero = psi;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  CHECK_THROWS_AS(normalize(zero), DegenerateInput);
}

TEST_CASE("hartree potential") {
  const auto g = make_grid(20.0, 2000);
  const auto r = g->nodes();

  SUBCASE("gaussian erf profile") {
    const double a = 1.3;
    const auto V = radial_hartree_potential(gaussian_density(g, a));
    CHECK(V.kind == FieldKind::potential);
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i)
      err = std::max(err, std::abs(V.values[i] - std::erf(std::sqrt(a) * r[i]) / r[i]));
    CHECK(err < 1e-6);
  }
  SUBCASE("uniform ball, edge on an element boundary") {
    const double a = 1.2, q = 2.0;
    const double c = 3.0 * q / (4.0 * kPi * a * a * a);
    const auto rho = RadialField::sample(g, [&](double x) { return x <= a + 1e-12 ? c : 0.0; }, FieldKind::density, q);
    const auto V = radial_hartree_potential(rho);
    for (std::size_t i = 0; i < g->size(); i += 37) {
      const double x = r[i];
      const double exact = x >= a ? q / x : q * (3 * a * a - x * x) / (2 * a * a * a);
      CHECK(std::abs(V.values[i] - exact) < 5e-3 * exact);
    }
  }
  SUBCASE("monotone and tail") {
    const auto rho = normalize(RadialField::sample(g, [](double x) { return std::exp(-2 * x); }, FieldKind::density));
    const auto V = radial_hartree_potential(rho);
    for (std::size_t i = 1; i < g->size(); ++i) CHECK(V.values[i] <= V.values[i - 1] + 1e-14);
    CHECK(std::abs(V.values.back() - 1.0 / 20.0) < 1e-10);
  }
  SUBCASE("zero density") {
    const auto V = radial_hartree_potential(RadialField::density(g, std::vector<double>(g->size(), 0.0), 0.0));
    for (double v : V.values) CHECK(v == 0.0);
  }
  SUBCASE("wrong kind") {
    const auto psi = RadialField::sample(g, [](double x) { return std::exp(-x); }, FieldKind::wavefunction);
    CHECK_THROWS_AS(radial_hartree_potential(psi), InvalidArgument);
  }
}

TEST_CASE("coulomb double integral") {
  const auto g = make_grid(20.0, 2000);

  SUBCASE("gaussian pair closed form") {
    for (auto [a, b] : {std::pair{0.7, 0.7}, std::pair{0.5, 2.0}}) {
      const double d = coulomb_double_integral(gaussian_density(g, a), gaussian_density(g, b));
      CHECK(std::abs(d - 2.0 / std::sqrt(kPi) * std::sqrt(a * b / (a + b))) < 1e-6);
    }
    CHECK(std::abs(coulomb_double_integral(gaussian_density(g, 0.9), gaussian_density(g, 0.9)) -
                   std::sqrt(2 * 0.9 / kPi)) < 1e-6);
  }
  SUBCASE("symmetry, positivity, consistency with the potential") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.2, 3.0);
    for (int t = 0; t < 5; ++t) {
      const double a1 = U(rng), a2 = U(rng), c1 = U(rng), c2 = U(rng);
      const auto r1 = RadialField::sample(g, [&](double x) { return c1 * std::exp(-a1 * x) * (1 + x); },
                                          FieldKind::density, 1.0);
      const auto r2 = RadialField::sample(g, [&](double x) { return c2 * std::exp(-a2 * x * x) + std::exp(-3 * x); },
                                          FieldKind::density, 1.0);
      const double d12 = coulomb_double_integral(r1, r2), d21 = coulomb_double_integral(r2, r1);
      CHECK(std::abs(d12 - d21) <= 1e-14 * std::abs(d12));
      CHECK(d12 > 0.0);
      const auto V2 = radial_hartree_potential(r2);
      CHECK(relerr(radial_inner(*g, r1.values, V2.values), d12) < 1e-8);
    }
  }
  SUBCASE("zero density") {
    const auto rho = gaussian_density(g, 1.0);
    CHECK(coulomb_double_integral(rho, RadialField::density(g, std::vector<double>(g->size(), 0.0), 0.0)) == 0.0);
  }
  SUBCASE("grid mismatch") {
    const auto h = make_grid(20.0, 1000);
    CHECK_THROWS_AS(coulomb_double_integral(gaussian_density(g, 1.0), gaussian_density(h, 1.0)), GridMismatch);
  }
  SUBCASE("domain doubling") {
    auto self = [](std::shared_ptr<const RadialGrid> grid) {
      const auto rho = normalize(RadialField::sample(grid, [](double x) { return std::exp(-x); }, FieldKind::density));
      return coulomb_double_integral(rho, rho);
    };
    CHECK(relerr(self(make_grid(40.0, 4000)), self(g)) < 1e-6);
  }
}

TEST_CASE("coupling params validation") {
  CouplingParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha = -1.0;
  try {
    p.validate();
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "alpha");
  }
  p = {};
  p.repulsion_u = -0.1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.n_particles = 4;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}
