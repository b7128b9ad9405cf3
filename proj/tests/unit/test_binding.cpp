#include <cmath>

#include "doctest.h"
#include "polaron/binding/verify.hpp"
#include "polaron/error.hpp"

using namespace polaron;
using namespace polaron::binding;

namespace {

const PtContext& context(double alpha) {
  static const PtContext one(1.0);
  static const PtContext two(2.0);
  return alpha == 1.0 ? one : two;
}

const ScanResult& critical(double alpha) {
  static const ScanResult one = find_critical_ratio(context(1.0), 0.01);
  static const ScanResult two = find_critical_ratio(context(2.0), 0.01);
  return alpha == 1.0 ? one : two;
}

pimc::PimcEstimate fake_estimate(double alpha, double u, int n, double e, double s) {
  pimc::PimcEstimate est;
  est.alpha = alpha;
  est.repulsion_u = u;
  est.n_particles = n;
  est.energy = e;
  est.stderr = s;
  est.points.resize(1);
  est.points[0].repulsion = 0.3;
  return est;
}

}  // namespace

TEST_CASE("binding energies at the ends of the U range") {
  const auto& ctx = context(1.0);
  const double cp = -ctx.e1();
  CHECK(cp == doctest::Approx(0.108513).epsilon(1e-4));

  const auto zero = binding_energy(ctx, 0.0);
  CHECK(zero.delta_e == doctest::Approx(6.0 * cp).epsilon(0.02));
  const double product = 2.0 * pekar::solve_pekar(2.0, ctx.grid()->radial).energy;
  CHECK(zero.e2 == doctest::Approx(product).epsilon(1e-6));
  CHECK(zero.e2 == doctest::Approx(-8.0 * cp).epsilon(1e-4));
  CHECK(zero.delta_e == 2.0 * zero.e1 - zero.e2);
  CHECK_FALSE(zero.unbound);
  CHECK(zero.breakup >= zero.e2);
  CHECK(zero.method == Method::PT);

  const auto far = binding_energy(ctx, 50.0);
  CHECK(std::abs(far.delta_e) <= 1e-3);
  CHECK(far.unbound);
  CHECK(far.e2_one_center > 2.0 * far.e1);
  CHECK(far.breakup == doctest::Approx(far.e2).epsilon(1e-12));
  CHECK(far.delta_e == 2.0 * far.e1 - far.e2);

  CHECK_THROWS_AS(binding_energy(ctx, -1.0), InvalidArgument);
  CHECK_THROWS_AS(PtContext(0.0), InvalidArgument);
}

TEST_CASE("break-up energies") {
  CHECK(breakup_energy(2, -0.3, -1.0) == -0.6);
  CHECK(breakup_energy(3, -0.3, -1.0) == -1.3);
  CHECK_THROWS_AS(breakup_energy(4, -0.3, -1.0), UnsupportedN);
  CHECK_THROWS_AS(breakup_energy(1, -0.3, -1.0), InvalidArgument);
  const auto& ctx = context(1.0);
  const double cp = -ctx.e1();
  const auto zero = binding_energy(ctx, 0.0);
  CHECK(breakup_energy(3, zero.e1, zero.e2) == doctest::Approx(-9.0 * cp).epsilon(1e-4));
}

TEST_CASE("scaling collapse") {
  const double d1 = binding_energy(context(1.0), 1.5).delta_e;
  const double d2 = binding_energy(context(2.0), 3.0).delta_e;
  CHECK(d2 == doctest::Approx(4.0 * d1).epsilon(1e-4));
  for (double ratio : {0.5, 2.0}) {
    const double a = binding_energy(context(1.0), ratio).delta_e;
    const double b = binding_energy(context(2.0), 2.0 * ratio).delta_e / 4.0;
    CHECK(b == doctest::Approx(a).epsilon(1e-4));
  }
}

TEST_CASE("critical ratio") {
  const auto& c1 = critical(1.0);
  REQUIRE(c1.has_critical);
  CHECK(c1.nu_c > 2.0);
  CHECK(c1.nu_c < 10.0);
  CHECK(c1.u_high - c1.u_low <= 0.01 + 1e-12);
  for (size_t k = 1; k < c1.rows.size(); ++k) CHECK(c1.rows[k].u > c1.rows[k - 1].u);
  CHECK(first_monotonicity_violation(c1.rows) == -1);
  const double eps = binding_threshold(1.0);
  CHECK(binding_energy(context(1.0), 1.05 * c1.nu_c).delta_e <= eps);
  CHECK(binding_energy(context(1.0), 0.95 * c1.nu_c).delta_e > eps);
  CHECK(std::abs(critical(2.0).nu_c - c1.nu_c) <= 0.01);

  CHECK_THROWS_AS(find_critical_ratio(context(1.0), 0.01, 2.0, 2.2), BracketFailure);
  CHECK_THROWS_AS(find_critical_ratio(context(1.0), 0.01, 2.5, 10.0), BracketFailure);
  CHECK_THROWS_AS(find_critical_ratio(context(1.0), 0.0), InvalidArgument);
}

TEST_CASE("radius profile") {
  const auto& ctx = context(1.0);
  const double nu = critical(1.0).nu_c;
  const auto rows = radius_profile(ctx, {0.999 * nu, 0.9 * nu, 0.99 * nu});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].u < rows[1].u);
  double lowest = 1e300;
  for (const auto& r : rows) {
    CHECK_FALSE(r.unbound);
    lowest = std::min(lowest, r.inv_r12);
  }
  CHECK(lowest >= 0.5 * rows[0].inv_r12);

  // product of two Pekar orbitals at coupling 2 alpha
  const auto orbital = pekar::solve_pekar(2.0, ctx.grid()->radial);
  const auto product = pt::product_energy(orbital.psi, {1.0, 0.0, 2}, ctx.grid());
  const auto at_zero = radius_profile(ctx, {0.0});
  CHECK(at_zero[0].inv_r12 == doctest::Approx(product.repulsion_expect).epsilon(1e-5));
}

TEST_CASE("derivative identity on bound rows") {
  const auto& ctx = context(1.0);
  for (double u : {0.5, 1.0, 1.5, 2.0, 2.2}) {
    const auto c = feynman_hellmann(ctx, u, 1e-3);
    CHECK(c.relative_error < 1e-3);
  }
  CHECK_THROWS_AS(feynman_hellmann(ctx, 0.0, 1e-3), InvalidArgument);
}

TEST_CASE("scan invariants") {
  const auto scan = scan_binding(context(1.0), {3.0, 0.0, 1.0, 2.0, 0.5, 2.5});
  REQUIRE(scan.rows.size() == 6);
  for (size_t k = 0; k < scan.rows.size(); ++k) {
    const auto& r = scan.rows[k];
    if (k > 0) CHECK(r.u > scan.rows[k - 1].u);
    CHECK(r.e2 <= 2.0 * r.e1 + 1e-6);
    CHECK(r.delta_e >= -1e-6);
    CHECK(r.delta_e == 2.0 * r.e1 - r.e2);
  }
  CHECK(first_monotonicity_violation(scan.rows) == -1);
  auto broken = scan.rows;
  broken[3].delta_e = broken[2].delta_e + 0.1;
  CHECK(first_monotonicity_violation(broken) == 3);
  CHECK_THROWS_AS(scan_binding(context(1.0), {-0.5}), InvalidArgument);
}

TEST_CASE("csv layout") {
  CHECK(csv_header() == "alpha,U,method,e1,e2,delta_e,inv_r12,unbound_flag,stderr_e2");
  BindingReport r;
  r.alpha = 1.0;
  r.u = 0.5;
  r.e1 = -0.25;
  r.e2 = -0.75;
  r.delta_e = 0.25;
  r.inv_r12 = 0.125;
  CHECK(csv_row(r) == "1,0.5,PT,-0.25,-0.75,0.25,0.125,0,");
  r.method = Method::PIMC;
  r.stderr_e2 = 0.0625;
  r.unbound = true;
  CHECK(csv_row(r) == "1,0.5,PIMC,-0.25,-0.75,0.25,0.125,1,0.0625");
  ScanResult s;
  s.rows = {r, r};
  CHECK(to_csv(s) == csv_header() + "\n" + csv_row(r) + "\n" + csv_row(r) + "\n");
}

TEST_CASE("pimc binding rows") {
  const auto one = fake_estimate(1.0, 0.0, 1, -1.02, 0.001);
  const auto bound = binding_from_estimates(one, fake_estimate(1.0, 0.5, 2, -2.2, 0.002));
  CHECK(bound.delta_e == doctest::Approx(0.16));
  CHECK_FALSE(bound.unbound);
  CHECK(bound.inv_r12 == 0.3);
  CHECK(bound.method == Method::PIMC);
  const auto flat = binding_from_estimates(one, fake_estimate(1.0, 8.0, 2, -2.041, 0.002));
  CHECK(flat.unbound);
  CHECK_THROWS_AS(binding_from_estimates(one, fake_estimate(2.0, 0.5, 2, -2.2, 0.002)), InvalidArgument);
  CHECK_THROWS_AS(binding_from_estimates(one, one), InvalidArgument);
}

TEST_CASE("bound verification") {
  VerifyInputs in;
  in.pimc = {fake_estimate(0.25, 0.0, 1, -0.254, 0.001), fake_estimate(1.0, 0.0, 1, -1.02, 0.002)};
  in.pt = {{1.0, -0.1085}};
  const auto& ctx = context(1.0);
  in.rows = scan_binding(ctx, {0.0, 0.5, 1.0, 3.0}).rows;
  in.nu_c = 2.33;
  auto rep = verify_bounds(in);
  CHECK(rep.passed());
  int d_rows = 0;
  for (const auto& c : rep.checks) d_rows += c.id == "d";
  CHECK(d_rows == 1);

  SUBCASE("corrupted e2 names the row") {
    in.rows.back().e2 += 0.1;
    rep = verify_bounds(in);
    CHECK_FALSE(rep.passed());
    const auto fails = rep.failures();
    REQUIRE(fails.size() == 1);
    CHECK(fails[0]->id == "c");
    CHECK(fails[0]->subject == "row alpha=1 U=3 PT");
  }
  SUBCASE("bracket violation") {
    in.pimc[0].energy = -0.29;
    rep = verify_bounds(in);
    REQUIRE(rep.failures().size() == 1);
    CHECK(rep.failures()[0]->id == "a");
  }
  SUBCASE("pimc above pt") {
    in.pimc[1].energy = -0.05;
    rep = verify_bounds(in);
    CHECK(rep.failures().size() == 2);
  }
  SUBCASE("binding beyond the critical ratio") {
    in.rows.back().delta_e = 0.01;
    rep = verify_bounds(in);
    CHECK_FALSE(rep.passed());
  }
  SUBCASE("wrong Pekar value") {
    in.pt[0].energy = -0.12;
    CHECK_FALSE(verify_bounds(in).passed());
  }
}
