#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wirefield/charge.hpp"
#include "wirefield/grid.hpp"

using namespace wirefield;

TEST_CASE("grid construction and node layout", "[field]") {
  const Grid g = make_grid(8, 8, 41, 41);
  CHECK(g.hx == 0.4);
  CHECK(g.hy == 0.4);
  CHECK(g.x(20) == 0.0);
  CHECK(g.y(20) == 0.0);
  CHECK(g.nodes() == 41 * 41);

  const Grid tiny = make_grid(1, 1, 3, 3);
  CHECK(tiny.hx == 1.0);
  CHECK(tiny.hy == 1.0);
  CHECK(tiny.nodes() == 9);

  const Grid rect = make_grid(8, 4, 41, 21);
  CHECK(rect.hx == 0.4);
  CHECK(rect.hy == 0.4);

  CHECK_THROWS_AS(make_grid(0, 8, 41, 41), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, -1, 41, 41), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 8, 2, 41), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 8, 41, 1), std::invalid_argument);
}

TEST_CASE("trapezoid integration", "[field]") {
  const Grid g = make_grid(8, 8, 41, 41);

  SECTION("exact on constants up to summation rounding") {
    CHECK(integrate(sample(g, [](double, double) { return 1.0; })) ==
          Catch::Approx(256.0).epsilon(1e-12));
  }

  SECTION("indicator charge matches an explicit weighted double loop") {
    const ChargeDistribution mu = square_nanowire(g);
    double direct = 0.0;
    for (int i = 0; i < g.na; ++i)
      for (int j = 0; j < g.nb; ++j) {
        double w = g.hx * g.hy;
        if (i == 0 || i == g.na - 1) w *= 0.5;
        if (j == 0 || j == g.nb - 1) w *= 0.5;
        direct += w * mu.field(i, j);
      }
    CHECK(integrate(mu.field) == Catch::Approx(direct).epsilon(1e-14));
    CHECK(mu.Z == Catch::Approx(direct).epsilon(1e-14));
  }

  SECTION("gaussian mass against the analytic integral") {
    const ScalarField f = sample(g, [](double x, double y) { return std::exp(-x * x - y * y); });
    CHECK(std::abs(integrate(f) - M_PI) < 1e-3);
  }

  SECTION("linearity and affine exactness") {
    std::mt19937_64 rng(71);
    const ScalarField f = oracles::random_bumps(g, rng);
    const ScalarField h = oracles::random_bumps(g, rng);
    ScalarField combo(g);
    for (std::size_t k = 0; k < combo.values.size(); ++k)
      combo.values[k] = 2.5 * f.values[k] - 0.75 * h.values[k];
    CHECK(integrate(combo) ==
          Catch::Approx(2.5 * integrate(f) - 0.75 * integrate(h)).margin(1e-12));

    const ScalarField affine = sample(g, [](double x, double y) { return 2 + 3 * x - y; });
    CHECK(integrate(affine) == Catch::Approx(2.0 * 256.0).epsilon(1e-13));
  }
}

TEST_CASE("five-point laplacian", "[field]") {
  const Grid g = make_grid(8, 8, 41, 41);

  SECTION("constants and quadratics") {
    const ScalarField c = sample(g, [](double, double) { return 3.25; });
    const ScalarField lc = laplacian(c);
    for (double v : lc.values) CHECK(v == 0.0);

    const ScalarField q = sample(g, [](double x, double y) { return x * x + y * y; });
    const ScalarField lq = laplacian(q);
    for (int i = 1; i + 1 < g.na; ++i)
      for (int j = 1; j + 1 < g.nb; ++j) REQUIRE(lq(i, j) == Catch::Approx(4.0).margin(1e-10));
    for (int i = 0; i < g.na; ++i) { // boundary ring zeroed, not meaningful
      CHECK(lq(i, 0) == 0.0);
      CHECK(lq(i, g.nb - 1) == 0.0);
    }
  }

  SECTION("second-order convergence on a gaussian") {
    auto max_interior_err = [](int n) {
      const Grid gg = make_grid(8, 8, n, n);
      const ScalarField f =
          sample(gg, [](double x, double y) { return std::exp(-(x * x + y * y)); });
      const ScalarField lf = laplacian(f);
      double worst = 0.0;
      for (int i = 1; i + 1 < gg.na; ++i)
        for (int j = 1; j + 1 < gg.nb; ++j) {
          const double r2 = gg.x(i) * gg.x(i) + gg.y(j) * gg.y(j);
          const double exact = (4.0 * r2 - 4.0) * std::exp(-r2);
          worst = std::max(worst, std::abs(lf(i, j) - exact));
        }
      return worst;
    };
    const double e21 = max_interior_err(21), e41 = max_interior_err(41);
    CHECK(e41 < e21 / 3.0); // h halves, O(h^2) expects about 1/4
  }
}

TEST_CASE("gradient", "[field]") {
  const Grid g = make_grid(8, 8, 41, 41);

  SECTION("constants and linear fields") {
    auto [cx, cy] = gradient(sample(g, [](double, double) { return 7.0; }));
    for (double v : cx.values) CHECK(v == 0.0);
    for (double v : cy.values) CHECK(v == 0.0);

    auto [lx, ly] = gradient(sample(g, [](double x, double) { return x; }));
    for (int i = 0; i < g.na; ++i)
      for (int j = 0; j < g.nb; ++j) {
        REQUIRE(lx(i, j) == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(ly(i, j) == Catch::Approx(0.0).margin(1e-12));
      }
  }

  SECTION("second-order convergence on a gaussian") {
    auto max_interior_err = [](int n) {
      const Grid gg = make_grid(8, 8, n, n);
      const ScalarField f =
          sample(gg, [](double x, double y) { return std::exp(-(x * x + y * y)); });
      auto [gx, gy] = gradient(f);
      double worst = 0.0;
      for (int i = 1; i + 1 < gg.na; ++i)
        for (int j = 1; j + 1 < gg.nb; ++j) {
          const double r2 = gg.x(i) * gg.x(i) + gg.y(j) * gg.y(j);
          worst = std::max(worst, std::abs(gx(i, j) + 2 * gg.x(i) * std::exp(-r2)));
          worst = std::max(worst, std::abs(gy(i, j) + 2 * gg.y(j) * std::exp(-r2)));
        }
      return worst;
    };
    const double e41 = max_interior_err(41), e81 = max_interior_err(81);
    CHECK(e81 < e41 / 3.0);
  }
}

TEST_CASE("lp norms", "[field]") {
  const Grid g = make_grid(8, 8, 41, 41);
  CHECK(lp_norm(sample(g, [](double, double) { return 1.0; }), 2.0) ==
        Catch::Approx(16.0).epsilon(1e-14));
  CHECK(lp_norm(sample(g, [](double, double) { return 2.0; }), 1.0) ==
        Catch::Approx(512.0).epsilon(1e-12));

  const ChargeDistribution mu = square_nanowire(g);
  double direct = 0.0;
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j)
      direct += g.weight(i, j) * std::pow(std::abs(mu.field(i, j)), 5.0 / 3.0);
  CHECK(lp_norm(mu.field, 5.0 / 3.0) == Catch::Approx(std::pow(direct, 0.6)).epsilon(1e-13));

  CHECK_THROWS_AS(lp_norm(mu.field, 0.5), std::invalid_argument);
}

TEST_CASE("charge distributions", "[field]") {
  const Grid g = make_grid(8, 8, 41, 41);

  SECTION("indicator sampling uses strict inequalities") {
    const ChargeDistribution mu = square_nanowire(g);
    // |x| = 2 sits exactly on nodes at this spacing and must get value 0
    CHECK(mu.field(25, 20) == 0.0); // x = 2, y = 0
    CHECK(mu.field(24, 20) == 1.0); // x = 1.6
    CHECK(mu.Z == Catch::Approx(12.96).epsilon(1e-13));
  }

  SECTION("validation") {
    ScalarField neg(g);
    neg.values[5] = -1.0;
    CHECK_THROWS_AS(make_charge(neg), std::invalid_argument);
    CHECK_THROWS_AS(make_charge(ScalarField(g)), std::invalid_argument); // zero total
    CHECK_THROWS_AS(gaussian_charge(g, 0, 0, -0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_charge(g, 0, 0, 0.5, 0), std::invalid_argument);
  }

  SECTION("gaussian mass") {
    const ChargeDistribution q = gaussian_charge(g, 0, 0, 0.5, 1.0);
    CHECK(std::abs(q.Z - 1.0) < 1e-3);
  }

  SECTION("neutrality utilities") {
    const ChargeDistribution mu = square_nanowire(g);
    CHECK_FALSE(is_neutral(mu.field));
    CHECK_THROWS_AS(NeutralField(mu.field), std::invalid_argument);
    const ScalarField shifted = project_neutral(mu.field);
    CHECK(std::abs(integrate(shifted)) < 1e-12 * mu.Z);
    CHECK_NOTHROW(NeutralField(shifted));
  }
}
