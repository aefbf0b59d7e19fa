#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "varpoint/errors.hpp"
#include "varpoint/fourier.hpp"
#include "varpoint/grid.hpp"
#include "varpoint/kernels.hpp"
#include "varpoint/weaktype.hpp"

using namespace varpoint;

TEST_CASE("dyadic averages are normalised box indicators") {
  const Grid g = Grid::centered(1, 256, 0.25);
  const auto one = dyadic_averages(1, 1, g);
  REQUIRE(one.size() == 2);
  const auto& k0 = one[0].samples();
  for (std::size_t i = 0; i < k0.size(); ++i) {
    const double x = g.point(i)[0];
    CHECK(k0[i].real() == (x >= -1.0 && x < 1.0 ? 0.5 : 0.0));
  }
  const auto three = dyadic_averages(3, 1, g);
  REQUIRE(three.size() == 4);
  for (const auto& e : three.entries()) CHECK(std::abs(lp_norm(e.samples(), 1) - 1.0) < 1e-9);
  const auto& k3 = three[3].samples();
  for (std::size_t i = 0; i < k3.size(); ++i) {
    const double x = g.point(i)[0];
    CHECK(k3[i].real() == (x >= -8.0 && x < 8.0 ? 1.0 / 16 : 0.0));
  }
  CHECK(three[3].evaluate({7.9, 0}) == doctest::Approx(1.0 / 16));
  CHECK(three[3].evaluate({8.5, 0}) == 0.0);
  CHECK_THROWS_AS(dyadic_averages(7, 1, g), DomainError);
}

TEST_CASE("2D dyadic averages have unit mass") {
  const Grid g = Grid::centered(2, 128, 0.125);
  const auto fam = dyadic_averages(2, 2, g);
  for (const auto& e : fam.entries()) CHECK(std::abs(lp_norm(e.samples(), 1) - 1.0) < 1e-9);
}

TEST_CASE("heat family mass, concentration and transform") {
  const Grid g = Grid::centered(1, 2048, 1.0 / 32);
  const std::vector<double> times{0.05, 0.5, 2.0};
  const auto fam = heat_family(times, g);
  for (const auto& e : fam.entries()) CHECK(std::abs(lp_norm(e.samples(), 1) - 1.0) < 1e-3);
  CHECK(fam[0].samples().max_abs() > fam[1].samples().max_abs());
  CHECK(fam[1].samples().max_abs() > fam[2].samples().max_abs());

  for (std::size_t t = 0; t < times.size(); ++t) {
    const auto spec = continuous_transform(fam[t].samples());
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double xi = frequency_norm(g, i);
      const double expect = std::exp(-times[t] * xi * xi);
      if (xi > 4.0 || expect < 1e-6) continue;
      CHECK(std::abs(spec[i] - expect) <= 1e-3 * expect);
    }
  }
}

TEST_CASE("heat kernel evaluator matches its samples") {
  const Grid g = Grid::centered(2, 64, 0.25);
  const auto fam = heat_family({0.7}, g);
  for (std::size_t i = 0; i < g.size(); i += 37) {
    CHECK(fam[0].evaluate(g.point(i)) == doctest::Approx(fam[0].samples()[i].real()).epsilon(1e-12));
  }
}

TEST_CASE("poisson family transform") {
  const Grid g = Grid::centered(1, 4096, 1.0 / 16);
  const auto fam = poisson_family({0.5}, g);
  const auto spec = continuous_transform(fam[0].samples());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double xi = frequency_norm(g, i);
    if (xi > 4.0) continue;
    CHECK(std::abs(spec[i] - std::exp(-0.5 * xi)) < 2e-2);
  }
}

TEST_CASE("sphere family mass and decay") {
  const Grid g = Grid::centered(2, 512, 1.0 / 64);
  const auto fam = sphere_family({1.0, 2.0}, g);
  for (const auto& e : fam.entries()) {
    CHECK(std::abs(lp_norm(e.samples(), 1) - 1.0) < 1e-6);
    CHECK(e.tv_norm() == doctest::Approx(1.0));
    CHECK_FALSE(e.has_evaluator());
    CHECK_THROWS_AS(e.evaluate({0, 0}), UnsupportedError);
  }
  const double slope = fourier_decay_slope(fam[0], 4.0, 64.0);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
  CHECK(std::abs(slope + 0.5) <= 0.1);

  // The transform of the unit circle measure is J0(|ξ|).
  const auto spec = continuous_transform(fam[0].samples());
  for (std::size_t m = 0; m < 40; ++m) {
    const std::size_t flat = g.flat_index(0, m);
    const double xi = frequency_norm(g, flat);
    CHECK(std::abs(spec[flat] - boost::math::cyl_bessel_j(0, xi)) < 0.02);
  }
}

TEST_CASE("sphere family preconditions") {
  CHECK_THROWS_AS(sphere_family({1.0}, Grid::centered(1, 64, 0.25)), UnsupportedError);
  CHECK_THROWS_AS(sphere_family({0.0}, Grid::centered(2, 64, 0.25)), DomainError);
}

TEST_CASE("identity family") {
  const Grid g = Grid::centered(1, 64, 0.5);
  const auto fam = identity_family(3, g);
  REQUIRE(fam.size() == 3);
  CHECK(lp_norm(fam[1].samples(), 1) == doctest::Approx(1.0));
  CHECK(fam[1].samples()[static_cast<std::size_t>(g.zero_index(0))].real() == 2.0);
}

TEST_CASE("mollify meets its L1 target") {
  const Grid g = Grid::centered(1, 1024, 1.0 / 16);
  const auto fam = dyadic_averages(4, 1, g);
  const auto m = mollify(fam, 0.1);
  CHECK(max_l1_distance(fam, m) < 0.1);
  REQUIRE(m.mollifier_width());
  for (const auto& e : m.entries()) CHECK(std::abs(lp_norm(e.samples(), 1) - 1.0) < 1e-9);

  const auto loose = mollify(fam, 5.0);
  CHECK(max_l1_distance(fam, loose) < 5.0);
  CHECK(*loose.mollifier_width() >= *m.mollifier_width());

  CHECK_THROWS_AS(mollify(fam, 1e-9), ResolutionError);
  CHECK_THROWS_AS(mollify(fam, 0.0), DomainError);
}

TEST_CASE("mollified kernels evaluate consistently with their samples") {
  const Grid g = Grid::centered(1, 512, 1.0 / 16);
  const auto m = mollify_with_width(dyadic_averages(2, 1, g), 0.5);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    CHECK(std::abs(m[2].evaluate(g.point(i)) - m[2].samples()[i].real()) < 1e-6);
  }
}

TEST_CASE("mollifier density has unit mass and compact support") {
  double mass = 0.0;
  const double h = 1e-4;
  for (double x = -1.0; x < 1.0; x += h) mass += mollifier_density(0.5, 1, {x, 0}) * h;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(mollifier_density(0.5, 1, {0.26, 0}) == 0.0);
}
