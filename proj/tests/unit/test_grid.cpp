#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "varpoint/errors.hpp"
#include "varpoint/grid.hpp"
#include "varpoint/kernels.hpp"

using namespace varpoint;

namespace {

std::vector<std::size_t> support(const GridFunction& f) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] != Complex(0.0)) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("centered grid contains zero") {
  const Grid g = Grid::centered(1, 16, 0.25);
  CHECK(g.point(static_cast<std::size_t>(g.zero_index(0)))[0] == 0.0);
  CHECK(g.length() == 4.0);
  CHECK(g.wrap(2.5) == doctest::Approx(-1.5));
  CHECK(g.wrap(-2.0) == doctest::Approx(-2.0));
  const Grid g2 = Grid::centered(2, 8, 0.5);
  CHECK(g2.size() == 64);
  CHECK(g2.cell_volume() == 0.25);
  CHECK_THROWS_AS(Grid::centered(3, 8, 1.0), DomainError);
}

TEST_CASE("rasterize a unit cube") {
  const Grid g = Grid::centered(1, 32, 0.25);
  SimpleFunction sf{1, {Term{1.0, Region::cube(0, {0, 0})}}};
  const auto f = rasterize(sf, g);
  const auto s = support(f);
  REQUIRE(s.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(s[k] == s[0] + k);
    CHECK(f[s[k]] == Complex(1.0));
  }
  CHECK(g.point(s[0])[0] == 0.0);
}

TEST_CASE("rasterize empty and ball") {
  const Grid g = Grid::centered(1, 32, 0.25);
  CHECK(support(rasterize(SimpleFunction{1, {}}, g)).empty());
  SimpleFunction sf{1, {Term{2.0, Region::ball({0, 0}, 0.5)}}};
  const auto f = rasterize(sf, g);
  const auto s = support(f);
  REQUIRE(s.size() == 4);
  CHECK(g.point(s.front())[0] == -0.5);
  CHECK(g.point(s.back())[0] == 0.25);
  for (auto i : s) CHECK(f[i] == Complex(2.0));
}

TEST_CASE("rasterize outside the grid throws") {
  const Grid g = Grid::centered(1, 32, 0.25);
  SimpleFunction sf{1, {Term{1.0, Region::ball({7.0, 0}, 2.0)}}};
  CHECK_THROWS_AS(rasterize(sf, g), DomainError);
}

TEST_CASE("adjacent regions do not overlap on the lattice") {
  const Grid g = Grid::centered(2, 64, 0.125);
  SimpleFunction sf{2, {Term{1.0, Region::ball({-0.5, 0}, 0.5)}, Term{1.0, Region::ball({0.5, 0}, 0.5)},
                        Term{1.0, Region::cube(1, {2, 2})}, Term{1.0, Region::cube(1, {3, 2})}}};
  const auto f = rasterize(sf, g);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i]) <= 1.0);
}

TEST_CASE("level_measure examples") {
  const Grid g(1, 4, 0.5, {0, 0});
  const auto f = GridFunction::from_real(g, std::vector<double>{0, 2, 2, 0});
  CHECK(level_measure(f, 1.0) == 1.0);
  CHECK(level_measure(f, 2.0) == 0.0);
  CHECK(level_measure(GridFunction(g), 1.0) == 0.0);
  const Grid g8(1, 8, 1.0, {0, 0});
  CHECK(level_measure(GridFunction::from_real(g8, std::vector<double>(8, 3.0)), 2.0) == 8.0);
}

TEST_CASE("lp_norm examples") {
  const Grid g(1, 4, 0.5, {0, 0});
  CHECK(lp_norm(GridFunction::from_real(g, std::vector<double>{0, 1, 0, 0}), 1) == 0.5);
  const Grid g1(1, 4, 1.0, {0, 0});
  CHECK(lp_norm(GridFunction::from_real(g1, std::vector<double>(4, 1.0)), 2) == doctest::Approx(2.0));
  const Grid g2(1, 2, 1.0, {0, 0});
  CHECK(lp_norm(GridFunction::from_real(g2, std::vector<double>{3, -4}), INFINITY) == 4.0);
  CHECK_THROWS_AS(lp_norm(GridFunction(g2), 0.5), DomainError);
}

TEST_CASE("dyadic_refine examples") {
  SimpleFunction unit{1, {Term{1.0, Region::cube(0, {0, 0})}}};
  const auto halves = dyadic_refine(unit, 0.5);
  REQUIRE(halves.terms.size() == 2);
  for (const auto& t : halves.terms) {
    CHECK(t.region.as_cube().side() == 0.5);
    CHECK(t.coefficient == 1.0);
  }
  const auto same = dyadic_refine(unit, 1.0);
  REQUIRE(same.terms.size() == 1);
  CHECK(same.terms[0].region.as_cube() == unit.terms[0].region.as_cube());

  SimpleFunction square{2, {Term{0.7, Region::cube(0, {0, 0})}}};
  const auto quarters = dyadic_refine(square, 0.5);
  REQUIRE(quarters.terms.size() == 4);
  for (const auto& t : quarters.terms) CHECK(t.coefficient == 0.7);

  SimpleFunction ball{1, {Term{1.0, Region::ball({0, 0}, 1)}}};
  CHECK_THROWS_AS(dyadic_refine(ball, 0.5), DomainError);
}

TEST_CASE("dyadic_refine preserves the rasterized function and L1 norm") {
  const Grid g = Grid::centered(1, 256, 1.0 / 16);
  SimpleFunction nested{1, {Term{0.5, Region::cube(0, {0, 0})}, Term{0.25, Region::cube(2, {1, 0})}}};
  const auto refined = dyadic_refine(nested, 0.125);
  const auto a = rasterize(nested, g);
  const auto b = rasterize(refined, g);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-15);
  CHECK(refined.l1_norm() == doctest::Approx(lp_norm(a, 1)));
}

TEST_CASE("random_simple_function") {
  SimpleFunctionParams one;
  one.num_terms = 1;
  const auto a = random_simple_function(1, one);
  REQUIRE(a.terms.size() == 1);
  CHECK(a.terms[0].region.is_cube());

  SimpleFunctionParams three;
  three.num_terms = 3;
  const auto b = random_simple_function(2, three);
  CHECK(b.terms.size() == 3);
  for (const auto& t : b.terms) {
    CHECK(t.coefficient > 0.0);
    CHECK(t.coefficient <= 1.0);
  }
  CHECK(b.max_coefficient() == 1.0);

  const auto c = random_simple_function(2, three);
  const Grid g = Grid::centered(1, 512, 1.0 / 16);
  const auto fb = rasterize(b, g);
  const auto fc = rasterize(c, g);
  for (std::size_t i = 0; i < fb.size(); ++i) CHECK(fb[i] == fc[i]);
}

TEST_CASE("random regions are disjoint") {
  const Grid g = Grid::centered(2, 128, 0.125);
  for (auto kind : {RegionKind::cube, RegionKind::ball}) {
    SimpleFunctionParams p;
    p.dim = 2;
    p.kind = kind;
    p.num_terms = 5;
    p.indicator = true;
    p.region_scale = 2.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto sf = random_simple_function(seed, p);
      const auto f = rasterize(sf, g);
      for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i].real() <= 1.0);
    }
  }
}

TEST_CASE("comb_convolve with a box evaluator") {
  const Grid g = Grid::centered(1, 64, 0.25);
  const auto box = [](const Point& x) { return std::abs(x[0]) <= 1.0 ? 0.5 : 0.0; };
  const auto f = comb_convolve(PointConfiguration(1, {{0, 0}}), box, g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = g.point(i)[0];
    CHECK(f[i].real() == (std::abs(x) <= 1.0 ? 0.5 : 0.0));
  }
  const auto two = comb_convolve(PointConfiguration(1, {{0, 0}, {5, 0}}), box, g);
  const auto shifted = comb_convolve(PointConfiguration(1, {{5, 0}}), box, g);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(two[i] == f[i] + shifted[i]);
}

TEST_CASE("comb of one heat kernel has unit mass") {
  const Grid g = Grid::centered(1, 1024, 1.0 / 16);
  const auto fam = heat_family({1.0}, g);
  const auto f = comb_convolve(PointConfiguration(1, {{0, 0}}), fam[0], g);
  CHECK(std::abs(lp_norm(f, 1) - 1.0) < 1e-3);
}

TEST_CASE("comb without an analytic kernel is unsupported") {
  const Grid g = Grid::centered(2, 64, 0.25);
  const auto fam = sphere_family({2.0}, g);
  CHECK_THROWS_AS(comb_convolve(PointConfiguration(2, {{0, 0}}), fam[0], g), UnsupportedError);
}

TEST_CASE("GridFunction serialization round-trips bitwise") {
  const Grid g = Grid::centered(2, 8, 0.375);
  std::vector<Complex> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = Complex(std::sin(1.0 + i), -1.0 / (1.0 + i));
  const GridFunction f(g, v);
  const auto back = deserialize(serialize(f));
  CHECK(back.grid() == g);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
  CHECK_THROWS(deserialize("not a grid function"));
}
