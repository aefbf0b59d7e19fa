#include <cmath>
#include <vector>

#include "doctest.h"
#include "varpoint/errors.hpp"
#include "varpoint/fourier.hpp"
#include "varpoint/grid.hpp"
#include "varpoint/kernels.hpp"
#include "varpoint/pointwise.hpp"
#include "varpoint/weaktype.hpp"

using namespace varpoint;

namespace {

Grid line() { return Grid::centered(1, 512, 0.25); }

TestFamilySpec indicator_tests(std::size_t count, std::uint64_t seed) {
  TestFamilySpec t;
  t.test_class = TestClass::indicators;
  t.count = count;
  t.seed = seed;
  t.shape.kind = RegionKind::ball;
  t.shape.region_scale = 4.0;
  t.shape.window = 24.0;
  t.shape.snap = 0.25;
  return t;
}

// sup over the automatic λ grid of λ |{Of > λ}| / ‖f‖_1 for one input.
double single_objective(const GridFunction& f, const KernelFamily& fam, const OperatorSpec& op,
                        const TestFamilySpec& spec) {
  const auto field = operator_field(f, fam, op);
  double best = 0.0;
  for (double lambda : lambda_values(field, spec)) best = std::max(best, lambda * level_measure(field, lambda));
  return best / lp_norm(f, 1);
}

}  // namespace

TEST_CASE("pointed objective of a single point under the box family") {
  const auto fam = dyadic_averages(3, 1, line());
  const PointConfiguration one(1, {{0, 0}});
  CHECK(pointed_objective(fam, OperatorSpec::maximal(), one, 1.0, 0.25) == doctest::Approx(0.5).epsilon(1e-12));
  // A far translate doubles both the level set and #X.
  const PointConfiguration two(1, {{0, 0}, {40, 0}});
  CHECK(pointed_objective(fam, OperatorSpec::maximal(), two, 1.0, 0.25) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pointed_objective(fam, OperatorSpec::maximal(), one, 1.0, 0.6) == 0.0);
}

TEST_CASE("pointed objective of a disjoint union is the mediant of its parts") {
  const auto fam = dyadic_averages(3, 1, line());
  const auto op = OperatorSpec::maximal();
  const PointConfiguration a(1, {{0, 0}});
  const PointConfiguration b(1, {{30, 0}, {30.5, 0}});
  const PointConfiguration ab(1, {{0, 0}, {30, 0}, {30.5, 0}});
  for (double lambda : {0.1, 0.25, 0.4}) {
    const double oa = pointed_objective(fam, op, a, 1.0, lambda);
    const double ob = pointed_objective(fam, op, b, 1.0, lambda);
    const double mediant = (oa * 1 + ob * 2) / 3;
    CHECK(pointed_objective(fam, op, ab, 1.0, lambda) == doctest::Approx(mediant).epsilon(1e-12));
    CHECK(pointed_objective(fam, op, ab, 1.0, lambda) <= std::max(oa, ob) + 1e-12);
  }
}

TEST_CASE("weak constant: levels above the field contribute nothing") {
  const auto fam = dyadic_averages(2, 1, line());
  auto tests = indicator_tests(1, 3);
  tests.lambda_grid = {1.5, 4.0};
  const auto est = weak_constant(fam, OperatorSpec::maximal(), tests, 1.0);
  CHECK(est.constant == 0.0);
  CHECK(est.evaluated == 1);
}

TEST_CASE("weak constant is homogeneous at q = 1") {
  const auto fam = dyadic_averages(3, 1, line());
  const auto spec = indicator_tests(1, 0);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto f = rasterize(generate_simple_test(spec, i), line());
    for (const auto& op : {OperatorSpec::maximal(), OperatorSpec::variation(VariationExponent(2))}) {
      const double a = single_objective(f, fam, op, spec);
      const double b = single_objective(f * 2.0, fam, op, spec);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("lambda grid is closed under doubling") {
  const auto fam = dyadic_averages(3, 1, line());
  const auto spec = indicator_tests(1, 5);
  const auto field = operator_field(rasterize(generate_simple_test(spec, 0), line()), fam, OperatorSpec::maximal());
  const auto grid = lambda_values(field, spec);
  REQUIRE(grid.size() > 2 * 32);
  for (std::size_t j = 0; j + 32 < grid.size(); ++j) CHECK(grid[j + 32] == 2 * grid[j]);
  CHECK(grid.back() <= field.max_abs());
}

TEST_CASE("weak constant is reproducible bit for bit") {
  const Grid g = Grid::centered(1, 1024, 0.125);
  const auto fam = dyadic_averages(4, 1, g);
  auto tests = indicator_tests(100, 42);
  const auto a = weak_constant(fam, OperatorSpec::maximal(), tests, 1.0);
  const auto b = weak_constant(fam, OperatorSpec::maximal(), tests, 1.0, 3);
  CHECK(a.constant == b.constant);
  CHECK(a.witness_input == b.witness_input);
  CHECK(a.witness_lambda == b.witness_lambda);
  CHECK(std::isfinite(a.constant));
  CHECK(a.constant > 0.0);
  CHECK(a.evaluated == 100);
  CHECK(a.witness_input.rfind("indicators:42:", 0) == 0);
}

TEST_CASE("restricted constant on a single cell of the T = 1 box family") {
  const Grid g = line();
  const auto fam = dyadic_averages(1, 1, g);
  const double h = g.spacing();
  TestFamilySpec t;
  t.test_class = TestClass::indicators;
  t.count = 1;
  t.max_terms = 1;
  t.shape.kind = RegionKind::cube;
  t.shape.region_scale = h;
  t.shape.region_min_scale = h;
  t.shape.window = 8.0;
  t.lambda_grid = {h / 8, 0.999 * h / 4, h / 3};
  // M f = h/2 on [-1, 1) and h/4 on the rest of [-2, 2); ‖f‖_1 = h.
  double first = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    t.seed = seed;
    const auto est = restricted_constant(fam, OperatorSpec::maximal(), t, 1.0);
    CHECK(est.constant == doctest::Approx(0.999).epsilon(1e-12));
    CHECK(est.witness_lambda == 0.999 * h / 4);
    if (seed == 1) first = est.constant;
    CHECK(est.constant == first);
  }
}

TEST_CASE("restricted and weak constants agree on indicator tests") {
  const auto fam = dyadic_averages(3, 1, line());
  const auto tests = indicator_tests(20, 9);
  const auto op = OperatorSpec::variation(VariationExponent(2));
  CHECK(restricted_constant(fam, op, tests, 1.0).constant == weak_constant(fam, op, tests, 1.0).constant);
  auto sf = tests;
  sf.test_class = TestClass::simple_functions;
  CHECK_THROWS_AS(restricted_constant(fam, op, sf, 1.0), DomainError);
  auto combs = tests;
  combs.test_class = TestClass::point_combs;
  CHECK_THROWS_AS(weak_constant(fam, op, combs, 1.0), DomainError);
  auto empty = tests;
  empty.count = 0;
  CHECK_THROWS_AS(weak_constant(fam, op, empty, 1.0), DomainError);
}

TEST_CASE("weak (p, p) equals weak (1, 1) at p = 1") {
  const auto fam = dyadic_averages(3, 1, line());
  auto tests = indicator_tests(10, 4);
  tests.test_class = TestClass::simple_functions;
  const auto op = OperatorSpec::maximal();
  CHECK(weak_pp_constant(fam, op, tests, 1.0).constant ==
        doctest::Approx(weak_constant(fam, op, tests, 1.0).constant).epsilon(1e-12));
}

TEST_CASE("pointed constant and its errors") {
  const auto fam = dyadic_averages(3, 1, line());
  TestFamilySpec t;
  t.test_class = TestClass::point_combs;
  t.count = 30;
  t.seed = 8;
  t.point_window = 24.0;
  const auto est = pointed_constant(fam, OperatorSpec::maximal(), t, 1.0);
  CHECK(est.constant > 0.0);
  CHECK(est.constant < 10.0);
  const Grid g2 = Grid::centered(2, 64, 0.25);
  auto t2 = t;
  t2.shape.dim = 2;
  t2.point_window = 4.0;
  CHECK_THROWS_AS(pointed_constant(sphere_family({1.0}, g2), OperatorSpec::maximal(), t2, 1.0), UnsupportedError);
}

TEST_CASE("boosted check: one point of weight 2") {
  const auto fam = dyadic_averages(3, 1, line());
  const auto op = OperatorSpec::maximal();
  const PointConfiguration doubled(1, {{0, 0}}, {2.0});
  const PointConfiguration pair(1, {{0, 0}, {0, 0}});
  const double c = 0.5;
  for (double lambda : {0.1, 0.25, 0.5, 0.9}) {
    const auto a = pointed_boosted_check(fam, op, doubled, 1.0, lambda, c);
    const auto b = pointed_boosted_check(fam, op, pair, 1.0, lambda, c);
    CHECK(a.passed);
    CHECK(a.ratio <= 1.0);
    CHECK(a.measure == b.measure);
    CHECK(a.ratio == doctest::Approx(b.ratio).epsilon(1e-12));
    // The field doubles, so λ|{2 comb > λ}| / 2 is the unweighted objective at λ/2.
    const double unweighted = pointed_objective(fam, op, PointConfiguration(1, {{0, 0}}), 1.0, lambda / 2);
    CHECK(lambda * a.measure / 2 == doctest::Approx(unweighted).epsilon(1e-12));
  }
  CHECK_THROWS_AS(pointed_boosted_check(fam, op, PointConfiguration(1, {{0, 0}}, {-1.0}), 1.0, 0.2, c), DomainError);
}

TEST_CASE("boosted check with unit weights is the pointed inequality") {
  const auto fam = dyadic_averages(3, 1, line());
  const auto op = OperatorSpec::variation(VariationExponent(2));
  const PointConfiguration x(1, {{0, 0}, {1.5, 0}, {-6, 0}});
  const double lambda = 0.2;
  const double obj = pointed_objective(fam, op, x, 1.0, lambda);
  const auto chk = pointed_boosted_check(fam, op, x, 1.0, lambda, obj);
  CHECK(chk.passed);
  CHECK(chk.ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("strong norm") {
  const Grid g = Grid::centered(1, 1024, 1.0 / 16);
  const auto fam = heat_family({0.5, 1.0, 2.0}, g);
  CHECK_THROWS_AS(strong_norm(fam, OperatorSpec::maximal(), GridFunction(g), 2.0), DomainError);
  SimpleFunctionParams p;
  p.num_terms = 3;
  const auto f = rasterize(random_simple_function(6, p), g);
  const double a = strong_norm(fam, OperatorSpec::maximal(), f, 2.0);
  CHECK(a == strong_norm(fam, OperatorSpec::maximal(), f, 2.0, 2));
  CHECK(std::isfinite(a));
  CHECK(a >= 0.5);
  CHECK(a <= 1.0 + 1e-9 + std::sqrt(3.0));
}

TEST_CASE("heat decay sits below its Gaussian envelope") {
  const Grid g = Grid::centered(1, 4096, 1.0 / 64);
  const double t0 = 0.01;
  const auto fam = heat_family({t0, 0.04, 0.16}, g);
  const auto curve = smoothing_decay(fam, 2.0, 0, 6);
  REQUIRE(curve.size() == 7);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].exact);
    CHECK(curve[i].value <= std::exp(-t0 * std::pow(4.0, curve[i].k - 1)) * (1 + 1e-9));
    if (i > 0) CHECK(curve[i].value < curve[i - 1].value);
  }
}

TEST_CASE("identity family does not smooth") {
  const Grid g = Grid::centered(1, 1024, 1.0 / 64);
  const auto curve = smoothing_decay(identity_family(3, g), 2.0, 0, 6);
  for (const auto& pt : curve) CHECK(pt.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("random-probe decay is a lower bound of the p = 2 value") {
  const Grid g = Grid::centered(1, 1024, 1.0 / 32);
  const auto fam = heat_family({0.05, 0.1}, g);
  const auto exact = smoothing_decay(fam, 2.0, 1, 3);
  const auto probe = smoothing_decay(fam, 3.0, 1, 3, 8, 5);
  REQUIRE(probe.size() == exact.size());
  for (const auto& pt : probe) CHECK_FALSE(pt.exact);
  CHECK_THROWS_AS(smoothing_decay(fam, 2.0, 0, 20), DomainError);
}

TEST_CASE("slope fit") {
  CHECK(fit_slope({0, 1, 2, 3}, {1, -1, -3, -5}) == doctest::Approx(-2.0));
}

TEST_CASE("test generation is reproducible and identified") {
  auto t = indicator_tests(10, 77);
  CHECK(witness_id(t, 4) == "indicators:77:4");
  const auto a = generate_simple_test(t, 4);
  const auto b = generate_simple_test(t, 4);
  const auto fa = rasterize(a, line());
  const auto fb = rasterize(b, line());
  for (std::size_t i = 0; i < fa.size(); ++i) CHECK(fa[i] == fb[i]);
  t.test_class = TestClass::weighted_combs;
  const auto pc = generate_comb_test(t, 2);
  for (std::size_t k = 0; k < pc.points.size(); ++k) {
    const double w = pc.weight(k);
    CHECK(w > 0.0);
    bool rational = false;
    for (int q = 1; q <= t.max_denominator; ++q) rational |= std::abs(w * q - std::round(w * q)) < 1e-12;
    CHECK(rational);
  }
  CHECK(test_class_from_string("point_combs") == TestClass::point_combs);
  CHECK_THROWS(test_class_from_string("nope"));
}
