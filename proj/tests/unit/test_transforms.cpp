#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "varpoint/errors.hpp"
#include "varpoint/fourier.hpp"
#include "varpoint/grid.hpp"
#include "varpoint/kernels.hpp"
#include "varpoint/rng.hpp"

using namespace varpoint;

namespace {

constexpr double kPi = std::numbers::pi;

// L = 8π, so lattice frequencies are m / 4.
Grid wave_grid() { return Grid::centered(1, 256, kPi / 32); }

GridFunction wave(const Grid& g, double xi, double phase = 0.0) {
  std::vector<Complex> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::polar(1.0, xi * g.point(i)[0] + phase);
  return GridFunction(g, v);
}

double max_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

GridFunction random_field(const Grid& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Complex> v(g.size());
  for (auto& z : v) z = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return GridFunction(g, v);
}

}  // namespace

TEST_CASE("bump profile") {
  const BumpProfile phi;
  CHECK(phi(0.0) == 1.0);
  CHECK(phi(1.0) == 1.0);
  CHECK(phi(-0.7) == 1.0);
  CHECK(phi(2.0) == 0.0);
  CHECK(phi(3.0) == 0.0);
  double prev = 1.0;
  for (double s = 1.0; s <= 2.0; s += 1.0 / 64) {
    CHECK(phi(s) <= prev);
    CHECK(phi(s) == phi(-s));
    prev = phi(s);
  }
}

TEST_CASE("dft round trip") {
  const Grid g = Grid::centered(2, 16, 0.5);
  const auto f = random_field(g, 3);
  CHECK(max_diff(inverse_dft(g, forward_dft(f)), f) < 1e-13);
}

TEST_CASE("convolution with the identity kernel") {
  const Grid g = Grid::centered(1, 128, 0.125);
  const auto f = random_field(g, 4);
  const auto id = identity_family(1, g);
  CHECK(max_diff(convolve(f, id[0].samples()), f) < 1e-9);
  const Grid g2 = Grid::centered(2, 32, 0.25);
  const auto f2 = random_field(g2, 5);
  CHECK(max_diff(convolve(f2, identity_family(1, g2)[0].samples()), f2) < 1e-9);
}

TEST_CASE("two unit intervals convolve to a hat") {
  const Grid g = Grid::centered(1, 512, 1.0 / 64);
  SimpleFunction unit{1, {Term{1.0, Region::cube(0, {0, 0})}}};
  const auto f = rasterize(unit, g);
  const auto c = convolve(f, f);
  const std::vector<Complex> fv(f.samples().begin(), f.samples().end());
  const auto direct = oracle::convolve_1d(fv, fv, g.spacing());
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - direct[i]) < 1e-9);
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].real() > best) {
      best = c[i].real();
      arg = i;
    }
  }
  // The lattice hat peaks one cell before x = 1.
  CHECK(best == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(g.point(arg)[0] - 1.0) <= g.spacing());
  CHECK(c[arg + 1].real() == doctest::Approx(1.0 - g.spacing()).epsilon(1e-12));
}

TEST_CASE("convolution agrees with the direct sum and commutes") {
  const Grid g = Grid::centered(1, 128, 0.3);
  const auto f = random_field(g, 6);
  const auto k = random_field(g, 7);
  const std::vector<Complex> fv(f.samples().begin(), f.samples().end());
  const std::vector<Complex> kv(k.samples().begin(), k.samples().end());
  const auto direct = oracle::convolve_1d(fv, kv, g.spacing());
  const auto fk = convolve(f, k);
  for (std::size_t i = 0; i < fk.size(); ++i) CHECK(std::abs(fk[i] - direct[i]) < 1e-9);
  CHECK(max_diff(fk, convolve(k, f)) < 1e-12);
}

TEST_CASE("convolution grid mismatch") {
  const auto f = GridFunction(Grid::centered(1, 64, 0.25));
  const auto g = GridFunction(Grid::centered(1, 64, 0.5));
  CHECK_THROWS_AS(convolve(f, g), DomainError);
}

TEST_CASE("LP projection kills frequencies below its band") {
  const Grid g = wave_grid();
  const auto f = wave(g, 1.0) + wave(g, 0.5, 0.3);
  CHECK(lp_projection(f, 2).max_abs() < 1e-12);
  CHECK(lp_projection(f, 3).max_abs() < 1e-12);
}

TEST_CASE("LP projection passes its central frequency") {
  const Grid g = wave_grid();
  const auto f = wave(g, 4.0, 0.2);
  CHECK(max_diff(lp_projection(f, 2), f) < 1e-12);
  CHECK(lp_projection(f, 0).max_abs() < 1e-12);
}

TEST_CASE("LP scale range") {
  const Grid g = wave_grid();
  CHECK(max_resolvable_scale(g) == 3);
  CHECK_THROWS_AS(lp_projection(GridFunction(g), 4), DomainError);
  CHECK_THROWS_AS(lp_low(GridFunction(g), 4), DomainError);
  CHECK_NOTHROW(lp_low(GridFunction(g), 3));
}

TEST_CASE("LP low and high partition f exactly") {
  const Grid g = Grid::centered(2, 64, 0.125);
  const auto f = random_field(g, 8);
  for (int k = 0; k <= max_resolvable_scale(g); ++k) {
    const auto lo = lp_low(f, k);
    const auto hi = lp_high(f, k);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(hi[i] == f[i] - lo[i]);
  }
}

TEST_CASE("LP telescoping") {
  const Grid g = Grid::centered(1, 1024, 1.0 / 16);
  const auto f = random_field(g, 9);
  for (int k = 1; k <= max_resolvable_scale(g); ++k) {
    CHECK(max_diff(lp_low(f, k) - lp_low(f, k - 1), lp_projection(f, k)) < 1e-12);
  }
}

TEST_CASE("band-limited reconstruction") {
  const Grid g = wave_grid();
  const auto f = wave(g, 0.25) + wave(g, 1.5, 1.0) * 0.5 + wave(g, -3.75, 2.0) * 2.0;
  const auto lo = lp_low(f, 2);
  CHECK(lp_norm(lo - f, 2) / lp_norm(f, 2) < 1e-10);
}

TEST_CASE("LP projection is supported in its annulus") {
  const Grid g = Grid::centered(2, 64, 0.125);
  const auto f = random_field(g, 10);
  for (int k = 0; k <= max_resolvable_scale(g); ++k) {
    const auto spec = forward_dft(lp_projection(f, k));
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double xi = frequency_norm(g, i);
      if (xi <= std::ldexp(1.0, k - 1) || xi >= std::ldexp(1.0, k + 1)) CHECK(std::abs(spec[i]) < 1e-12);
    }
  }
}

TEST_CASE("continuous transform of a centred kernel is real") {
  const Grid g = Grid::centered(1, 1024, 1.0 / 32);
  const auto fam = heat_family({0.25}, g);
  const auto spec = continuous_transform(fam[0].samples());
  for (std::size_t i = 0; i < spec.size(); ++i) CHECK(std::abs(spec[i].imag()) < 1e-9);
}
