#pragma once

// Sampled functions on a periodic d-dimensional lattice (d = 1 or 2), simple
// functions built from dyadic cubes and balls, and point configurations.
//
// Conventions:
//  * sample (i0, i1) sits at origin + (i0, i1) * h and is stored at i0 * n + i1;
//  * the origin is an integer multiple of h, so the lattice contains 0;
//  * the lattice is a torus of side L = n h for convolution purposes;
//  * cubes are half-open [a, a + s)^d, balls include exactly the boundary points
//    whose offset from the centre is lexicographically negative (in 1D this is
//    the interval [c - r, c + r)). Both choices make adjacent regions disjoint.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace varpoint {

using Complex = std::complex<double>;
using Point = std::array<double, 2>;

class Grid {
 public:
  Grid(int dim, std::size_t extent, double spacing, Point origin);
  /// Origin at -(n/2) h on every axis.
  static Grid centered(int dim, std::size_t extent, double spacing);

  int dim() const { return dim_; }
  std::size_t extent() const { return extent_; }
  double spacing() const { return spacing_; }
  const Point& origin() const { return origin_; }

  std::size_t size() const;
  double cell_volume() const;
  double length() const { return static_cast<double>(extent_) * spacing_; }
  /// Sample index of the coordinate 0 along each axis.
  std::int64_t zero_index(int axis) const;

  Point point(std::size_t flat) const;
  std::array<std::size_t, 2> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::size_t i0, std::size_t i1 = 0) const { return dim_ == 1 ? i0 : i0 * extent_ + i1; }
  /// Reduce a displacement to the torus fundamental domain [-L/2, L/2).
  double wrap(double displacement) const;
  /// Nyquist angular frequency π / h.
  double nyquist() const;

  bool operator==(const Grid& other) const = default;

 private:
  int dim_;
  std::size_t extent_;
  double spacing_;
  Point origin_;
};

class GridFunction {
 public:
  explicit GridFunction(Grid grid);  // all zero
  GridFunction(Grid grid, std::vector<Complex> samples);
  static GridFunction from_real(Grid grid, std::span<const double> samples);

  const Grid& grid() const { return grid_; }
  std::span<const Complex> samples() const { return samples_; }
  const Complex& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }

  std::vector<double> real_part() const;
  double max_abs() const;

  GridFunction operator+(const GridFunction& other) const;
  GridFunction operator-(const GridFunction& other) const;
  GridFunction operator*(double scale) const;

 private:
  Grid grid_;
  std::vector<Complex> samples_;
};

struct DyadicCube {
  int level = 0;                        // side 2^{-level}
  std::array<std::int64_t, 2> corner{};  // lower corner = corner * side
  double side() const;
  Point lower() const;
  Point center() const;
  bool operator==(const DyadicCube&) const = default;
};

struct Ball {
  Point center{};
  double radius = 1.0;
};

class Region {
 public:
  Region(DyadicCube cube);  // NOLINT(google-explicit-constructor)
  Region(Ball ball);        // NOLINT(google-explicit-constructor)
  static Region cube(int level, std::array<std::int64_t, 2> corner) { return Region(DyadicCube{level, corner}); }
  static Region ball(Point center, double radius) { return Region(Ball{center, radius}); }

  bool is_cube() const { return std::holds_alternative<DyadicCube>(shape_); }
  bool is_ball() const { return std::holds_alternative<Ball>(shape_); }
  const DyadicCube& as_cube() const { return std::get<DyadicCube>(shape_); }
  const Ball& as_ball() const { return std::get<Ball>(shape_); }

  bool contains(const Point& p, int dim) const;
  double measure(int dim) const;
  double diameter(int dim) const;
  /// Axis-aligned bounding box [lo, hi] per axis.
  std::pair<Point, Point> bounds(int dim) const;

 private:
  std::variant<DyadicCube, Ball> shape_;
};

struct Term {
  double coefficient = 1.0;
  Region region;
};

struct SimpleFunction {
  int dim = 1;
  std::vector<Term> terms;

  /// Σ |a_k| |F_k| (continuum measure; exact when regions are disjoint).
  double l1_norm() const;
  double max_coefficient() const;
};

struct PointConfiguration {
  int dim = 1;
  std::vector<Point> points;
  std::vector<double> weights;  // empty means all ones

  PointConfiguration() = default;
  PointConfiguration(int d, std::vector<Point> pts, std::vector<double> w = {});
  double weight(std::size_t k) const { return weights.empty() ? 1.0 : weights[k]; }
};

GridFunction rasterize(const SimpleFunction& sf, const Grid& grid);

/// h^d · #{i : |f_i| > λ}.
double level_measure(const GridFunction& f, double lambda);

/// (h^d Σ |f_i|^p)^{1/p}; p = ∞ gives the max modulus.
double lp_norm(const GridFunction& f, double p);

/// Split dyadic cubes until every side is <= max_side. Nested input cubes are
/// first split so that the output cubes are pairwise disjoint; coefficients of
/// coinciding cubes add.
SimpleFunction dyadic_refine(const SimpleFunction& sf, double max_side);

enum class RegionKind { cube, ball };

struct SimpleFunctionParams {
  int dim = 1;
  int num_terms = 1;
  RegionKind kind = RegionKind::cube;
  double coeff_min = 0.05;     // coefficients drawn from [coeff_min, 1] then rescaled to max 1
  double region_scale = 1.0;   // largest radius (ball) or side (cube)
  double region_min_scale = 0;  // smallest; 0 means region_scale / 8
  double window = 8.0;         // regions lie in [-window, window)^d
  double snap = 0.0;           // if > 0, ball centres and radii are multiples of snap
  bool indicator = false;      // all coefficients 1
};

/// Disjoint random regions with coefficients in (0, 1] and max coefficient 1.
SimpleFunction random_simple_function(std::uint64_t seed, const SimpleFunctionParams& params);

using PointEvaluator = std::function<double(const Point&)>;

/// Σ_k w_k g(x - x_k) evaluated directly at every lattice point (torus displacement).
GridFunction comb_convolve(const PointConfiguration& pc, const PointEvaluator& kernel, const Grid& grid);

/// JSON header + base64 of little-endian (re, im) float64 pairs.
std::string serialize(const GridFunction& f);
GridFunction deserialize(std::string_view text);

}  // namespace varpoint
