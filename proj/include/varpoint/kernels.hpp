#pragma once

// Convolution families (g_t) and (μ_t) on a lattice: normalised ball averages
// at dyadic radii, heat and Poisson kernels, one-cell annulus densities that
// stand in for circle measures, and mollified versions of all of these.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "varpoint/grid.hpp"

namespace varpoint {

struct BoxShape {
  double radius;  // normalised indicator of the ball of this radius
};
struct GaussianShape {
  double time;  // variance 2t, ĝ(ξ) = exp(-t|ξ|²)
};
struct PoissonShape {
  double scale;  // ĝ(ξ) = exp(-s|ξ|)
};
struct AnnulusShape {
  double radius;  // circle measure smeared over one cell; no point evaluator
};
struct SampledShape {};  // known only through its samples
struct MollifiedShape;

using KernelShape =
    std::variant<BoxShape, GaussianShape, PoissonShape, AnnulusShape, SampledShape, std::shared_ptr<const MollifiedShape>>;

struct MollifiedShape {
  KernelShape base;
  double width;  // support diameter of the bump (per axis)
};

bool has_point_evaluator(const KernelShape& shape, int dim);

/// Unnormalised point value of a shape at displacement x.
double evaluate_shape(const KernelShape& shape, int dim, const Point& x);

/// Smooth unit-mass bump supported in [-width/2, width/2]^d (product of 1D bumps).
double mollifier_density(double width, int dim, const Point& x);

class KernelEntry {
 public:
  KernelEntry(GridFunction samples, KernelShape shape, double total_mass, double tv_norm, double eval_scale = 1.0);

  const GridFunction& samples() const { return samples_; }
  const KernelShape& shape() const { return shape_; }
  double total_mass() const { return total_mass_; }
  double tv_norm() const { return tv_norm_; }

  bool has_evaluator() const;
  /// g(x) consistent with the stored samples; throws UnsupportedError without an analytic form.
  double evaluate(const Point& displacement) const;

 private:
  GridFunction samples_;
  KernelShape shape_;
  double total_mass_;
  double tv_norm_;
  double eval_scale_;
};

class KernelFamily {
 public:
  KernelFamily(std::string kind, std::vector<KernelEntry> entries, std::optional<double> mollifier_width = {});

  /// Wrap arbitrary sampled kernels (tv_norm taken as the lattice L¹ norm).
  static KernelFamily from_samples(std::string kind, std::vector<GridFunction> kernels);

  const std::string& kind() const { return kind_; }
  const std::vector<KernelEntry>& entries() const { return entries_; }
  const KernelEntry& operator[](std::size_t t) const { return entries_[t]; }
  std::size_t size() const { return entries_.size(); }
  const Grid& grid() const { return entries_.front().samples().grid(); }
  std::optional<double> mollifier_width() const { return mollifier_width_; }

 private:
  std::string kind_;
  std::vector<KernelEntry> entries_;
  std::optional<double> mollifier_width_;
};

/// Entries t = 0..T: normalised indicator of the ball of radius 2^t (T + 1 kernels).
KernelFamily dyadic_averages(int T, int dim, const Grid& grid);

/// Heat kernels (4πt)^{-d/2} exp(-|x|²/4t), one per time.
KernelFamily heat_family(const std::vector<double>& times, const Grid& grid);

/// Poisson kernels with ĝ(ξ) = exp(-s|ξ|).
KernelFamily poisson_family(const std::vector<double>& scales, const Grid& grid);

/// d = 2 only: unit-mass circle measures of the given radii, deposited on the
/// lattice with a linear (one-cell) radial profile.
KernelFamily sphere_family(const std::vector<double>& radii, const Grid& grid);

/// Every entry replaced by a unit-mass value at the origin cell, h^{-d} there.
KernelFamily identity_family(std::size_t count, const Grid& grid);

/// Convolve each kernel with a bump of the given width.
KernelFamily mollify_with_width(const KernelFamily& family, double width);

/// Largest bump width (found by bisection) for which max_t ‖g_t - h_t‖_1 < ε on
/// the lattice. Throws ResolutionError when even a four-cell bump is too wide.
KernelFamily mollify(const KernelFamily& family, double epsilon);

/// max_t ‖g_t - h_t‖_1 between two families on the same lattice.
double max_l1_distance(const KernelFamily& a, const KernelFamily& b);

/// Σ_k w_k g(x - x_k) using the entry's analytic evaluator.
GridFunction comb_convolve(const PointConfiguration& pc, const KernelEntry& kernel, const Grid& grid);

}  // namespace varpoint
