#include "varpoint/kernels.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "varpoint/errors.hpp"
#include "varpoint/fourier.hpp"

namespace varpoint {

namespace {

// Unnormalised bump exp(-1/(1-u²)) on (-1, 1).
double raw_bump(double u) {
  const double q = 1.0 - u * u;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

// Cumulative distribution of the unit bump on [-1, 1], tabulated and
// interpolated with cubic Hermite segments (the derivative is the bump itself).
class BumpCdf {
 public:
  static constexpr int kCells = 2048;

  BumpCdf() : values_(kCells + 1) {
    double acc = 0.0;
    values_[0] = 0.0;
    for (int i = 0; i < kCells; ++i) {
      acc += boost::math::quadrature::gauss<double, 10>::integrate(raw_bump, node(i), node(i + 1));
      values_[i + 1] = acc;
    }
    norm_ = acc;
    for (auto& v : values_) v /= norm_;
  }

  double density(double u) const { return raw_bump(u) / norm_; }

  double operator()(double u) const {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double pos = (u + 1.0) * 0.5 * kCells;
    const int i = std::min(static_cast<int>(pos), kCells - 1);
    const double s = pos - i;
    const double dx = 2.0 / kCells;
    const double y0 = values_[i];
    const double y1 = values_[i + 1];
    const double m0 = density(node(i)) * dx;
    const double m1 = density(node(i + 1)) * dx;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
  }

 private:
  static double node(int i) { return -1.0 + 2.0 * i / kCells; }
  std::vector<double> values_;
  double norm_ = 1.0;
};

const BumpCdf& bump_cdf() {
  static const BumpCdf cdf;
  return cdf;
}

// 1D bump of support diameter w and its distribution function.
double bump1(double w, double y) { return (2.0 / w) * bump_cdf().density(2.0 * y / w); }
double bump1_cdf(double w, double y) { return bump_cdf()(2.0 * y / w); }

double gaussian1(double t, double x) { return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * M_PI * t); }

// ∫ f(y) bump_w(y) dy with a breakpoint at `split` when it falls inside the support.
template <class F>
double against_bump(double w, double split, F&& f) {
  auto integrand = [&](double y) { return f(y) * bump1(w, y); };
  const double a = -0.5 * w;
  const double b = 0.5 * w;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (split > a && split < b) return GK::integrate(integrand, a, split, 12, 1e-11) + GK::integrate(integrand, split, b, 12, 1e-11);
  return GK::integrate(integrand, a, b, 12, 1e-11);
}

bool base_supports_mollified_evaluator(const KernelShape& base, int dim) {
  if (std::holds_alternative<BoxShape>(base) || std::holds_alternative<GaussianShape>(base)) return true;
  return std::holds_alternative<PoissonShape>(base) && dim == 1;
}

double mollified_value(const MollifiedShape& m, int dim, const Point& x) {
  const double w = m.width;
  if (const auto* box = std::get_if<BoxShape>(&m.base)) {
    const double r = box->radius;
    if (dim == 1) return (bump1_cdf(w, x[0] + r) - bump1_cdf(w, x[0] - r)) / (2.0 * r);
    // Disk: integrate the chord through x along the second axis in closed form.
    const double lo = std::max(-0.5 * w, x[0] - r);
    const double hi = std::min(0.5 * w, x[0] + r);
    if (!(lo < hi)) return 0.0;
    auto chord = [&](double y1) {
      const double d = x[0] - y1;
      const double s = std::sqrt(std::max(0.0, r * r - d * d));
      return (bump1_cdf(w, x[1] + s) - bump1_cdf(w, x[1] - s)) * bump1(w, y1);
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    return GK::integrate(chord, lo, hi, 12, 1e-11) / (M_PI * r * r);
  }
  if (const auto* g = std::get_if<GaussianShape>(&m.base)) {
    double acc = 1.0;
    for (int a = 0; a < dim; ++a) {
      const double xa = x[a];
      acc *= against_bump(w, xa, [&](double y) { return gaussian1(g->time, xa - y); });
    }
    return acc;
  }
  if (const auto* p = std::get_if<PoissonShape>(&m.base); p && dim == 1) {
    const double s = p->scale;
    return against_bump(w, x[0], [&](double y) {
      const double d = x[0] - y;
      return s / (M_PI * (s * s + d * d));
    });
  }
  throw UnsupportedError("mollified kernel has no analytic point evaluator");
}

std::vector<double> sample_shape(const KernelShape& shape, const Grid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Point p = grid.point(i);
    for (int a = 0; a < grid.dim(); ++a) p[a] = grid.wrap(p[a]);
    out[i] = evaluate_shape(shape, grid.dim(), p);
  }
  return out;
}

double riemann_mass(const std::vector<double>& v, const Grid& grid) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc * grid.cell_volume();
}

// Samples rescaled so the lattice mass is exactly `mass`; returns the factor used.
double normalise(std::vector<double>& v, const Grid& grid, double mass) {
  const double raw = riemann_mass(v, grid);
  if (mass == 0.0 || raw == 0.0) return 1.0;
  const double scale = mass / raw;
  for (auto& x : v) x *= scale;
  return scale;
}

KernelEntry sampled_entry(const KernelShape& shape, const Grid& grid, double mass, double tv) {
  auto values = sample_shape(shape, grid);
  if (riemann_mass(values, grid) <= 0.0) throw DomainError("kernel has no mass on this lattice; refine the grid");
  const double scale = normalise(values, grid, mass);
  return KernelEntry(GridFunction::from_real(grid, values), shape, mass, tv, scale);
}

}  // namespace

bool has_point_evaluator(const KernelShape& shape, int dim) {
  if (std::holds_alternative<AnnulusShape>(shape) || std::holds_alternative<SampledShape>(shape)) return false;
  if (const auto* m = std::get_if<std::shared_ptr<const MollifiedShape>>(&shape)) {
    return base_supports_mollified_evaluator((*m)->base, dim);
  }
  return true;
}

double evaluate_shape(const KernelShape& shape, int dim, const Point& x) {
  const double r2 = dim == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1];
  if (const auto* box = std::get_if<BoxShape>(&shape)) {
    if (!Region::ball({0.0, 0.0}, box->radius).contains(x, dim)) return 0.0;
    return dim == 1 ? 1.0 / (2.0 * box->radius) : 1.0 / (M_PI * box->radius * box->radius);
  }
  if (const auto* g = std::get_if<GaussianShape>(&shape)) {
    return std::exp(-r2 / (4.0 * g->time)) / std::pow(4.0 * M_PI * g->time, 0.5 * dim);
  }
  if (const auto* p = std::get_if<PoissonShape>(&shape)) {
    const double s = p->scale;
    if (dim == 1) return s / (M_PI * (s * s + r2));
    return s / (2.0 * M_PI * std::pow(s * s + r2, 1.5));
  }
  if (const auto* m = std::get_if<std::shared_ptr<const MollifiedShape>>(&shape)) {
    if (!base_supports_mollified_evaluator((*m)->base, dim)) {
      throw UnsupportedError("mollified kernel has no analytic point evaluator");
    }
    return mollified_value(**m, dim, x);
  }
  throw UnsupportedError("kernel has no analytic point evaluator (sampled or singular measure)");
}

double mollifier_density(double width, int dim, const Point& x) {
  double acc = 1.0;
  for (int a = 0; a < dim; ++a) acc *= bump1(width, x[a]);
  return acc;
}

KernelEntry::KernelEntry(GridFunction samples, KernelShape shape, double total_mass, double tv_norm, double eval_scale)
    : samples_(std::move(samples)),
      shape_(std::move(shape)),
      total_mass_(total_mass),
      tv_norm_(tv_norm),
      eval_scale_(eval_scale) {
  if (!std::isfinite(tv_norm_) || tv_norm_ < std::abs(total_mass_) - 1e-12) {
    throw NormalizationError("kernel entry needs a finite tv_norm >= |total_mass|");
  }
}

bool KernelEntry::has_evaluator() const { return has_point_evaluator(shape_, samples_.grid().dim()); }

double KernelEntry::evaluate(const Point& displacement) const {
  return eval_scale_ * evaluate_shape(shape_, samples_.grid().dim(), displacement);
}

KernelFamily::KernelFamily(std::string kind, std::vector<KernelEntry> entries, std::optional<double> mollifier_width)
    : kind_(std::move(kind)), entries_(std::move(entries)), mollifier_width_(mollifier_width) {
  if (entries_.empty()) throw DomainError("kernel family needs at least one entry");
  for (const auto& e : entries_) {
    if (!(e.samples().grid() == entries_.front().samples().grid())) {
      throw DomainError("kernel family entries live on different grids");
    }
  }
}

KernelFamily KernelFamily::from_samples(std::string kind, std::vector<GridFunction> kernels) {
  std::vector<KernelEntry> entries;
  entries.reserve(kernels.size());
  for (auto& k : kernels) {
    Complex mass = 0.0;
    for (const auto& z : k.samples()) mass += z;
    mass *= k.grid().cell_volume();
    const double tv = lp_norm(k, 1.0);
    entries.emplace_back(std::move(k), SampledShape{}, mass.real(), std::max(tv, std::abs(mass.real())));
  }
  return KernelFamily(std::move(kind), std::move(entries));
}

KernelFamily dyadic_averages(int T, int dim, const Grid& grid) {
  if (T < 0) throw DomainError("dyadic_averages: T must be non-negative");
  if (dim != grid.dim()) throw DomainError("dyadic_averages: dimension does not match the grid");
  if (2.0 * std::ldexp(1.0, T) > grid.length()) {
    throw DomainError("dyadic_averages: radius 2^T exceeds the grid extent");
  }
  std::vector<KernelEntry> entries;
  for (int t = 0; t <= T; ++t) entries.push_back(sampled_entry(BoxShape{std::ldexp(1.0, t)}, grid, 1.0, 1.0));
  return KernelFamily("dyadic_averages", std::move(entries));
}

KernelFamily heat_family(const std::vector<double>& times, const Grid& grid) {
  if (times.empty()) throw DomainError("heat_family: no times given");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || !std::isfinite(times[i])) throw DomainError("heat_family: times must be positive");
    if (i > 0 && times[i] < times[i - 1]) throw DomainError("heat_family: times must be sorted");
  }
  std::vector<KernelEntry> entries;
  for (double t : times) entries.push_back(sampled_entry(GaussianShape{t}, grid, 1.0, 1.0));
  return KernelFamily("heat", std::move(entries));
}

KernelFamily poisson_family(const std::vector<double>& scales, const Grid& grid) {
  if (scales.empty()) throw DomainError("poisson_family: no scales given");
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("poisson_family: scales must be positive");
  }
  std::vector<KernelEntry> entries;
  for (double s : scales) entries.push_back(sampled_entry(PoissonShape{s}, grid, 1.0, 1.0));
  return KernelFamily("poisson", std::move(entries));
}

KernelFamily sphere_family(const std::vector<double>& radii, const Grid& grid) {
  if (grid.dim() != 2) throw UnsupportedError("sphere_family needs d = 2");
  if (radii.empty()) throw DomainError("sphere_family: no radii given");
  const double h = grid.spacing();
  std::vector<KernelEntry> entries;
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("sphere_family: radius must be positive");
    if (r + 2.0 * h > 0.5 * grid.length()) throw DomainError("sphere_family: radius exceeds the grid");
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point p = grid.point(i);
      const double rho = std::hypot(grid.wrap(p[0]), grid.wrap(p[1]));
      values[i] = std::max(0.0, 1.0 - std::abs(rho - r) / h) / (2.0 * M_PI * r * h);
    }
    normalise(values, grid, 1.0);
    entries.emplace_back(GridFunction::from_real(grid, values), AnnulusShape{r}, 1.0, 1.0);
  }
  return KernelFamily("sphere", std::move(entries));
}

KernelFamily identity_family(std::size_t count, const Grid& grid) {
  if (count == 0) throw DomainError("identity_family: count must be positive");
  std::vector<Complex> values(grid.size(), 0.0);
  const auto z0 = static_cast<std::size_t>(grid.zero_index(0));
  const auto z1 = grid.dim() == 2 ? static_cast<std::size_t>(grid.zero_index(1)) : 0;
  values[grid.flat_index(z0, z1)] = 1.0 / grid.cell_volume();
  std::vector<KernelEntry> entries;
  for (std::size_t t = 0; t < count; ++t) entries.emplace_back(GridFunction(grid, values), SampledShape{}, 1.0, 1.0);
  return KernelFamily("identity", std::move(entries));
}

KernelFamily mollify_with_width(const KernelFamily& family, double width) {
  if (!(width > 0.0)) throw DomainError("mollifier width must be positive");
  const Grid& grid = family.grid();
  std::optional<GridFunction> bump;
  std::vector<KernelEntry> entries;
  for (const auto& e : family.entries()) {
    KernelShape shape = std::make_shared<const MollifiedShape>(MollifiedShape{e.shape(), width});
    if (base_supports_mollified_evaluator(e.shape(), grid.dim())) {
      auto values = sample_shape(shape, grid);
      const double scale = normalise(values, grid, e.total_mass());
      entries.emplace_back(GridFunction::from_real(grid, values), shape, e.total_mass(), e.tv_norm(), scale);
      continue;
    }
    if (!bump) {
      std::vector<double> b(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        Point p = grid.point(i);
        for (int a = 0; a < grid.dim(); ++a) p[a] = grid.wrap(p[a]);
        b[i] = mollifier_density(width, grid.dim(), p);
      }
      if (riemann_mass(b, grid) <= 0.0) throw ResolutionError("mollifier narrower than the lattice");
      normalise(b, grid, 1.0);
      bump = GridFunction::from_real(grid, b);
    }
    entries.emplace_back(convolve(e.samples(), *bump), shape, e.total_mass(), e.tv_norm());
  }
  return KernelFamily(family.kind(), std::move(entries), width);
}

double max_l1_distance(const KernelFamily& a, const KernelFamily& b) {
  if (a.size() != b.size()) throw DomainError("families differ in length");
  double worst = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    worst = std::max(worst, lp_norm(a[t].samples() - b[t].samples(), 1.0));
  }
  return worst;
}

KernelFamily mollify(const KernelFamily& family, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("mollify: epsilon must be positive");
  const Grid& grid = family.grid();
  double lo = 4.0 * grid.spacing();
  double hi = 0.25 * grid.length();
  KernelFamily best = mollify_with_width(family, lo);
  if (!(max_l1_distance(family, best) < epsilon)) {
    throw ResolutionError("mollify: epsilon = " + std::to_string(epsilon) +
                          " is not attainable with a bump of four cells; refine the grid");
  }
  if (hi <= lo) return best;
  KernelFamily widest = mollify_with_width(family, hi);
  if (max_l1_distance(family, widest) < epsilon) return widest;
  for (int iter = 0; iter < 20; ++iter) {
    const double mid = std::sqrt(lo * hi);
    KernelFamily candidate = mollify_with_width(family, mid);
    if (max_l1_distance(family, candidate) < epsilon) {
      lo = mid;
      best = std::move(candidate);
    } else {
      hi = mid;
    }
  }
  return best;
}

GridFunction comb_convolve(const PointConfiguration& pc, const KernelEntry& kernel, const Grid& grid) {
  if (!kernel.has_evaluator()) throw UnsupportedError("comb_convolve: kernel has no analytic point evaluator");
  if (grid.dim() != kernel.samples().grid().dim()) throw DomainError("comb_convolve: dimension mismatch");
  return comb_convolve(pc, [&](const Point& x) { return kernel.evaluate(x); }, grid);
}

}  // namespace varpoint
