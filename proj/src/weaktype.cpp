#include "varpoint/weaktype.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "varpoint/errors.hpp"
#include "varpoint/fourier.hpp"
#include "varpoint/parallel.hpp"
#include "varpoint/rng.hpp"

namespace varpoint {

std::string to_string(TestClass c) {
  switch (c) {
    case TestClass::indicators:
      return "indicators";
    case TestClass::simple_functions:
      return "simple_functions";
    case TestClass::point_combs:
      return "point_combs";
    case TestClass::weighted_combs:
      return "weighted_combs";
  }
  return "unknown";
}

std::string to_string(Convention c) {
  switch (c) {
    case Convention::weak_1q:
      return "weak_1q";
    case Convention::restricted_1q:
      return "restricted_1q";
    case Convention::pointed_pp:
      return "pointed_pp";
    case Convention::strong_pp:
      return "strong_pp";
  }
  return "unknown";
}

TestClass test_class_from_string(const std::string& name) {
  if (name == "indicators") return TestClass::indicators;
  if (name == "simple_functions") return TestClass::simple_functions;
  if (name == "point_combs") return TestClass::point_combs;
  if (name == "weighted_combs") return TestClass::weighted_combs;
  throw DomainError("unknown test class '" + name + "'");
}

void TestFamilySpec::validate() const {
  if (count < 1) throw DomainError("test family needs count >= 1");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) throw DomainError("lambda grid entries must be positive");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) throw DomainError("lambda grid must be increasing");
  }
  if (steps_per_octave < 1) throw DomainError("steps_per_octave must be >= 1");
  if (min_terms < 1 || max_terms < min_terms) throw DomainError("bad term-count range");
  if (min_points < 1 || max_points < min_points) throw DomainError("bad point-count range");
  if (max_denominator < 1) throw DomainError("max_denominator must be >= 1");
}

std::string witness_id(const TestFamilySpec& spec, std::size_t index) {
  return to_string(spec.test_class) + ":" + std::to_string(spec.seed) + ":" + std::to_string(index);
}

SimpleFunction generate_simple_test(const TestFamilySpec& spec, std::size_t index) {
  Rng rng(derive_seed(spec.seed, index));
  SimpleFunctionParams params = spec.shape;
  params.num_terms = static_cast<int>(rng.integer(spec.min_terms, spec.max_terms));
  params.indicator = spec.test_class == TestClass::indicators;
  return random_simple_function(rng.next(), params);
}

PointConfiguration generate_comb_test(const TestFamilySpec& spec, std::size_t index) {
  Rng rng(derive_seed(spec.seed, index));
  const int dim = spec.shape.dim;
  const auto k = static_cast<std::size_t>(rng.integer(spec.min_points, spec.max_points));
  std::vector<Point> pts(k, Point{0.0, 0.0});
  std::vector<double> weights;
  for (auto& p : pts) {
    for (int a = 0; a < dim; ++a) {
      double x = rng.uniform(-spec.point_window, spec.point_window);
      if (spec.point_snap > 0.0) x = std::floor(x / spec.point_snap) * spec.point_snap;
      p[a] = x;
    }
  }
  if (spec.test_class == TestClass::weighted_combs) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto q = rng.integer(1, spec.max_denominator);
      const auto m = rng.integer(1, 2 * q);
      weights.push_back(static_cast<double>(m) / static_cast<double>(q));
    }
  }
  return PointConfiguration(dim, std::move(pts), std::move(weights));
}

namespace {

// Sorted descending magnitudes of the field, for level counts by binary search.
std::vector<double> sorted_magnitudes(const GridFunction& field) {
  std::vector<double> v(field.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(field[i]);
  std::sort(v.begin(), v.end());
  return v;
}

double level_from_sorted(const std::vector<double>& ascending, double lambda, double cell) {
  const auto it = std::upper_bound(ascending.begin(), ascending.end(), lambda);
  return static_cast<double>(ascending.end() - it) * cell;
}

struct Candidate {
  double objective = -1.0;
  double lambda = 0.0;
  std::vector<std::pair<double, double>> per_lambda;  // (λ, objective)
  bool evaluated = false;
};

// Level-set objective λ^e |{field > λ}| / norm at every λ of the test's grid.
Candidate score_field(const GridFunction& field, double norm, double exponent, const TestFamilySpec& spec) {
  Candidate c;
  if (!(norm > 0.0)) return c;
  c.evaluated = true;
  const auto sorted = sorted_magnitudes(field);
  const double cell = field.grid().cell_volume();
  for (double lambda : lambda_values(field, spec)) {
    const double obj = std::pow(lambda, exponent) * level_from_sorted(sorted, lambda, cell) / norm;
    c.per_lambda.push_back({lambda, obj});
    if (obj > c.objective) {
      c.objective = obj;
      c.lambda = lambda;
    }
  }
  return c;
}

WeakTypeEstimate reduce(const std::vector<Candidate>& cands, const TestFamilySpec& spec, Convention conv) {
  WeakTypeEstimate est;
  est.convention = conv;
  bool any = false;
  std::map<double, double> profile;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& c = cands[i];
    if (!c.evaluated) continue;
    ++est.evaluated;
    for (const auto& [lambda, obj] : c.per_lambda) {
      auto [it, inserted] = profile.emplace(lambda, obj);
      if (!inserted) it->second = std::max(it->second, obj);
    }
    if (!any || c.objective > est.constant) {
      any = true;
      est.constant = std::max(0.0, c.objective);
      est.witness_input = witness_id(spec, i);
      est.witness_lambda = c.lambda;
    }
  }
  if (!any) throw DomainError("every test input has zero norm");
  for (const auto& [lambda, obj] : profile) est.profile.push_back({lambda, obj});
  return est;
}

WeakTypeEstimate simple_function_search(const KernelFamily& fam, const OperatorSpec& op, const TestFamilySpec& tests,
                                        double q, int workers, Convention conv, double norm_p = 1.0) {
  tests.validate();
  op.validate(fam.size());
  std::vector<Candidate> cands(tests.count);
  parallel_for(tests.count, workers, [&](std::size_t i) {
    const GridFunction f = rasterize(generate_simple_test(tests, i), fam.grid());
    const double norm = std::pow(lp_norm(f, norm_p), norm_p);
    if (!(norm > 0.0)) return;
    cands[i] = score_field(operator_field(f, fam, op), norm, q, tests);
  });
  return reduce(cands, tests, conv);
}

double sum_weight_powers(const PointConfiguration& pc, double p) {
  double acc = 0.0;
  for (std::size_t k = 0; k < pc.points.size(); ++k) acc += std::pow(pc.weight(k), p);
  return acc;
}

}  // namespace

std::vector<double> lambda_values(const GridFunction& field, const TestFamilySpec& spec) {
  if (!spec.lambda_grid.empty()) return spec.lambda_grid;
  const double top = field.max_abs();
  if (!(top > 0.0)) return {};
  double bottom = top;
  for (const auto& z : field.samples()) {
    const double a = std::abs(z);
    if (a > 1e-12 * top) bottom = std::min(bottom, a);
  }
  const int s = spec.steps_per_octave;
  const auto j_lo = static_cast<long>(std::floor(s * std::log2(bottom))) - 1;
  const auto j_hi = static_cast<long>(std::ceil(s * std::log2(top)));
  std::vector<double> out;
  for (long j = j_lo; j <= j_hi; ++j) {
    const long whole = j >= 0 ? j / s : -((-j + s - 1) / s);
    const long frac = j - whole * s;
    out.push_back(std::ldexp(std::exp2(static_cast<double>(frac) / s), static_cast<int>(whole)));
  }
  return out;
}

WeakTypeEstimate weak_constant(const KernelFamily& fam, const OperatorSpec& op, const TestFamilySpec& tests, double q,
                               int workers) {
  if (tests.test_class != TestClass::simple_functions && tests.test_class != TestClass::indicators) {
    throw DomainError("weak_constant needs simple functions or indicators");
  }
  return simple_function_search(fam, op, tests, q, workers, Convention::weak_1q);
}

WeakTypeEstimate weak_pp_constant(const KernelFamily& fam, const OperatorSpec& op, const TestFamilySpec& tests, double p,
                                  int workers) {
  if (tests.test_class != TestClass::simple_functions && tests.test_class != TestClass::indicators) {
    throw DomainError("weak_pp_constant needs simple functions or indicators");
  }
  if (!(p >= 1.0)) throw DomainError("weak_pp_constant: p must be >= 1");
  return simple_function_search(fam, op, tests, p, workers, Convention::weak_1q, p);
}

WeakTypeEstimate restricted_constant(const KernelFamily& fam, const OperatorSpec& op, const TestFamilySpec& tests,
                                     double q, int workers) {
  if (tests.test_class != TestClass::indicators) throw DomainError("restricted_constant needs indicator tests");
  return simple_function_search(fam, op, tests, q, workers, Convention::restricted_1q);
}

GridFunction comb_field(const KernelFamily& fam, const OperatorSpec& op, const PointConfiguration& pc, int workers) {
  if (pc.dim != fam.grid().dim()) throw DomainError("comb dimension does not match the family");
  std::vector<GridFunction> traj;
  traj.reserve(fam.size());
  for (const auto& entry : fam.entries()) traj.push_back(comb_convolve(pc, entry, fam.grid()));
  return operator_field(traj, op, workers);
}

WeakTypeEstimate pointed_constant(const KernelFamily& fam, const OperatorSpec& op, const TestFamilySpec& tests,
                                  double p, int workers) {
  tests.validate();
  op.validate(fam.size());
  if (tests.test_class != TestClass::point_combs) throw DomainError("pointed_constant needs point_combs tests");
  for (const auto& e : fam.entries()) {
    if (!e.has_evaluator()) throw UnsupportedError("pointed_constant: kernels need an analytic evaluator");
  }
  std::vector<Candidate> cands(tests.count);
  parallel_for(tests.count, workers, [&](std::size_t i) {
    const PointConfiguration pc = generate_comb_test(tests, i);
    cands[i] = score_field(comb_field(fam, op, pc), static_cast<double>(pc.points.size()), p, tests);
  });
  return reduce(cands, tests, Convention::pointed_pp);
}

double pointed_objective(const KernelFamily& fam, const OperatorSpec& op, const PointConfiguration& pc, double p,
                         double lambda, int workers) {
  const GridFunction field = comb_field(fam, op, pc, workers);
  return std::pow(lambda, p) * level_measure(field, lambda) / static_cast<double>(pc.points.size());
}

BoostedCheck pointed_boosted_check(const KernelFamily& fam, const OperatorSpec& op, const PointConfiguration& weighted,
                                   double p, double lambda, double c_pointed_search, int workers) {
  if (!(lambda > 0.0)) throw DomainError("pointed_boosted_check: lambda must be positive");
  if (!(p >= 1.0)) throw DomainError("pointed_boosted_check: p must be >= 1");
  for (std::size_t k = 0; k < weighted.points.size(); ++k) {
    if (!(weighted.weight(k) > 0.0)) throw DomainError("pointed_boosted_check: weights must be positive");
  }
  // Smallest common denominator n with every n·a_k an integer.
  std::size_t n = 0;
  for (std::size_t cand = 1; cand <= 720720 && n == 0; ++cand) {
    bool ok = true;
    for (std::size_t k = 0; k < weighted.points.size() && ok; ++k) {
      const double m = weighted.weight(k) * static_cast<double>(cand);
      ok = std::abs(m - std::round(m)) <= 1e-9 * std::max(1.0, m);
    }
    if (ok) n = cand;
  }
  if (n == 0) throw DomainError("pointed_boosted_check: weights must be rationals with small denominators");

  PointConfiguration replicated;
  replicated.dim = weighted.dim;
  for (std::size_t k = 0; k < weighted.points.size(); ++k) {
    const auto m = static_cast<std::size_t>(std::llround(weighted.weight(k) * static_cast<double>(n)));
    for (std::size_t r = 0; r < m; ++r) replicated.points.push_back(weighted.points[k]);
  }
  const double scale = static_cast<double>(n);
  OperatorSpec scaled = op;
  if (op.kind == OperatorKind::jump_surrogate) scaled.lambda = *op.lambda * scale;

  BoostedCheck out;
  out.denominator = n;
  out.replicated_objective = pointed_objective(fam, scaled, replicated, p, scale * lambda, workers);
  out.c_pointed = std::max(c_pointed_search, out.replicated_objective);
  out.measure = level_measure(comb_field(fam, op, weighted, workers), lambda);
  const double bound = out.c_pointed * sum_weight_powers(weighted, p);
  out.ratio = bound > 0.0 ? std::pow(lambda, p) * out.measure / bound : (out.measure > 0.0 ? INFINITY : 0.0);
  out.passed = out.ratio <= 1.0 + 1e-9;
  return out;
}

double strong_norm(const KernelFamily& fam, const OperatorSpec& op, const GridFunction& f, double p, int workers) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("strong_norm: p must lie in [1, inf)");
  const double denom = lp_norm(f, p);
  if (!(denom > 0.0)) throw DomainError("strong_norm: f is zero");
  return lp_norm(operator_field(f, fam, op, workers), p) / denom;
}

std::vector<DecayPoint> smoothing_decay(const KernelFamily& fam, double p, int k_min, int k_max, std::size_t probes,
                                        std::uint64_t seed) {
  if (!(p >= 1.0)) throw DomainError("smoothing_decay: p must be >= 1");
  const Grid& grid = fam.grid();
  if (k_max > max_resolvable_scale(grid)) throw DomainError("smoothing_decay: k beyond the Nyquist frequency");
  if (k_min > k_max) throw DomainError("smoothing_decay: empty k range");
  const BumpProfile phi;
  std::vector<DecayPoint> out;
  if (p == 2.0) {
    std::vector<std::vector<double>> moduli;
    for (const auto& e : fam.entries()) {
      const auto spec = continuous_transform(e.samples());
      std::vector<double> m(spec.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(spec[i]);
      moduli.push_back(std::move(m));
    }
    for (int k = k_min; k <= k_max; ++k) {
      double worst = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double cut = 1.0 - phi(std::ldexp(frequency_norm(grid, i), -k));
        if (cut <= 0.0) continue;
        for (const auto& m : moduli) worst = std::max(worst, m[i] * cut);
      }
      out.push_back({k, worst, true});
    }
    return out;
  }
  Rng rng(seed);
  std::vector<GridFunction> vectors;
  for (std::size_t j = 0; j < probes; ++j) {
    std::vector<double> v(grid.size());
    for (auto& x : v) x = rng.normal();
    GridFunction u = GridFunction::from_real(grid, v);
    vectors.push_back(u * (1.0 / lp_norm(u, p)));
  }
  for (int k = k_min; k <= k_max; ++k) {
    double worst = 0.0;
    for (const auto& u : vectors) {
      const GridFunction high = lp_high(u, k);
      for (const auto& e : fam.entries()) worst = std::max(worst, lp_norm(convolve(high, e.samples()), p));
    }
    out.push_back({k, worst, false});
  }
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_slope needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("fit_slope: x values are all equal");
  return sxy / sxx;
}

double fourier_decay_slope(const KernelEntry& entry, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("fourier_decay_slope: need 0 < lo < hi");
  const Grid& grid = entry.samples().grid();
  if (hi > grid.nyquist()) throw DomainError("fourier_decay_slope: range beyond the Nyquist frequency");
  const auto spec = continuous_transform(entry.samples());
  const auto shells = static_cast<std::size_t>(std::ceil(hi - lo));
  std::vector<double> sum(shells, 0.0);
  std::vector<double> mean_xi(shells, 0.0);
  std::vector<std::size_t> count(shells, 0);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double xi = frequency_norm(grid, i);
    if (xi < lo || xi >= hi) continue;
    const auto s = static_cast<std::size_t>(xi - lo);
    sum[s] += std::norm(spec[i]);
    mean_xi[s] += xi;
    ++count[s];
  }
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t s = 0; s < shells; ++s) {
    if (count[s] == 0) continue;
    const double c = static_cast<double>(count[s]);
    x.push_back(std::log(mean_xi[s] / c));
    y.push_back(0.5 * std::log(sum[s] / c));
  }
  return fit_slope(x, y);
}

}  // namespace varpoint
