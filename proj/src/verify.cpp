#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "varpoint/errors.hpp"
#include "varpoint/experiments.hpp"
#include "varpoint/fourier.hpp"
#include "varpoint/rng.hpp"

namespace varpoint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dp_variation(const VerifyHooks& hooks, std::span<const Complex> a, VariationExponent r) {
  return hooks.variation ? hooks.variation(a, r) : variation(a, r);
}

std::size_t greedy_jumps(const VerifyHooks& hooks, std::span<const Complex> a, JumpThreshold lambda) {
  return hooks.jump_count ? hooks.jump_count(a, lambda) : jump_count(a, lambda);
}

VariationExponent exponent(double r) { return std::isinf(r) ? VariationExponent::infinity() : VariationExponent(r); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string describe(std::span<const Complex> a) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) os << ", ";
    if (a[i].imag() == 0.0) {
      os << a[i].real();
    } else {
      os << a[i].real() << (a[i].imag() < 0 ? "" : "+") << a[i].imag() << "i";
    }
  }
  os << "]";
  return os.str();
}

// Random sequences: complex, real, or drawn from a small value set so ties and
// exact threshold hits occur.
std::vector<Complex> random_sequence(Rng& rng, std::size_t max_length) {
  const auto n = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_length)));
  const auto style = rng.integer(0, 3);
  std::vector<Complex> a(n);
  for (auto& z : a) {
    switch (style) {
      case 0:
        z = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        break;
      case 1:
        z = Complex(rng.uniform(-1.0, 1.0), 0.0);
        break;
      case 2:
        z = Complex(0.5 * static_cast<double>(rng.integer(-3, 3)), 0.0);
        break;
      default:
        z = Complex(0.5 * static_cast<double>(rng.integer(-2, 2)), 0.5 * static_cast<double>(rng.integer(-2, 2)));
        break;
    }
  }
  return a;
}

// Sequences built around [0, 1, 0.9, 1.5]: a greedy that closes a pair too late
// or counts overlapping pairs gets these wrong.
std::vector<Complex> adversarial_sequence(Rng& rng, std::size_t max_length) {
  static const std::vector<std::vector<double>> patterns{
      {0.0, 1.0, 0.9, 1.5},
      {0.0, 1.0, 0.9, 1.5, 0.4, 1.6},
      {0.0, 0.6, 1.2, 0.1, 1.1, 0.0},
      {1.0, 0.0, 0.1, -0.5, 0.5, -0.5},
      {0.0, 1.0, 0.0, 1.0, 0.0, 1.0},
      {0.0, 0.5, 1.0, 1.5, 2.0, 2.5},
  };
  const auto& base = patterns[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(patterns.size()) - 1))];
  const double scale = rng.integer(0, 1) ? 1.0 : rng.uniform(0.5, 2.0);
  const double shift = rng.integer(0, 1) ? 0.0 : rng.uniform(-1.0, 1.0);
  std::vector<Complex> a;
  for (double v : base) {
    if (a.size() == max_length) break;
    a.emplace_back(scale * v + shift, 0.0);
  }
  return a;
}

std::vector<double> pairwise_gaps(std::span<const Complex> a) {
  std::vector<double> g;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double d = std::abs(a[i] - a[j]);
      if (d > 0.0) g.push_back(d);
    }
  }
  return g;
}

void record(PropertyResult& p, double margin, const std::string& witness) {
  ++p.trials;
  p.worst_margin = std::min(p.worst_margin, margin);
  if (margin < 0.0) {
    if (p.violations == 0) p.witness = witness;
    ++p.violations;
  }
}

std::string case_id(const char* suite, std::uint64_t seed, std::size_t index) {
  return std::string(suite) + ":" + std::to_string(seed) + ":" + std::to_string(index);
}

}  // namespace

std::vector<PropertyResult> variation_oracle_suite(const VerifyConfig& cfg, std::uint64_t seed,
                                                   const VerifyHooks& hooks) {
  std::vector<PropertyResult> out;
  for (std::size_t e = 0; e < cfg.variation_exponents.size(); ++e) {
    const double r = cfg.variation_exponents[e];
    PropertyResult p;
    p.name = "variation_oracle_r" + (std::isinf(r) ? std::string("inf") : fmt(r));
    for (std::size_t i = 0; i < cfg.variation_trials; ++i) {
      Rng rng(derive_seed(derive_seed(seed, e), i));
      const auto a = random_sequence(rng, cfg.variation_max_length);
      const double dp = dp_variation(hooks, a, exponent(r));
      const double bf = variation_bruteforce(a, exponent(r));
      const double err = std::abs(dp - bf);
      const double margin = bf > 0.0 ? 1e-10 - err / bf : (err == 0.0 ? 1e-10 : -err);
      record(p, margin,
             case_id("variation", seed, i) + " r=" + fmt(r) + " seq=" + describe(a) + " dp=" + fmt(dp) +
                 " oracle=" + fmt(bf));
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PropertyResult> jump_oracle_suite(const VerifyConfig& cfg, std::uint64_t seed, const VerifyHooks& hooks) {
  PropertyResult p;
  p.name = "jump_oracle";
  PropertyResult adv;
  adv.name = "jump_oracle_adversarial";
  for (std::size_t i = 0; i < cfg.jump_trials; ++i) {
    Rng rng(derive_seed(seed, i));
    const bool adversarial = i % 5 == 0;
    const auto a = adversarial ? adversarial_sequence(rng, cfg.jump_max_length) : random_sequence(rng, cfg.jump_max_length);
    const auto gaps = pairwise_gaps(a);
    for (std::size_t l = 0; l < cfg.jump_lambdas; ++l) {
      double lambda = 0.0;
      const auto pick = rng.integer(0, 2);
      if (pick == 0 && !gaps.empty()) {
        lambda = gaps[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(gaps.size()) - 1))];
      } else if (pick == 1 && !gaps.empty()) {
        lambda = 0.5 * gaps[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(gaps.size()) - 1))];
      } else {
        lambda = rng.uniform(0.01, 2.0);
      }
      if (adversarial && l == 0) lambda = 0.5;
      const auto fast = greedy_jumps(hooks, a, JumpThreshold(lambda));
      const auto slow = jump_count_bruteforce(a, JumpThreshold(lambda));
      const double margin = fast == slow ? 0.0 : -std::abs(static_cast<double>(fast) - static_cast<double>(slow));
      record(adversarial ? adv : p, margin,
             case_id("jump", seed, i) + " lambda=" + fmt(lambda) + " seq=" + describe(a) +
                 " greedy=" + std::to_string(fast) + " oracle=" + std::to_string(slow));
    }
  }
  return {p, adv};
}

std::vector<PropertyResult> inequality_suite(const VerifyConfig& cfg, std::uint64_t seed, const VerifyHooks& hooks) {
  static const std::vector<double> exponents{1.0, 1.25, 1.5, 2.0, 3.0, 4.0, kInf};
  PropertyResult jump_var{"jump_variation"}, telescoping{"v1_telescoping"}, diameter{"vinf_diameter"},
      monotone{"monotone_r"}, vinf_2m{"vinf_le_2m"}, anchor{"m_le_vinf_plus_anchor"}, sublinear{"sublinearity"},
      jump_sub{"jump_subadditivity"}, restriction{"restriction_monotone"};
  constexpr double tol = 1e-12;

  for (std::size_t i = 0; i < cfg.inequality_trials; ++i) {
    Rng rng(derive_seed(seed, i));
    auto a = random_sequence(rng, cfg.inequality_max_length);
    std::vector<Complex> b(a.size());
    for (auto& z : b) z = Complex(rng.uniform(-1.0, 1.0), rng.integer(0, 1) ? rng.uniform(-1.0, 1.0) : 0.0);
    std::vector<Complex> sum(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) sum[k] = a[k] + b[k];

    double r = exponents[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(exponents.size()) - 1))];
    if (rng.integer(0, 3) == 0) r = rng.uniform(1.0, 6.0);
    const auto R = exponent(r);
    const double v_inf = dp_variation(hooks, a, VariationExponent::infinity());
    const double lambda = (v_inf > 0.0 ? v_inf : 1.0) * rng.uniform(0.05, 1.2);
    const std::string id = case_id("inequality", seed, i) + " r=" + fmt(r) + " lambda=" + fmt(lambda) +
                           " a=" + describe(a) + " b=" + describe(b);

    const double v_r = dp_variation(hooks, a, R);
    const double m = maximal(a);

    {
      const double rj = std::isinf(r) ? 2.0 : r;
      const double v_rj = std::isinf(r) ? dp_variation(hooks, a, VariationExponent(rj)) : v_r;
      const auto n = static_cast<double>(greedy_jumps(hooks, a, JumpThreshold(lambda)));
      const double lhs = std::pow(lambda, rj) * n;
      const double rhs = 4.0 * std::pow(v_rj, rj);
      record(jump_var, (rhs - lhs) + tol * rhs, id);
    }

    double tele = 0.0;
    for (std::size_t k = 1; k < a.size(); ++k) tele += std::abs(a[k] - a[k - 1]);
    const double v1 = dp_variation(hooks, a, VariationExponent(1.0));
    record(telescoping, tol * std::max(tele, 1.0) - std::abs(v1 - tele), id);

    double diam = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) {
      for (std::size_t t = s + 1; t < a.size(); ++t) diam = std::max(diam, std::abs(a[s] - a[t]));
    }
    record(diameter, tol * std::max(diam, 1.0) - std::abs(v_inf - diam), id);

    double r2 = exponents[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(exponents.size()) - 1))];
    double r1 = r;
    if (r2 < r1) std::swap(r1, r2);
    const double vr1 = dp_variation(hooks, a, exponent(r1));
    const double vr2 = dp_variation(hooks, a, exponent(r2));
    record(monotone, vr1 - vr2 + tol * std::max(vr1, 1.0), id + " r1=" + fmt(r1) + " r2=" + fmt(r2));

    record(vinf_2m, 2.0 * m - v_inf + tol * std::max(m, 1.0), id);

    const auto t0 = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(a.size()) - 1));
    record(anchor, v_inf + std::abs(a[t0]) - m + tol * std::max(m, 1.0), id + " t0=" + std::to_string(t0));

    const double v_sum = dp_variation(hooks, sum, R);
    const double v_b = dp_variation(hooks, b, R);
    record(sublinear, v_r + v_b - v_sum + tol * std::max(v_r + v_b, 1.0), id);

    const auto n_sum = static_cast<double>(greedy_jumps(hooks, sum, JumpThreshold(lambda)));
    const auto n_a = static_cast<double>(greedy_jumps(hooks, a, JumpThreshold(lambda / 2.0)));
    const auto n_b = static_cast<double>(greedy_jumps(hooks, b, JumpThreshold(lambda / 2.0)));
    record(jump_sub, n_a + n_b - n_sum, id);

    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (rng.integer(0, 1)) keep.push_back(k);
    }
    if (keep.empty()) keep.push_back(0);
    std::vector<Complex> sub;
    for (auto k : keep) sub.push_back(a[k]);
    const double v_sub = dp_variation(hooks, sub, R);
    const double margin_v = v_r - v_sub + tol * std::max(v_r, 1.0);
    const double margin_m = m - maximal(sub);
    const double margin_n = static_cast<double>(greedy_jumps(hooks, a, JumpThreshold(lambda))) -
                            static_cast<double>(greedy_jumps(hooks, sub, JumpThreshold(lambda)));
    record(restriction, std::min({margin_v, margin_m, margin_n}), id);
  }
  return {jump_var, telescoping, diameter, monotone, vinf_2m, anchor, sublinear, jump_sub, restriction};
}

namespace {

GridFunction random_field(Rng& rng, const Grid& grid) {
  std::vector<Complex> s(grid.size());
  if (rng.integer(0, 1)) {
    for (auto& z : s) z = Complex(rng.normal(), rng.normal());
    return GridFunction(grid, std::move(s));
  }
  SimpleFunctionParams params;
  params.dim = grid.dim();
  params.num_terms = static_cast<int>(rng.integer(1, 4));
  params.kind = rng.integer(0, 1) ? RegionKind::ball : RegionKind::cube;
  params.region_scale = 2.0;
  params.window = grid.length() / 4.0;
  return rasterize(random_simple_function(rng.next(), params), grid);
}

// Largest violation of field(x) <= bound(x) + tol·scale over the lattice, as a margin.
double pointwise_margin(const GridFunction& lhs, const GridFunction& rhs, double tol) {
  double worst = kInf;
  const double scale = std::max(rhs.max_abs(), 1.0);
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    worst = std::min(worst, rhs[i].real() - lhs[i].real() + tol * scale);
  }
  return worst;
}

}  // namespace

std::vector<PropertyResult> field_suite(const VerifyConfig& cfg, std::uint64_t seed, int workers) {
  PropertyResult jump_var{"field_jump_variation"}, vinf_2m{"field_vinf_le_2m"}, monotone{"field_monotone_r"},
      sublinear{"field_sublinearity"}, subset{"field_index_subset"}, linear{"field_linearity"},
      invariance{"field_worker_invariance"};
  constexpr double tol = 1e-12;
  const Grid g1 = Grid::centered(1, 256, 0.25);
  const Grid g2 = Grid::centered(2, 64, 0.25);
  const KernelFamily f1 = dyadic_averages(4, 1, g1);
  const KernelFamily f2 = dyadic_averages(3, 2, g2);

  for (std::size_t i = 0; i < cfg.field_trials; ++i) {
    Rng rng(derive_seed(seed, i));
    const bool two_d = i % 2 == 1;
    const Grid& grid = two_d ? g2 : g1;
    const KernelFamily& fam = two_d ? f2 : f1;
    const std::string id = case_id("field", seed, i);
    const GridFunction f = random_field(rng, grid);
    const GridFunction g = random_field(rng, grid);
    const auto tf = apply_family(f, fam);
    const auto tg = apply_family(g, fam);
    const auto tfg = apply_family(f + g, fam);

    double lin = kInf;
    for (std::size_t t = 0; t < tf.size(); ++t) {
      const double scale = std::max({tf[t].max_abs(), tg[t].max_abs(), 1.0});
      const auto diff = tfg[t] - (tf[t] + tg[t]);
      lin = std::min(lin, 1e-10 * scale - diff.max_abs());
    }
    record(linear, lin, id);

    const auto v1 = operator_field(tf, OperatorSpec::variation(VariationExponent(1.0)), workers);
    const auto v2 = operator_field(tf, OperatorSpec::variation(VariationExponent(2.0)), workers);
    const auto vinf = operator_field(tf, OperatorSpec::variation(VariationExponent::infinity()), workers);
    const auto m = operator_field(tf, OperatorSpec::maximal(), workers);
    const double lambda = std::max(vinf.max_abs(), 1e-300) * rng.uniform(0.05, 0.8);
    const auto jump = operator_field(tf, OperatorSpec::jump(lambda, VariationExponent(2.0)), workers);

    record(jump_var, pointwise_margin(jump, v2 * 2.0, tol), id + " lambda=" + fmt(lambda));
    record(vinf_2m, pointwise_margin(vinf, m * 2.0, tol), id);
    record(monotone, std::min(pointwise_margin(v2, v1, tol), pointwise_margin(vinf, v2, tol)), id);

    const auto v2g = operator_field(tg, OperatorSpec::variation(VariationExponent(2.0)), workers);
    const auto v2fg = operator_field(tfg, OperatorSpec::variation(VariationExponent(2.0)), workers);
    const auto mg = operator_field(tg, OperatorSpec::maximal(), workers);
    const auto mfg = operator_field(tfg, OperatorSpec::maximal(), workers);
    record(sublinear, std::min(pointwise_margin(v2fg, v2 + v2g, 1e-10), pointwise_margin(mfg, m + mg, 1e-10)), id);

    std::vector<std::size_t> keep;
    for (std::size_t t = 0; t < fam.size(); ++t) {
      if (rng.integer(0, 1)) keep.push_back(t);
    }
    if (keep.empty()) keep.push_back(fam.size() - 1);
    auto sub_spec = OperatorSpec::variation(VariationExponent(2.0));
    sub_spec.index_subset = keep;
    const auto v2_sub = operator_field(tf, sub_spec, workers);
    auto sub_max = OperatorSpec::maximal();
    sub_max.index_subset = keep;
    const auto m_sub = operator_field(tf, sub_max, workers);
    record(subset, std::min(pointwise_margin(v2_sub, v2, tol), pointwise_margin(m_sub, m, tol)), id);

    const auto serial = operator_field(tf, OperatorSpec::variation(VariationExponent(2.0)), 1);
    const auto threaded = operator_field(tf, OperatorSpec::variation(VariationExponent(2.0)), 3);
    record(invariance, serial.samples().size() == threaded.samples().size() &&
                               std::equal(serial.samples().begin(), serial.samples().end(), threaded.samples().begin())
                           ? 0.0
                           : -1.0,
           id);
  }
  return {jump_var, vinf_2m, monotone, sublinear, subset, linear, invariance};
}

std::vector<PropertyResult> littlewood_paley_suite(const VerifyConfig& cfg, std::uint64_t seed) {
  PropertyResult localization{"lp_localization"}, telescoping{"lp_telescoping"}, partition{"lp_partition"},
      band_limited{"lp_band_limited_reconstruction"}, contraction{"lp_contraction"};
  const Grid g1 = Grid::centered(1, 1024, 1.0 / 16);
  const Grid g2 = Grid::centered(2, 128, 1.0 / 16);

  for (std::size_t i = 0; i < cfg.field_trials; ++i) {
    Rng rng(derive_seed(seed, i));
    const Grid& grid = i % 2 == 0 ? g1 : g2;
    const std::string id = case_id("littlewood_paley", seed, i);
    std::vector<Complex> s(grid.size());
    for (auto& z : s) z = Complex(rng.normal(), rng.normal());
    const GridFunction f(grid, std::move(s));
    const auto spec_f = forward_dft(f);
    double spec_max = 0.0;
    for (const auto& z : spec_f) spec_max = std::max(spec_max, std::abs(z));

    const int kmax = max_resolvable_scale(grid);
    const int k = static_cast<int>(rng.integer(1, kmax));
    const std::string kid = id + " k=" + std::to_string(k);

    const auto pk = lp_projection(f, k);
    const auto spec_p = forward_dft(pk);
    double leak = 0.0;
    for (std::size_t b = 0; b < spec_p.size(); ++b) {
      const double xi = frequency_norm(grid, b);
      if (xi <= std::ldexp(1.0, k - 1) || xi >= std::ldexp(1.0, k + 1)) leak = std::max(leak, std::abs(spec_p[b]));
    }
    record(localization, 1e-12 - leak / spec_max, kid);

    const auto low = lp_low(f, k);
    const auto low_prev = lp_low(f, k - 1);
    const double tele = (low - low_prev - pk).max_abs() / f.max_abs();
    record(telescoping, 1e-12 - tele, kid);

    const auto high = lp_high(f, k);
    record(partition, 1e-12 - (low + high - f).max_abs() / f.max_abs(), kid);

    record(contraction, lp_norm(f, 2.0) * (1.0 + 1e-12) - lp_norm(pk, 2.0), kid);

    // Waves with |ξ| <= 2^K are fixed by P_{<=K}.
    const int K = static_cast<int>(rng.integer(0, kmax));
    const double L = grid.length();
    const double limit = std::ldexp(1.0, K);
    const auto m_max = static_cast<std::int64_t>(std::floor(limit * L / (2.0 * std::numbers::pi)));
    std::vector<Complex> w(grid.size());
    const auto waves = rng.integer(1, 6);
    for (std::int64_t n = 0; n < waves; ++n) {
      std::array<double, 2> xi{0.0, 0.0};
      for (int a = 0; a < grid.dim(); ++a) {
        xi[a] = 2.0 * std::numbers::pi * static_cast<double>(rng.integer(-m_max, m_max)) / L;
      }
      if (std::hypot(xi[0], xi[1]) > limit) continue;
      const Complex c(rng.normal(), rng.normal());
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto x = grid.point(j);
        w[j] += c * std::exp(Complex(0.0, xi[0] * x[0] + xi[1] * x[1]));
      }
    }
    const GridFunction band(grid, std::move(w));
    const double norm = lp_norm(band, 2.0);
    if (norm > 0.0) {
      const double rel = lp_norm(lp_low(band, K) - band, 2.0) / norm;
      record(band_limited, 1e-6 - rel, id + " K=" + std::to_string(K));
    }
  }
  return {localization, telescoping, partition, band_limited, contraction};
}

namespace {

ResultRecord property_record(const ExperimentConfig& cfg, const PropertyResult& p, double ms) {
  ResultRecord rec;
  rec.experiment = cfg.experiment;
  rec.family_kind = "none";
  rec.op = "none";
  rec.quantity = p.name;
  rec.value = p.worst_margin;
  rec.reference = 0.0;
  rec.status = p.passed() ? "PASS" : "FAIL";
  rec.witness = p.witness;
  rec.detail = "trials=" + std::to_string(p.trials) + " violations=" + std::to_string(p.violations);
  rec.seed = cfg.seed;
  rec.runtime_ms = ms;
  return rec;
}

template <class F>
void run_suite(RunOutcome& out, const ExperimentConfig& cfg, F&& suite) {
  const auto start = std::chrono::steady_clock::now();
  const auto results = suite();
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  for (const auto& p : results) {
    out.records.push_back(property_record(cfg, p, ms / static_cast<double>(results.size())));
    if (!p.passed()) out.passed = false;
  }
}

}  // namespace

RunOutcome run_verify(const ExperimentConfig& cfg, const VerifyHooks& hooks) {
  RunOutcome out;
  const auto& v = cfg.verify;
  run_suite(out, cfg, [&] { return variation_oracle_suite(v, derive_seed(cfg.seed, 1), hooks); });
  run_suite(out, cfg, [&] { return jump_oracle_suite(v, derive_seed(cfg.seed, 2), hooks); });
  run_suite(out, cfg, [&] { return inequality_suite(v, derive_seed(cfg.seed, 3), hooks); });
  run_suite(out, cfg, [&] { return littlewood_paley_suite(v, derive_seed(cfg.seed, 4)); });
  run_suite(out, cfg, [&] { return field_suite(v, derive_seed(cfg.seed, 5), cfg.workers); });
  return out;
}

RunOutcome run_inequalities(const ExperimentConfig& cfg) {
  RunOutcome out;
  run_suite(out, cfg, [&] { return inequality_suite(cfg.verify, derive_seed(cfg.seed, 3)); });
  run_suite(out, cfg, [&] { return field_suite(cfg.verify, derive_seed(cfg.seed, 5), cfg.workers); });
  return out;
}

}  // namespace varpoint
