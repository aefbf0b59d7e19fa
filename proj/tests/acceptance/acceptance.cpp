// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "varpoint/approximation.hpp"
#include "varpoint/experiments.hpp"
#include "varpoint/fourier.hpp"
#include "varpoint/rng.hpp"
#include "varpoint/sequence.hpp"
#include "varpoint/weaktype.hpp"

using namespace varpoint;

namespace {

struct Verdict {
  bool passed = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      note << " [" << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<Complex> random_complex(Rng& rng, std::size_t n) {
  std::vector<Complex> a(n);
  for (auto& z : a) z = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return a;
}

// 1. DP against bitmask enumeration.
void variation_oracle(Verdict& v) {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  std::size_t cases = 0;
  for (double r : {1.0, 1.5, 2.0, 3.0, HUGE_VAL}) {
    const auto R = std::isinf(r) ? VariationExponent::infinity() : VariationExponent(r);
    for (int i = 0; i < 500; ++i) {
      const auto a = random_complex(rng, static_cast<std::size_t>(rng.integer(1, 10)));
      const double expect = oracle::variation(a, r);
      const double got = variation(a, R);
      const double rel = expect == 0.0 ? std::abs(got) : std::abs(got - expect) / expect;
      worst = std::max(worst, rel);
      v.require(rel <= 1e-10, "mismatch");
      ++cases;
    }
  }
  const double secs = seconds_since(t0);
  v.require(secs < 10.0, "runtime");
  v.note << " cases=" << cases << " worst_rel=" << worst << " time=" << secs << "s";
}

// 2. Greedy jump count against chain enumeration.
void jump_oracle(Verdict& v) {
  Rng rng(202);
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  const std::vector<double> base{0, 1, 0.9, 1.5};
  for (int i = 0; i < 500; ++i) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 12));
    std::vector<Complex> a(n);
    if (i % 5 == 0) {
      // Perturbed, rescaled and shifted copies of [0, 1, 0.9, 1.5].
      const double scale = rng.uniform(0.5, 2.0);
      const double shift = rng.uniform(-1, 1);
      for (std::size_t k = 0; k < n; ++k) {
        a[k] = Complex(shift + scale * (base[k % 4] + 1.5 * static_cast<double>(k / 4)) + rng.uniform(-0.05, 0.05), 0);
      }
    } else if (i % 5 == 1) {
      for (auto& z : a) z = Complex(0.5 * static_cast<double>(rng.integer(-2, 2)), 0.0);
    } else {
      a = random_complex(rng, n);
    }
    std::vector<double> lambdas{0.5};
    if (i % 5 == 0) lambdas[0] = 0.5 * rng.uniform(0.5, 2.0);
    while (lambdas.size() < 5) {
      if (n >= 2 && lambdas.size() % 2 == 1) {
        const auto s = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 2));
        const auto t = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(s) + 1, static_cast<std::int64_t>(n) - 1));
        const double gap = std::abs(a[s] - a[t]);
        lambdas.push_back(gap > 0 ? gap : 0.25);
      } else {
        lambdas.push_back(rng.uniform(0.05, 1.5));
      }
    }
    for (double lambda : lambdas) {
      ++cases;
      if (jump_count(a, JumpThreshold(lambda)) != oracle::jumps(a, lambda)) ++mismatches;
    }
  }
  const std::vector<Complex> pattern{0, 1, 0.9, 1.5};
  ++cases;
  if (jump_count(pattern, JumpThreshold(0.5)) != 2 || oracle::jumps(pattern, 0.5) != 2) ++mismatches;
  v.require(mismatches == 0, "mismatch");
  v.note << " cases=" << cases << " mismatches=" << mismatches;
}

// 3. Pointwise inequalities on 10,000 random sequences.
void inequalities(Verdict& v) {
  VerifyConfig cfg;
  cfg.inequality_trials = 10000;
  const auto results = inequality_suite(cfg, 303);
  const std::vector<std::string> needed{"jump_variation", "v1_telescoping",     "vinf_diameter",
                                        "monotone_r",     "vinf_le_2m",         "m_le_vinf_plus_anchor",
                                        "sublinearity",   "jump_subadditivity"};
  std::size_t violations = 0;
  for (const auto& name : needed) {
    bool found = false;
    for (const auto& r : results) {
      if (r.name != name) continue;
      found = true;
      v.require(r.trials >= 10000, name + " trials");
      violations += r.violations;
    }
    v.require(found, name + " missing");
  }
  v.require(violations == 0, "violations");
  v.note << " properties=" << needed.size() << " violations=" << violations;
}

// 4. Littlewood-Paley localization, telescoping and reconstruction.
void littlewood_paley(Verdict& v) {
  double loc = 0.0;
  double tele = 0.0;
  double recon = 0.0;
  Rng rng(404);
  for (const auto& grid : {Grid::centered(1, 1024, 1.0 / 16), Grid::centered(2, 128, 1.0 / 16)}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Complex> s(grid.size());
      for (auto& z : s) z = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
      const GridFunction f(grid, s);
      const int kmax = max_resolvable_scale(grid);
      for (int k = 0; k <= kmax; ++k) {
        const auto spec = forward_dft(lp_projection(f, k));
        for (std::size_t i = 0; i < spec.size(); ++i) {
          const double xi = frequency_norm(grid, i);
          if (xi <= std::ldexp(1.0, k - 1) || xi >= std::ldexp(1.0, k + 1)) {
            loc = std::max(loc, std::abs(spec[i]) / static_cast<double>(grid.size()));
          }
        }
        if (k > 0) {
          const auto diff = lp_low(f, k) - lp_low(f, k - 1) - lp_projection(f, k);
          tele = std::max(tele, diff.max_abs());
        }
      }
      // Band-limited input: only frequencies well inside |ξ| <= 2^K.
      const int K = kmax - 1;
      auto spectrum = forward_dft(f);
      for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (frequency_norm(grid, i) > std::ldexp(1.0, K)) spectrum[i] = 0.0;
      }
      const auto band = inverse_dft(grid, spectrum);
      recon = std::max(recon, lp_norm(lp_low(band, K) - band, 2) / lp_norm(band, 2));
    }
  }
  v.require(loc <= 1e-12, "localization");
  v.require(tele <= 1e-12, "telescoping");
  v.require(recon < 1e-6, "reconstruction");
  v.note << " localization=" << loc << " telescoping=" << tele << " reconstruction=" << recon;
}

struct ConstructionSetup {
  Grid grid = Grid::centered(1, 4096, 0.125);
  KernelFamily family = mollify(dyadic_averages(8, 1, grid), 1.8);
};

TestFamilySpec construction_tests(RegionKind kind, double scale, std::uint64_t seed) {
  TestFamilySpec t;
  t.test_class = TestClass::simple_functions;
  t.count = 50;
  t.seed = seed;
  t.shape.kind = kind;
  t.shape.region_scale = scale;
  t.shape.window = 16.0;
  return t;
}

// 5. Moon indicator approximation.
void moon(Verdict& v, const ConstructionSetup& s) {
  const auto t0 = Clock::now();
  const auto tests = construction_tests(RegionKind::ball, 2.0, 505);
  double worst_gap = 0.0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < tests.count; ++i) {
    const auto f = generate_simple_test(tests, i);
    const auto m = moon_indicator(f, s.family, 0.01);
    const auto c = check_moon(f, m, s.family);
    const double l1 = lp_norm(rasterize(f, s.grid), 1);
    worst_gap = std::max(worst_gap, c.measure_gap / s.grid.cell_volume());
    worst_ratio = std::max(worst_ratio, c.sup_error / (l1 * 0.01));
    v.require(c.measure_gap <= s.grid.cell_volume(), "measure " + witness_id(tests, i));
    v.require(c.sup_error < l1 * 0.01, "sup error " + witness_id(tests, i));
  }
  const double secs = seconds_since(t0);
  v.require(secs < 120.0, "runtime");
  v.note << " inputs=" << tests.count << " worst_gap_cells=" << worst_gap << " worst_error/bound=" << worst_ratio
         << " time=" << secs << "s";
}

// 6. Carrillo-de Guzman point-mass approximation.
void cdg(Verdict& v, const ConstructionSetup& s) {
  const auto t0 = Clock::now();
  const auto tests = construction_tests(RegionKind::cube, 4.0, 606);
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < tests.count; ++i) {
    const auto f = generate_simple_test(tests, i);
    const auto c = cdg_point_masses(f, s.family, 0.01);
    const auto chk = check_cdg(f, c, s.family);
    const double l1 = lp_norm(rasterize(f, s.grid), 1);
    worst_ratio = std::max(worst_ratio, chk.sup_error / (2 * l1 * 0.01));
    v.require(chk.sup_error < 2 * l1 * 0.01, "sup error " + witness_id(tests, i));
  }
  const double secs = seconds_since(t0);
  v.require(secs < 120.0, "runtime");
  v.note << " inputs=" << tests.count << " worst_error/bound=" << worst_ratio << " time=" << secs << "s";
}

std::string records_text(std::vector<ResultRecord> records) { return records_to_csv(records, false); }

// 7. Indicators against simple functions.
void moon_equivalence(Verdict& v, std::string& csv) {
  const auto cfg = default_config("moon_equivalence", 1);
  v.require(cfg.grid.extent == 4096 && cfg.grid.dim == 1 && cfg.tests.count == 200, "config");
  const auto t0 = Clock::now();
  const auto run = run_moon_equivalence(cfg);
  const double secs = seconds_since(t0);
  std::size_t cells = 0;
  double worst = 0.0;
  for (const auto& r : run.records) {
    if (r.quantity != "C_general_over_C_restricted") continue;
    ++cells;
    const double ratio = *r.value / *r.reference;
    worst = std::max(worst, ratio);
    v.require(ratio <= 1.15, r.op);
  }
  v.require(cells == 3, "expected 3 operator cells");
  v.require(secs < 600.0, "runtime");
  v.note << " cells=" << cells << " worst_ratio=" << worst << " time=" << secs << "s";
  csv = records_text(run.records);
}

// 8. Point combs against simple functions, plus the weighted-comb checks.
void cdg_equivalence(Verdict& v, std::string& csv) {
  const auto cfg = default_config("cdg_equivalence", 1);
  v.require(cfg.combs.count == 200 && cfg.combs.max_points == 5 && cfg.tests.count == 200, "config");
  const auto run = run_cdg_equivalence(cfg);
  std::size_t cells = 0;
  std::size_t boosted = 0;
  double worst = 0.0;
  double worst_boost = 0.0;
  for (const auto& r : run.records) {
    if (r.quantity == "C_general_over_C_pointed") {
      ++cells;
      const double ratio = *r.value / *r.reference;
      worst = std::max(worst, ratio);
      v.require(ratio <= 1.15, r.op);
    } else if (r.quantity == "pointed_boosted_check") {
      ++boosted;
      worst_boost = std::max(worst_boost, *r.ratio);
      v.require(r.status == "PASS" && *r.ratio <= 1.0, "boosted " + r.witness);
    }
  }
  v.require(cells == 3, "expected 3 operator cells");
  v.require(boosted > 0, "no boosted records");
  v.note << " cells=" << cells << " worst_ratio=" << worst << " boosted=" << boosted
         << " worst_boosted_ratio=" << worst_boost;
  csv = records_text(run.records);
}

double least_squares_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 9. High-frequency decay of the heat and circle families.
void smoothing(Verdict& v, std::string& csv) {
  const auto cfg = default_config("smoothing", 1);
  const auto t0 = Clock::now();
  const auto run = run_smoothing(cfg);
  const double secs = seconds_since(t0);
  bool saw_heat = false;
  bool saw_sphere = false;
  for (const auto& r : run.records) {
    if (r.quantity != "decay") continue;
    if (r.family_kind == "heat") {
      saw_heat = true;
      v.require(r.series.size() >= 2, "heat series");
      for (std::size_t i = 1; i < r.series.size(); ++i) {
        v.require(r.series[i].second < r.series[i - 1].second, "heat not decreasing");
      }
      v.require(r.series.back().second < 0.01, "heat final value");
      v.note << " heat_final=" << r.series.back().second;
    } else if (r.family_kind == "sphere") {
      saw_sphere = true;
      v.require(r.grid_extent == 512 && r.dim == 2, "sphere grid");
      std::vector<std::pair<double, double>> logs;
      for (const auto& [k, y] : r.series) logs.emplace_back(k, std::log2(y));
      const double slope = least_squares_slope(logs);
      v.require(std::abs(slope + 0.5) <= 0.1, "sphere slope");
      v.note << " sphere_slope=" << slope;
    }
  }
  v.require(saw_heat && saw_sphere, "missing curves");
  v.require(secs < 300.0, "runtime");
  v.note << " time=" << secs << "s";
  csv = records_text(run.records);
}

// 10. Reruns are byte-identical apart from timing.
void determinism(Verdict& v, const std::vector<std::pair<std::string, std::string>>& first) {
  for (const auto& [name, csv] : first) {
    const auto again = records_text(run_experiment(default_config(name, 1)).records);
    v.require(again == csv, name);
  }
  for (const char* name : {"verify", "inequalities", "estimate"}) {
    const auto cfg = default_config(name, 1);
    v.require(records_text(run_experiment(cfg).records) == records_text(run_experiment(cfg).records), name);
  }
  v.note << " experiments=" << first.size() + 3;
}

}  // namespace

int main() {
  int failed = 0;
  const auto run = [&](int id, const std::string& title, const std::function<void(Verdict&)>& body) {
    Verdict v;
    try {
      body(v);
    } catch (const std::exception& e) {
      v.passed = false;
      v.note << " exception: " << e.what();
    }
    if (!v.passed) ++failed;
    std::cout << (v.passed ? "PASS" : "FAIL") << "  " << id << " " << title << ":" << v.note.str() << std::endl;
  };

  run(1, "variation DP equals brute force", variation_oracle);
  run(2, "jump greedy equals brute force", jump_oracle);
  run(3, "inequality suite", inequalities);
  run(4, "Littlewood-Paley suite", littlewood_paley);
  std::unique_ptr<ConstructionSetup> setup;
  try {
    setup = std::make_unique<ConstructionSetup>();
  } catch (const std::exception& e) {
    std::cerr << "construction setup failed: " << e.what() << "\n";
  }
  run(5, "Moon construction", [&](Verdict& v) {
    if (!setup) throw std::runtime_error("no mollified family");
    moon(v, *setup);
  });
  run(6, "CdG construction", [&](Verdict& v) {
    if (!setup) throw std::runtime_error("no mollified family");
    cdg(v, *setup);
  });
  std::vector<std::pair<std::string, std::string>> outputs(3);
  outputs[0].first = "moon_equivalence";
  outputs[1].first = "cdg_equivalence";
  outputs[2].first = "smoothing";
  run(7, "indicator equivalence", [&](Verdict& v) { moon_equivalence(v, outputs[0].second); });
  run(8, "pointed equivalence", [&](Verdict& v) { cdg_equivalence(v, outputs[1].second); });
  run(9, "smoothing decay", [&](Verdict& v) { smoothing(v, outputs[2].second); });
  run(10, "determinism", [&](Verdict& v) { determinism(v, outputs); });
  std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
