#pragma once

// Config-driven experiments: invariant suites, the indicator/simple-function
// and comb/simple-function equivalence searches, and the high-frequency
// smoothing study. Each run returns ResultRecords; see report.hpp for output.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "varpoint/kernels.hpp"
#include "varpoint/pointwise.hpp"
#include "varpoint/report.hpp"
#include "varpoint/sequence.hpp"
#include "varpoint/weaktype.hpp"

namespace varpoint {

struct GridConfig {
  int dim = 1;
  std::size_t extent = 4096;
  double spacing = 0.125;
  Grid make() const { return Grid::centered(dim, extent, spacing); }
};

struct FamilyConfig {
  std::string kind = "dyadic_averages";  // dyadic_averages | heat | poisson | sphere | identity
  int T = 6;                             // dyadic_averages: entries 0..T; identity: T entries
  std::vector<double> params;            // times, scales or radii
  std::optional<double> mollify_epsilon;
  KernelFamily make(const Grid& grid) const;
};

struct OperatorConfig {
  OperatorKind kind = OperatorKind::maximal;
  std::optional<VariationExponent> r;
  std::vector<double> jump_lambdas;  // jump operators: the constant is the sup over these
  std::string label() const;
};

struct VerifyConfig {
  std::size_t variation_trials = 500;    // per exponent
  std::size_t variation_max_length = 10;
  std::vector<double> variation_exponents{1.0, 1.5, 2.0, 3.0, INFINITY};
  std::size_t jump_trials = 500;
  std::size_t jump_max_length = 12;
  std::size_t jump_lambdas = 5;          // thresholds per sequence
  std::size_t inequality_trials = 10000;
  std::size_t inequality_max_length = 16;
  std::size_t field_trials = 20;         // pointwise-field and Littlewood–Paley inputs
};

struct DecayCurveConfig {
  std::string name;
  GridConfig grid;
  FamilyConfig family;
  double p = 2.0;
  int k_min = 0;
  int k_max = 5;
  std::size_t probes = 16;
  bool expect_decreasing = false;
  std::optional<double> expect_final_below;
  std::optional<double> expect_slope;
  double slope_tolerance = 0.1;
  bool expect_not_smoothing = false;
};

struct DecompositionConfig {
  bool enabled = true;
  GridConfig grid{1, 4096, 1.0 / 32};
  FamilyConfig family{"heat", 0, {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}, std::nullopt};
  OperatorConfig op{OperatorKind::variation, VariationExponent(2.0), {}};
  double lambda = 0.5;
  double p = 2.0;
  double q = 1.0;
  std::size_t count = 3;
  SimpleFunctionParams shape;  // ball regions
};

struct EstimateConfig {
  Convention convention = Convention::weak_1q;
  OperatorConfig op;
  double exponent = 1.0;  // q for weak/restricted, p for pointed/strong
};

struct ExperimentConfig {
  std::string experiment = "verify";  // verify | moon_equivalence | cdg_equivalence | smoothing | inequalities | estimate
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "csv";
  int workers = 0;

  GridConfig grid;
  FamilyConfig family;
  std::vector<OperatorConfig> operators;
  std::vector<double> q_values{1.0};
  std::vector<double> p_values{1.0};
  TestFamilySpec tests;    // simple functions / indicators; class is set by each run
  TestFamilySpec combs;    // point combs
  std::size_t weighted_count = 50;
  std::uint64_t indicator_seed_offset = 1;  // indicators use seed + offset so the two searches are independent
  double tolerance = 0.15;
  bool proof_chain = true;

  VerifyConfig verify;
  std::vector<DecayCurveConfig> decay;
  DecompositionConfig decomposition;
  EstimateConfig estimate;
};

/// Parse a JSON config. Malformed JSON is reported as "line L, column C";
/// schema violations name the offending key. A seed is mandatory.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
/// Built-in settings for an experiment name (the configs/ files mirror these).
ExperimentConfig default_config(const std::string& experiment, std::uint64_t seed = 1);
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

struct PropertyResult {
  PropertyResult() = default;
  explicit PropertyResult(std::string n) : name(std::move(n)) {}

  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_margin = INFINITY;  // smallest slack observed; negative means violated
  std::string witness;             // first violating case
  bool passed() const { return violations == 0; }
};

/// Replaceable implementations, so the harness itself can be tested against faulty ones.
struct VerifyHooks {
  std::function<double(std::span<const Complex>, VariationExponent)> variation;
  std::function<std::size_t(std::span<const Complex>, JumpThreshold)> jump_count;
};

std::vector<PropertyResult> variation_oracle_suite(const VerifyConfig& cfg, std::uint64_t seed,
                                                   const VerifyHooks& hooks = {});
std::vector<PropertyResult> jump_oracle_suite(const VerifyConfig& cfg, std::uint64_t seed,
                                              const VerifyHooks& hooks = {});
std::vector<PropertyResult> inequality_suite(const VerifyConfig& cfg, std::uint64_t seed,
                                             const VerifyHooks& hooks = {});
std::vector<PropertyResult> field_suite(const VerifyConfig& cfg, std::uint64_t seed, int workers = 1);
std::vector<PropertyResult> littlewood_paley_suite(const VerifyConfig& cfg, std::uint64_t seed);

struct RunOutcome {
  std::vector<ResultRecord> records;
  bool passed = true;
};

RunOutcome run_verify(const ExperimentConfig& cfg, const VerifyHooks& hooks = {});
RunOutcome run_inequalities(const ExperimentConfig& cfg);
RunOutcome run_moon_equivalence(const ExperimentConfig& cfg);
RunOutcome run_cdg_equivalence(const ExperimentConfig& cfg);
RunOutcome run_smoothing(const ExperimentConfig& cfg);
RunOutcome run_estimate(const ExperimentConfig& cfg);
/// Dispatch on cfg.experiment.
RunOutcome run_experiment(const ExperimentConfig& cfg);

}  // namespace varpoint
