#pragma once

// Finite-search estimates of weak, restricted weak, pointed weak and strong
// type constants, and of the high-frequency decay sup_t ‖T_t P_{>k}‖_{p→p}.
// Every constant here is a lower bound of a supremum over a random test set.

#include <cstdint>
#include <string>
#include <vector>

#include "varpoint/grid.hpp"
#include "varpoint/kernels.hpp"
#include "varpoint/pointwise.hpp"

namespace varpoint {

enum class TestClass { indicators, simple_functions, point_combs, weighted_combs };
enum class Convention { weak_1q, restricted_1q, pointed_pp, strong_pp };

std::string to_string(TestClass c);
std::string to_string(Convention c);
TestClass test_class_from_string(const std::string& name);

struct TestFamilySpec {
  TestClass test_class = TestClass::simple_functions;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::vector<double> lambda_grid;  // empty: automatic grid 2^{j/s} over the field's range
  int steps_per_octave = 32;        // s for the automatic grid

  // simple functions and indicators
  SimpleFunctionParams shape;       // num_terms is drawn from [min_terms, max_terms]
  int min_terms = 1;
  int max_terms = 5;

  // point combs
  int min_points = 1;
  int max_points = 5;
  double point_window = 8.0;        // points in [-window, window)^d
  double point_snap = 0.0;          // if > 0, coordinates are multiples of this
  int max_denominator = 4;          // weighted combs: weights m/q with q <= this, m <= 2q

  void validate() const;
};

/// Identifier "class:seed:index" that regenerates one test input in isolation.
std::string witness_id(const TestFamilySpec& spec, std::size_t index);

/// The index-th test input of the family (dim from spec.shape.dim).
SimpleFunction generate_simple_test(const TestFamilySpec& spec, std::size_t index);
PointConfiguration generate_comb_test(const TestFamilySpec& spec, std::size_t index);

struct ProfilePoint {
  double lambda;
  double objective;  // best over the test set at this λ
};

struct WeakTypeEstimate {
  double constant = 0.0;
  std::string witness_input;
  double witness_lambda = 0.0;
  Convention convention = Convention::weak_1q;
  std::size_t evaluated = 0;            // test inputs with non-zero norm
  std::vector<ProfilePoint> profile;    // increasing λ
};

/// The λ values used for a field: the explicit grid, or 2^{j/s} for every j
/// between the smallest positive value (entries below 1e-12·max count as zero)
/// and the maximum. Closed under doubling.
std::vector<double> lambda_values(const GridFunction& field, const TestFamilySpec& spec);

/// sup over tests f and λ of λ^q |{Of > λ}| / ‖f‖_1.
WeakTypeEstimate weak_constant(const KernelFamily& fam, const OperatorSpec& op, const TestFamilySpec& tests, double q,
                               int workers = 1);

/// sup over tests f and λ of λ^p |{Of > λ}| / ‖f‖_p^p (equals weak_constant at p = 1).
WeakTypeEstimate weak_pp_constant(const KernelFamily& fam, const OperatorSpec& op, const TestFamilySpec& tests, double p,
                                  int workers = 1);

/// weak_constant restricted to indicator inputs.
WeakTypeEstimate restricted_constant(const KernelFamily& fam, const OperatorSpec& op, const TestFamilySpec& tests,
                                     double q, int workers = 1);

/// Operator field of the comb Σ_k w_k g_t(· - x_k), with the kernels evaluated analytically.
GridFunction comb_field(const KernelFamily& fam, const OperatorSpec& op, const PointConfiguration& pc,
                        int workers = 1);

/// sup over configurations X and λ of λ^p |{O(Σ_{y∈X} g_t(·-y)) > λ}| / #X.
WeakTypeEstimate pointed_constant(const KernelFamily& fam, const OperatorSpec& op, const TestFamilySpec& tests,
                                  double p, int workers = 1);

/// Objective λ^p |{O(comb) > λ}| / #X for one unweighted configuration at one λ.
double pointed_objective(const KernelFamily& fam, const OperatorSpec& op, const PointConfiguration& pc, double p,
                         double lambda, int workers = 1);

struct BoostedCheck {
  bool passed = false;
  double ratio = 0.0;                 // λ^p |{O(weighted comb) > λ}| / (C Σ a_k^p)
  double measure = 0.0;
  double c_pointed = 0.0;             // constant actually used
  double replicated_objective = 0.0;  // pointed objective of the replicated multiset
  std::size_t denominator = 1;
};

/// Weighted combs with rational weights m_k/n. The weighted comb is 1/n times
/// the unweighted comb in which x_k is repeated m_k times, so the pointed
/// inequality for that multiset at level nλ (and jump size nλ_jump) bounds the
/// weighted level set. C is max(c_pointed_search, that multiset's objective).
BoostedCheck pointed_boosted_check(const KernelFamily& fam, const OperatorSpec& op, const PointConfiguration& weighted,
                                   double p, double lambda, double c_pointed_search, int workers = 1);

/// ‖Of‖_p / ‖f‖_p. Throws DomainError for f = 0.
double strong_norm(const KernelFamily& fam, const OperatorSpec& op, const GridFunction& f, double p, int workers = 1);

struct DecayPoint {
  int k;
  double value;
  bool exact;  // false: random-probe lower bound
};

/// sup_t ‖T_t P_{>k}‖_{p→p} for k in [k_min, k_max]. Exact at p = 2 (largest
/// multiplier modulus); otherwise the best of `probes` random unit vectors.
std::vector<DecayPoint> smoothing_decay(const KernelFamily& fam, double p, int k_min, int k_max,
                                        std::size_t probes = 16, std::uint64_t seed = 0);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log|ĝ(ξ)| against log|ξ| for |ξ| in [lo, hi], using the RMS of the
/// transform over shells of unit width.
double fourier_decay_slope(const KernelEntry& entry, double lo, double hi);

}  // namespace varpoint
