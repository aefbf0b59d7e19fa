#pragma once

// Exact variation, jump and maximal functionals of finite complex sequences.
//
// A sequence here is the trajectory (T_t f(x))_t of a family of operators at a
// single point x. All functionals are sup-type quantities over increasing index
// subsequences; the fast versions are exact (not approximations) and each has an
// exponential brute-force oracle for testing.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace varpoint {

using Complex = std::complex<double>;

/// Exponent r in [1, ∞] of the r-variation.
class VariationExponent {
 public:
  explicit VariationExponent(double r);
  static VariationExponent infinity();

  double value() const { return r_; }
  bool is_infinite() const;

 private:
  double r_;
};

/// Strictly positive jump size λ.
class JumpThreshold {
 public:
  explicit JumpThreshold(double lambda);
  double value() const { return lambda_; }

 private:
  double lambda_;
};

/// Non-empty trajectory, optionally tagged with the original indices it was
/// taken from (a finite index set ℛ).
class SampleSequence {
 public:
  explicit SampleSequence(std::vector<Complex> values);
  SampleSequence(std::vector<Complex> values, std::vector<std::size_t> index_subset);
  static SampleSequence from_real(std::span<const double> values);

  std::span<const Complex> values() const { return values_; }
  const std::optional<std::vector<std::size_t>>& index_subset() const { return index_subset_; }
  std::size_t size() const { return values_.size(); }
  bool is_real() const;

  /// Keep only the given positions (strictly increasing, in range).
  SampleSequence restrict_to(std::span<const std::size_t> positions) const;

 private:
  std::vector<Complex> values_;
  std::optional<std::vector<std::size_t>> index_subset_;
};

inline constexpr std::size_t kVariationOracleMaxLength = 20;
inline constexpr std::size_t kJumpOracleMaxLength = 14;

/// V_r: sup over increasing subsequences of (Σ |a_{t_i} - a_{t_{i+1}}|^r)^{1/r}.
/// O(n²) dynamic programme; r = ∞ gives the diameter max_{i<j} |a_i - a_j|.
double variation(std::span<const Complex> seq, VariationExponent r);
double variation(const SampleSequence& seq, VariationExponent r);

/// Enumerates every increasing subsequence. Throws SizeError above 20 samples.
double variation_bruteforce(std::span<const Complex> seq, VariationExponent r);

/// N_λ: the largest number of pairs s_0 < t_0 <= s_1 < t_1 <= ... with
/// |a_{s_i} - a_{t_i}| > λ. Earliest-finish greedy; O(n) for real data.
std::size_t jump_count(std::span<const Complex> seq, JumpThreshold lambda);
std::size_t jump_count(const SampleSequence& seq, JumpThreshold lambda);

/// Exhaustive search over pair chains. Throws SizeError above 14 samples.
std::size_t jump_count_bruteforce(std::span<const Complex> seq, JumpThreshold lambda);

/// λ · N_λ^{1/r}; r must be finite.
double jump_surrogate(std::span<const Complex> seq, JumpThreshold lambda, VariationExponent r);
double jump_surrogate(const SampleSequence& seq, JumpThreshold lambda, VariationExponent r);

/// max_i |a_i|.
double maximal(std::span<const Complex> seq);
double maximal(const SampleSequence& seq);

}  // namespace varpoint
