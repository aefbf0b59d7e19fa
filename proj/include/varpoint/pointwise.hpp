#pragma once

// T_t f = f * g_t for a whole family, and the pointwise fields
// V_r(T_t f(x)), λ N_λ(T_t f(x))^{1/r} and sup_t |T_t f(x)|.

#include <optional>
#include <string>
#include <vector>

#include "varpoint/grid.hpp"
#include "varpoint/kernels.hpp"
#include "varpoint/sequence.hpp"

namespace varpoint {

enum class OperatorKind { variation, jump_surrogate, maximal };

struct OperatorSpec {
  OperatorKind kind = OperatorKind::maximal;
  VariationExponent r{2.0};
  std::optional<double> lambda;               // jump_surrogate only
  std::vector<std::size_t> index_subset;      // empty: every t

  static OperatorSpec variation(VariationExponent r) { return {OperatorKind::variation, r, std::nullopt, {}}; }
  static OperatorSpec jump(double lambda, VariationExponent r) { return {OperatorKind::jump_surrogate, r, lambda, {}}; }
  static OperatorSpec maximal() { return {}; }

  /// Throws DomainError when parameters are missing or inconsistent for a family of length T.
  void validate(std::size_t T) const;
  /// Short label such as "variation_r2", "variation_rinf", "jump_r2", "maximal".
  std::string label() const;
  /// Same operator with a different jump size.
  OperatorSpec with_lambda(double lambda) const;
};

std::string to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(const std::string& name);

/// Entry t is convolve(f, g_t).
std::vector<GridFunction> apply_family(const GridFunction& f, const KernelFamily& fam);

/// Evaluates the operator on the trajectory at every lattice point. `workers` = 0
/// uses all hardware threads; the result does not depend on it.
GridFunction operator_field(const std::vector<GridFunction>& trajectories, const OperatorSpec& spec, int workers = 1);
GridFunction operator_field(const GridFunction& f, const KernelFamily& fam, const OperatorSpec& spec, int workers = 1);

}  // namespace varpoint
