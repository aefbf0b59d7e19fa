#pragma once

// Replacing a simple function by an indicator (Moon) or by a weighted comb of
// point masses (Carrillo–de Guzmán) without moving any T_t f by more than ε‖f‖_1.

#include <vector>

#include "json.hpp"
#include "varpoint/grid.hpp"
#include "varpoint/kernels.hpp"

namespace varpoint {

/// Max over t, lattice displacements v with |v| < delta and lattice x of |g_t(x + v) - g_t(x)|.
double lattice_oscillation(const KernelFamily& fam, double delta);

/// Largest δ = D / 2^j (D the torus diameter) whose lattice oscillation is < ε.
/// Returns D when every kernel varies by less than ε. Throws ResolutionError
/// when a single-cell step already moves some kernel by ε or more.
double modulus_delta(const KernelFamily& fam, double epsilon);

struct MoonApproximant {
  std::vector<Ball> pieces;          // the balls making up I_ε
  std::vector<std::size_t> parent;   // term of f that contains each piece
  double delta_used = 0.0;
  double epsilon = 0.0;

  /// Indicator of I_ε as a simple function with coefficient 1.
  SimpleFunction indicator(int dim) const;
};

/// Concentric sub-balls I_k ⊆ F_k with |I_k| ≈ a_k |F_k|, so that |I_ε| = ‖f‖_1 on the lattice
/// (to one cell) and |f * h_t - 1_{I_ε} * h_t| < ‖f‖_1 ε. In 1D each ball
/// is first cut into pieces of diameter ≤ δ; in 2D a ball wider than δ is a
/// ResolutionError. Coefficients must lie in (0, 1] and the balls must be disjoint.
MoonApproximant moon_indicator(const SimpleFunction& f, const KernelFamily& fam, double epsilon);

struct ApproximationCheck {
  double measure_gap = 0.0;  // ||I_ε| - ‖f‖_1| on the lattice (Moon only)
  double sup_error = 0.0;    // max over t and lattice x
  double bound = 0.0;
  bool passed = false;
};

/// Lattice 0/1 indicator of the union of the pieces.
GridFunction indicator_samples(const MoonApproximant& m, const Grid& grid);

ApproximationCheck check_moon(const SimpleFunction& f, const MoonApproximant& m, const KernelFamily& fam,
                              int workers = 1);

struct CdGApproximant {
  SimpleFunction refined;       // dyadic cubes Q_j with coefficients b_j
  PointConfiguration points;    // centres y_j, weights b_j |Q_j|
  double side = 0.0;            // common upper bound on the side of every Q_j
  double delta_used = 0.0;
  double epsilon = 0.0;
};

/// Refine to cubes of side ≤ δ/√d and put the mass of each cube at its centre.
/// Throws ResolutionError when that side would be below one lattice cell.
CdGApproximant cdg_point_masses(const SimpleFunction& f, const KernelFamily& fam, double epsilon);

/// sup_t,x |f * g_t - Σ_j b_j |Q_j| g_t(x - y_j)| against 2 ‖f‖_1 ε, the comb
/// evaluated analytically.
ApproximationCheck check_cdg(const SimpleFunction& f, const CdGApproximant& c, const KernelFamily& fam,
                             int workers = 1);

nlohmann::ordered_json to_json(const SimpleFunction& f);
nlohmann::ordered_json to_json(const MoonApproximant& m);
nlohmann::ordered_json to_json(const CdGApproximant& c);

}  // namespace varpoint
