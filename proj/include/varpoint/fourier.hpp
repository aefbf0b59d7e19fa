#pragma once

// FFT convolution on the periodic lattice and smooth Littlewood–Paley
// projections. Frequencies are angular: ĝ(ξ) = ∫ g(x) e^{-i x·ξ} dx, and the
// lattice frequencies are ξ = 2π m / L with m in [-n/2, n/2).

#include <functional>
#include <vector>

#include "varpoint/grid.hpp"

namespace varpoint {

/// Even cutoff φ with 1_{[-1,1]} <= φ <= 1_{[-2,2]}, monotone on [1, 2].
/// The transition is the e^{-1/x} partition: φ(s) = χ(2-|s|) / (χ(2-|s|) + χ(|s|-1)).
class BumpProfile {
 public:
  double operator()(double s) const;
};

/// Raw forward DFT (no scaling), row-major like GridFunction.
std::vector<Complex> forward_dft(const GridFunction& f);
/// Inverse of forward_dft, including the 1/n^d factor.
GridFunction inverse_dft(const Grid& grid, std::vector<Complex> spectrum);

/// |ξ| for the DFT bin `flat` (Nyquist bin counted as +n/2).
double frequency_norm(const Grid& grid, std::size_t flat);

/// Riemann-sum approximation of ĝ at every lattice frequency, phase included.
std::vector<Complex> continuous_transform(const GridFunction& f);

/// (f * g)(x_i) ≈ h^d Σ_j f(x_j) g(x_i - x_j) on the torus.
GridFunction convolve(const GridFunction& f, const GridFunction& g);

/// Multiply the spectrum by m(|ξ|).
GridFunction apply_radial_multiplier(const GridFunction& f, const std::function<double(double)>& multiplier);

/// Largest k with 2^{k+1} below the Nyquist frequency.
int max_resolvable_scale(const Grid& grid);

/// ψ_k(ξ) = φ(2^{-k}|ξ|) - φ(2^{1-k}|ξ|); supported in 2^{k-1} < |ξ| < 2^{k+1}.
double lp_band_multiplier(double xi_norm, int k, const BumpProfile& profile = {});

/// P_k f. Throws DomainError when 2^{k+1} is not below the Nyquist frequency.
GridFunction lp_projection(const GridFunction& f, int k, const BumpProfile& profile = {});
/// P_{<=k} f, multiplier φ(2^{-k}|ξ|).
GridFunction lp_low(const GridFunction& f, int k, const BumpProfile& profile = {});
/// P_{>k} f = f - P_{<=k} f.
GridFunction lp_high(const GridFunction& f, int k, const BumpProfile& profile = {});

}  // namespace varpoint
