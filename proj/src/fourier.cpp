#include "varpoint/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "varpoint/errors.hpp"

namespace varpoint {

namespace {

// FFTW planning is not thread safe; execution with the new-array interface is.
// Plans are created once per (dim, extent, direction) with FFTW_ESTIMATE, which
// is deterministic, and kept for the lifetime of the process.
class PlanCache {
 public:
  fftw_plan get(int dim, std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = dim == 1 ? n : n * n;
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan plan = dim == 1 ? fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE)
                              : fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf, buf, sign,
                                                 FFTW_ESTIMATE);
    fftw_free(buf);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

std::vector<Complex> transform(const Grid& grid, std::span<const Complex> in, int sign) {
  const std::size_t total = grid.size();
  FftwBuffer buf(total);
  std::memcpy(buf.data, in.data(), total * sizeof(Complex));
  fftw_execute_dft(plan_cache().get(grid.dim(), grid.extent(), sign), buf.data, buf.data);
  std::vector<Complex> out(total);
  std::memcpy(static_cast<void*>(out.data()), buf.data, total * sizeof(Complex));
  return out;
}

double chi(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

void check_scale(const Grid& grid, int k) {
  if (k > max_resolvable_scale(grid)) {
    throw DomainError("Littlewood-Paley scale k = " + std::to_string(k) +
                      " is not resolvable: 2^(k+1) must stay below the Nyquist frequency");
  }
}

}  // namespace

double BumpProfile::operator()(double s) const {
  const double a = std::abs(s);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double up = chi(2.0 - a);
  const double down = chi(a - 1.0);
  return up / (up + down);
}

std::vector<Complex> forward_dft(const GridFunction& f) { return transform(f.grid(), f.samples(), FFTW_FORWARD); }

GridFunction inverse_dft(const Grid& grid, std::vector<Complex> spectrum) {
  if (spectrum.size() != grid.size()) throw DomainError("spectrum size does not match the grid");
  auto out = transform(grid, spectrum, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& z : out) z *= scale;
  return GridFunction(grid, std::move(out));
}

double frequency_norm(const Grid& grid, std::size_t flat) {
  const auto idx = grid.multi_index(flat);
  const auto n = static_cast<std::int64_t>(grid.extent());
  const double base = 2.0 * M_PI / grid.length();
  double acc = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    auto m = static_cast<std::int64_t>(idx[a]);
    if (m > n / 2) m -= n;
    const double xi = base * static_cast<double>(m);
    acc += xi * xi;
  }
  return std::sqrt(acc);
}

std::vector<Complex> continuous_transform(const GridFunction& f) {
  const Grid& grid = f.grid();
  auto spec = forward_dft(f);
  const auto n = static_cast<std::int64_t>(grid.extent());
  const double base = 2.0 * M_PI / grid.length();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto idx = grid.multi_index(i);
    double phase = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      auto m = static_cast<std::int64_t>(idx[a]);
      if (m > n / 2) m -= n;
      phase -= base * static_cast<double>(m) * grid.origin()[a];
    }
    spec[i] *= grid.cell_volume() * std::polar(1.0, phase);
  }
  return spec;
}

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) throw DomainError("convolve: grid mismatch");
  const Grid& grid = f.grid();
  auto a = forward_dft(f);
  const auto b = forward_dft(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  const GridFunction cyclic = inverse_dft(grid, std::move(a));

  // Cyclic index m corresponds to displacement coordinate o + m h; shift so that
  // output sample i sits at x_i again.
  const std::size_t n = grid.extent();
  const auto s0 = static_cast<std::size_t>(((grid.zero_index(0) % static_cast<std::int64_t>(n)) + n) % n);
  const auto s1 = grid.dim() == 2
                      ? static_cast<std::size_t>(((grid.zero_index(1) % static_cast<std::int64_t>(n)) + n) % n)
                      : 0;
  const double vol = grid.cell_volume();
  std::vector<Complex> out(grid.size());
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = vol * cyclic[(i + s0) % n];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] = vol * cyclic[((i + s0) % n) * n + (j + s1) % n];
    }
  }
  return GridFunction(grid, std::move(out));
}

GridFunction apply_radial_multiplier(const GridFunction& f, const std::function<double(double)>& multiplier) {
  const Grid& grid = f.grid();
  auto spec = forward_dft(f);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= multiplier(frequency_norm(grid, i));
  return inverse_dft(grid, std::move(spec));
}

int max_resolvable_scale(const Grid& grid) {
  // Largest k with 2^{k+1} < π / h.
  int k = static_cast<int>(std::floor(std::log2(grid.nyquist()))) - 1;
  while (std::ldexp(1.0, k + 1) >= grid.nyquist()) --k;
  while (std::ldexp(1.0, k + 2) < grid.nyquist()) ++k;
  return k;
}

double lp_band_multiplier(double xi_norm, int k, const BumpProfile& profile) {
  return profile(std::ldexp(xi_norm, -k)) - profile(std::ldexp(xi_norm, 1 - k));
}

GridFunction lp_projection(const GridFunction& f, int k, const BumpProfile& profile) {
  check_scale(f.grid(), k);
  return apply_radial_multiplier(f, [&](double xi) { return lp_band_multiplier(xi, k, profile); });
}

GridFunction lp_low(const GridFunction& f, int k, const BumpProfile& profile) {
  check_scale(f.grid(), k);
  return apply_radial_multiplier(f, [&](double xi) { return profile(std::ldexp(xi, -k)); });
}

GridFunction lp_high(const GridFunction& f, int k, const BumpProfile& profile) { return f - lp_low(f, k, profile); }

}  // namespace varpoint
