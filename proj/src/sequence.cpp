#include "varpoint/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "varpoint/errors.hpp"

namespace varpoint {

VariationExponent::VariationExponent(double r) : r_(r) {
  if (!(r >= 1.0)) throw DomainError("variation exponent must lie in [1, inf], got " + std::to_string(r));
}

VariationExponent VariationExponent::infinity() {
  return VariationExponent(std::numeric_limits<double>::infinity());
}

bool VariationExponent::is_infinite() const { return std::isinf(r_); }

JumpThreshold::JumpThreshold(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0) || std::isinf(lambda)) {
    throw DomainError("jump threshold must be a positive real, got " + std::to_string(lambda));
  }
}

SampleSequence::SampleSequence(std::vector<Complex> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("sample sequence must be non-empty");
}

SampleSequence::SampleSequence(std::vector<Complex> values, std::vector<std::size_t> index_subset)
    : SampleSequence(std::move(values)) {
  if (index_subset.size() != values_.size()) {
    throw DomainError("index subset length differs from the number of values");
  }
  for (std::size_t i = 1; i < index_subset.size(); ++i) {
    if (index_subset[i] <= index_subset[i - 1]) throw DomainError("index subset must be strictly increasing");
  }
  index_subset_ = std::move(index_subset);
}

SampleSequence SampleSequence::from_real(std::span<const double> values) {
  std::vector<Complex> v(values.begin(), values.end());
  return SampleSequence(std::move(v));
}

bool SampleSequence::is_real() const {
  return std::all_of(values_.begin(), values_.end(), [](const Complex& z) { return z.imag() == 0.0; });
}

SampleSequence SampleSequence::restrict_to(std::span<const std::size_t> positions) const {
  std::vector<Complex> v;
  std::vector<std::size_t> idx;
  v.reserve(positions.size());
  idx.reserve(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const std::size_t pos = positions[k];
    if (pos >= values_.size()) throw DomainError("restriction position out of range");
    if (k > 0 && pos <= positions[k - 1]) throw DomainError("restriction positions must be strictly increasing");
    v.push_back(values_[pos]);
    idx.push_back(index_subset_ ? (*index_subset_)[pos] : pos);
  }
  return SampleSequence(std::move(v), std::move(idx));
}

namespace {

void require_non_empty(std::span<const Complex> seq) {
  if (seq.empty()) throw DomainError("sequence must be non-empty");
}

// |a - b|^r with the cheap special cases; shared by the DP and the oracle so both
// accumulate bit-identical terms.
inline double distance_power(const Complex& a, const Complex& b, double r) {
  if (r == 1.0) return std::abs(a - b);
  if (r == 2.0) return std::norm(a - b);
  return std::pow(std::abs(a - b), r);
}

bool all_real(std::span<const Complex> seq) {
  return std::all_of(seq.begin(), seq.end(), [](const Complex& z) { return z.imag() == 0.0; });
}

double diameter(std::span<const Complex> seq) {
  if (all_real(seq)) {
    auto [lo, hi] = std::minmax_element(seq.begin(), seq.end(),
                                        [](const Complex& a, const Complex& b) { return a.real() < b.real(); });
    return hi->real() - lo->real();
  }
  double best = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (std::size_t j = i + 1; j < seq.size(); ++j) best = std::max(best, std::abs(seq[i] - seq[j]));
  }
  return best;
}

}  // namespace

double variation(std::span<const Complex> seq, VariationExponent r) {
  require_non_empty(seq);
  if (r.is_infinite()) return diameter(seq);
  const double p = r.value();
  const std::size_t n = seq.size();
  thread_local std::vector<double> best;
  best.assign(n, 0.0);
  double overall = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    double bj = 0.0;
    for (std::size_t i = 0; i < j; ++i) bj = std::max(bj, best[i] + distance_power(seq[i], seq[j], p));
    best[j] = bj;
    overall = std::max(overall, bj);
  }
  if (p == 1.0) return overall;
  if (p == 2.0) return std::sqrt(overall);
  return std::pow(overall, 1.0 / p);
}

double variation(const SampleSequence& seq, VariationExponent r) { return variation(seq.values(), r); }

double variation_bruteforce(std::span<const Complex> seq, VariationExponent r) {
  require_non_empty(seq);
  if (seq.size() > kVariationOracleMaxLength) {
    throw SizeError("variation oracle is limited to " + std::to_string(kVariationOracleMaxLength) + " samples");
  }
  const std::size_t n = seq.size();
  const bool inf = r.is_infinite();
  const double p = r.value();
  double best = 0.0;
  std::vector<std::size_t> picked;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    picked.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) picked.push_back(i);
    }
    if (picked.size() < 2) continue;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < picked.size(); ++k) {
      const Complex& a = seq[picked[k]];
      const Complex& b = seq[picked[k + 1]];
      if (inf) {
        acc = std::max(acc, std::abs(a - b));
      } else {
        acc += distance_power(a, b, p);
      }
    }
    best = std::max(best, acc);
  }
  if (inf || p == 1.0) return best;
  if (p == 2.0) return std::sqrt(best);
  return std::pow(best, 1.0 / p);
}

std::size_t jump_count(std::span<const Complex> seq, JumpThreshold lambda) {
  const double lam = lambda.value();
  const std::size_t n = seq.size();
  if (n < 2) return 0;
  std::size_t count = 0;

  if (all_real(seq)) {
    // Window [p, t) summarised by its extremes.
    double lo = seq[0].real();
    double hi = lo;
    for (std::size_t t = 1; t < n; ++t) {
      const double v = seq[t].real();
      if (v - lo > lam || hi - v > lam) {
        ++count;
        lo = hi = v;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    return count;
  }

  std::size_t start = 0;
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t s = start; s < t; ++s) {
      if (std::abs(seq[t] - seq[s]) > lam) {
        ++count;
        start = t;
        break;
      }
    }
  }
  return count;
}

std::size_t jump_count(const SampleSequence& seq, JumpThreshold lambda) { return jump_count(seq.values(), lambda); }

std::size_t jump_count_bruteforce(std::span<const Complex> seq, JumpThreshold lambda) {
  if (seq.size() > kJumpOracleMaxLength) {
    throw SizeError("jump oracle is limited to " + std::to_string(kJumpOracleMaxLength) + " samples");
  }
  const double lam = lambda.value();
  const std::size_t n = seq.size();
  // chains[p] = longest chain whose first pair starts at or after p; every pair
  // (s, t) with s >= p is tried, so this enumerates all chains (memoised on p).
  std::vector<std::size_t> chains(n + 1, 0);
  for (std::size_t p = n; p-- > 0;) {
    std::size_t best = 0;
    for (std::size_t s = p; s < n; ++s) {
      for (std::size_t t = s + 1; t < n; ++t) {
        if (std::abs(seq[s] - seq[t]) > lam) best = std::max(best, 1 + chains[t]);
      }
    }
    chains[p] = best;
  }
  return chains[0];
}

double jump_surrogate(std::span<const Complex> seq, JumpThreshold lambda, VariationExponent r) {
  if (r.is_infinite()) throw DomainError("jump surrogate needs a finite exponent r");
  const auto n = static_cast<double>(jump_count(seq, lambda));
  if (n == 0.0) return 0.0;
  if (r.value() == 2.0) return lambda.value() * std::sqrt(n);
  return lambda.value() * std::pow(n, 1.0 / r.value());
}

double jump_surrogate(const SampleSequence& seq, JumpThreshold lambda, VariationExponent r) {
  return jump_surrogate(seq.values(), lambda, r);
}

double maximal(std::span<const Complex> seq) {
  require_non_empty(seq);
  double m = 0.0;
  for (const auto& z : seq) m = std::max(m, std::abs(z));
  return m;
}

double maximal(const SampleSequence& seq) { return maximal(seq.values()); }

}  // namespace varpoint
