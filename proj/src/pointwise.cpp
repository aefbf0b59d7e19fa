#include "varpoint/pointwise.hpp"

#include <cmath>
#include <sstream>

#include "varpoint/errors.hpp"
#include "varpoint/fourier.hpp"
#include "varpoint/parallel.hpp"

namespace varpoint {

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::variation:
      return "variation";
    case OperatorKind::jump_surrogate:
      return "jump_surrogate";
    case OperatorKind::maximal:
      return "maximal";
  }
  return "unknown";
}

OperatorKind operator_kind_from_string(const std::string& name) {
  if (name == "variation") return OperatorKind::variation;
  if (name == "jump_surrogate" || name == "jump") return OperatorKind::jump_surrogate;
  if (name == "maximal") return OperatorKind::maximal;
  throw DomainError("unknown operator kind '" + name + "'");
}

void OperatorSpec::validate(std::size_t T) const {
  if (kind == OperatorKind::jump_surrogate) {
    if (!lambda || !(*lambda > 0.0)) throw DomainError("jump operator needs a positive lambda");
    if (r.is_infinite()) throw DomainError("jump operator needs a finite r");
  }
  for (std::size_t i = 0; i < index_subset.size(); ++i) {
    if (index_subset[i] >= T) throw DomainError("index_subset refers past the end of the family");
    if (i > 0 && index_subset[i] <= index_subset[i - 1]) throw DomainError("index_subset must be strictly increasing");
  }
}

std::string OperatorSpec::label() const {
  std::ostringstream out;
  const auto r_text = [&] {
    if (r.is_infinite()) return std::string("inf");
    std::ostringstream s;
    s << r.value();
    return s.str();
  };
  switch (kind) {
    case OperatorKind::variation:
      out << "variation_r" << r_text();
      break;
    case OperatorKind::jump_surrogate:
      out << "jump_r" << r_text();
      break;
    case OperatorKind::maximal:
      out << "maximal";
      break;
  }
  return out.str();
}

OperatorSpec OperatorSpec::with_lambda(double value) const {
  OperatorSpec copy = *this;
  copy.lambda = value;
  return copy;
}

std::vector<GridFunction> apply_family(const GridFunction& f, const KernelFamily& fam) {
  if (!(f.grid() == fam.grid())) throw DomainError("apply_family: grid mismatch");
  std::vector<GridFunction> out;
  out.reserve(fam.size());
  for (const auto& entry : fam.entries()) out.push_back(convolve(f, entry.samples()));
  return out;
}

GridFunction operator_field(const std::vector<GridFunction>& trajectories, const OperatorSpec& spec, int workers) {
  if (trajectories.empty()) throw DomainError("operator_field: empty trajectory list");
  spec.validate(trajectories.size());
  const Grid& grid = trajectories.front().grid();
  std::vector<std::size_t> index = spec.index_subset;
  if (index.empty()) {
    index.resize(trajectories.size());
    for (std::size_t t = 0; t < index.size(); ++t) index[t] = t;
  }
  const std::size_t n = grid.size();
  std::vector<double> field(n);
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    std::vector<Complex> seq(index.size());
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      for (std::size_t j = 0; j < index.size(); ++j) seq[j] = trajectories[index[j]][i];
      switch (spec.kind) {
        case OperatorKind::variation:
          field[i] = variation(seq, spec.r);
          break;
        case OperatorKind::jump_surrogate:
          field[i] = jump_surrogate(seq, JumpThreshold(*spec.lambda), spec.r);
          break;
        case OperatorKind::maximal:
          field[i] = maximal(seq);
          break;
      }
    }
  });
  return GridFunction::from_real(grid, field);
}

GridFunction operator_field(const GridFunction& f, const KernelFamily& fam, const OperatorSpec& spec, int workers) {
  return operator_field(apply_family(f, fam), spec, workers);
}

}  // namespace varpoint
