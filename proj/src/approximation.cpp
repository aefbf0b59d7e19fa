#include "varpoint/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varpoint/errors.hpp"
#include "varpoint/fourier.hpp"
#include "varpoint/parallel.hpp"

namespace varpoint {

namespace {

using Shift = std::array<std::int64_t, 2>;

double shift_oscillation(const KernelFamily& fam, const Shift& v) {
  const Grid& grid = fam.grid();
  const auto n = static_cast<std::int64_t>(grid.extent());
  const auto wrap = [n](std::int64_t i) { return static_cast<std::size_t>(((i % n) + n) % n); };
  double worst = 0.0;
  for (const auto& entry : fam.entries()) {
    const auto& g = entry.samples();
    if (grid.dim() == 1) {
      for (std::int64_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(g[wrap(i + v[0])] - g[wrap(i)]));
    } else {
      for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
          const std::size_t a = grid.flat_index(wrap(i + v[0]), wrap(j + v[1]));
          const std::size_t b = grid.flat_index(wrap(i), wrap(j));
          worst = std::max(worst, std::abs(g[a] - g[b]));
        }
      }
    }
  }
  return worst;
}

// Non-zero lattice shifts with v > 0 lexicographically (the other half gives the
// same oscillation), grouped by squared length, up to half the torus.
std::vector<std::pair<std::int64_t, std::vector<Shift>>> shift_shells(const Grid& grid, std::int64_t max_norm2) {
  const auto half = static_cast<std::int64_t>(grid.extent() / 2);
  std::vector<std::pair<std::int64_t, Shift>> all;
  if (grid.dim() == 1) {
    for (std::int64_t m = 1; m <= half && m * m <= max_norm2; ++m) all.push_back({m * m, {m, 0}});
  } else {
    for (std::int64_t a = 0; a <= half; ++a) {
      for (std::int64_t b = -half; b <= half; ++b) {
        if (a == 0 && b <= 0) continue;
        const std::int64_t q = a * a + b * b;
        if (q <= max_norm2) all.push_back({q, {a, b}});
      }
    }
  }
  std::sort(all.begin(), all.end());
  std::vector<std::pair<std::int64_t, std::vector<Shift>>> shells;
  for (const auto& [q, v] : all) {
    if (shells.empty() || shells.back().first != q) shells.push_back({q, {}});
    shells.back().second.push_back(v);
  }
  return shells;
}

double kernel_spread(const KernelFamily& fam) {
  double worst = 0.0;
  for (const auto& e : fam.entries()) {
    double re_lo = INFINITY, re_hi = -INFINITY, im_lo = INFINITY, im_hi = -INFINITY;
    for (const auto& z : e.samples().samples()) {
      re_lo = std::min(re_lo, z.real());
      re_hi = std::max(re_hi, z.real());
      im_lo = std::min(im_lo, z.imag());
      im_hi = std::max(im_hi, z.imag());
    }
    worst = std::max(worst, std::hypot(re_hi - re_lo, im_hi - im_lo));
  }
  return worst;
}

struct LatticePoint {
  double d2;
  bool lexneg;
};

std::vector<std::size_t> lattice_points_in(const Ball& ball, const Grid& grid) {
  const Region region(ball);
  const auto n = static_cast<std::int64_t>(grid.extent());
  const double h = grid.spacing();
  std::array<std::int64_t, 2> first{0, 0};
  std::array<std::int64_t, 2> last{0, 0};
  for (int a = 0; a < grid.dim(); ++a) {
    const double o = grid.origin()[a];
    first[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((ball.center[a] - ball.radius - o) / h)) - 1);
    last[a] = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::ceil((ball.center[a] + ball.radius - o) / h)) + 1);
  }
  std::vector<std::size_t> out;
  for (std::int64_t i = first[0]; i <= last[0]; ++i) {
    for (std::int64_t j = first[1]; j <= last[1]; ++j) {
      const std::size_t flat = grid.flat_index(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (region.contains(grid.point(flat), grid.dim())) out.push_back(flat);
    }
  }
  return out;
}

std::size_t count_in(const Ball& ball, const std::vector<std::size_t>& candidates, const Grid& grid) {
  const Region region(ball);
  std::size_t count = 0;
  for (std::size_t flat : candidates) count += region.contains(grid.point(flat), grid.dim()) ? 1 : 0;
  return count;
}

// Radii of concentric sub-balls paired with the lattice count each one captures
// (before floating-point confirmation), in increasing order.
std::vector<std::pair<double, std::size_t>> achievable_radii(const Ball& piece, const std::vector<std::size_t>& pts,
                                                             const Grid& grid) {
  std::vector<LatticePoint> lp;
  lp.reserve(pts.size());
  for (std::size_t flat : pts) {
    const Point p = grid.point(flat);
    const double dx = p[0] - piece.center[0];
    const double dy = grid.dim() == 2 ? p[1] - piece.center[1] : 0.0;
    lp.push_back({dx * dx + dy * dy, dx < 0.0 || (dx == 0.0 && dy < 0.0)});
  }
  std::sort(lp.begin(), lp.end(), [](const LatticePoint& a, const LatticePoint& b) {
    return a.d2 != b.d2 ? a.d2 < b.d2 : a.lexneg > b.lexneg;
  });
  std::vector<std::pair<double, std::size_t>> out{{0.0, 0}};
  std::size_t i = 0;
  while (i < lp.size()) {
    std::size_t j = i;
    std::size_t neg = 0;
    while (j < lp.size() && lp[j].d2 == lp[i].d2) neg += lp[j++].lexneg ? 1 : 0;
    const double rho = std::sqrt(lp[i].d2);
    if (neg > 0 && neg < j - i) out.push_back({rho, i + neg});
    const double next = j < lp.size() ? 0.5 * (rho + std::sqrt(lp[j].d2)) : piece.radius;
    out.push_back({next, j});
    i = j;
  }
  return out;
}

void check_disjoint_balls(const SimpleFunction& f) {
  for (std::size_t i = 0; i < f.terms.size(); ++i) {
    for (std::size_t j = i + 1; j < f.terms.size(); ++j) {
      const auto& a = f.terms[i].region.as_ball();
      const auto& b = f.terms[j].region.as_ball();
      const double dx = a.center[0] - b.center[0];
      const double dy = f.dim == 2 ? a.center[1] - b.center[1] : 0.0;
      if (std::sqrt(dx * dx + dy * dy) < a.radius + b.radius) throw DomainError("balls of the simple function overlap");
    }
  }
}

nlohmann::ordered_json region_json(const Region& r) {
  nlohmann::ordered_json j;
  if (r.is_cube()) {
    j["kind"] = "cube";
    j["level"] = r.as_cube().level;
    j["corner"] = {r.as_cube().corner[0], r.as_cube().corner[1]};
  } else {
    j["kind"] = "ball";
    j["center"] = {r.as_ball().center[0], r.as_ball().center[1]};
    j["radius"] = r.as_ball().radius;
  }
  return j;
}

}  // namespace

double lattice_oscillation(const KernelFamily& fam, double delta) {
  const double h = fam.grid().spacing();
  const auto reach = static_cast<std::int64_t>(std::ceil(delta / h));
  double worst = 0.0;
  for (const auto& [q, shifts] : shift_shells(fam.grid(), reach * reach)) {
    if (!(std::sqrt(static_cast<double>(q)) * h < delta)) break;
    for (const auto& v : shifts) worst = std::max(worst, shift_oscillation(fam, v));
  }
  return worst;
}

double modulus_delta(const KernelFamily& fam, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("modulus_delta: epsilon must be positive");
  const Grid& grid = fam.grid();
  const double diameter = grid.length() * std::sqrt(static_cast<double>(grid.dim()));
  if (kernel_spread(fam) < epsilon) return diameter;

  const auto half = static_cast<std::int64_t>(grid.extent() / 2);
  double first_failure = 0.0;  // |v| / h of the shortest shift that breaks the bound
  for (const auto& [q, shifts] : shift_shells(grid, 2 * half * half)) {
    double worst = 0.0;
    for (const auto& v : shifts) worst = std::max(worst, shift_oscillation(fam, v));
    if (worst >= epsilon) {
      first_failure = std::sqrt(static_cast<double>(q));
      break;
    }
  }
  if (first_failure == 0.0) return diameter;
  if (first_failure <= 1.0) {
    throw ResolutionError("modulus_delta: a one-cell shift already changes a kernel by >= epsilon; "
                          "mollify more or refine the grid");
  }
  const double limit = first_failure * grid.spacing();
  double delta = diameter;
  while (delta > limit) delta *= 0.5;
  return delta;
}

SimpleFunction MoonApproximant::indicator(int dim) const {
  SimpleFunction s;
  s.dim = dim;
  for (const auto& b : pieces) s.terms.push_back({1.0, Region(b)});
  return s;
}

MoonApproximant moon_indicator(const SimpleFunction& f, const KernelFamily& fam, double epsilon) {
  const Grid& grid = fam.grid();
  if (f.dim != grid.dim()) throw DomainError("moon_indicator: dimension mismatch");
  if (f.terms.empty()) throw DomainError("moon_indicator: f has no terms");
  for (const auto& term : f.terms) {
    if (!term.region.is_ball()) throw DomainError("moon_indicator: regions must be balls");
    if (term.coefficient > 1.0) throw NormalizationError("moon_indicator: coefficients must be at most 1");
    if (!(term.coefficient > 0.0)) throw NormalizationError("moon_indicator: coefficients must be positive");
  }
  check_disjoint_balls(f);
  rasterize(f, grid);  // rejects regions outside the grid

  MoonApproximant out;
  out.epsilon = epsilon;
  out.delta_used = modulus_delta(fam, epsilon);

  struct Piece {
    Ball ball;
    std::size_t parent;
  };
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < f.terms.size(); ++k) {
    const Ball& b = f.terms[k].region.as_ball();
    if (2.0 * b.radius <= out.delta_used) {
      pieces.push_back({b, k});
      continue;
    }
    if (f.dim == 2) {
      throw ResolutionError("moon_indicator: ball of diameter " + std::to_string(2.0 * b.radius) +
                            " exceeds delta = " + std::to_string(out.delta_used));
    }
    const auto m = static_cast<std::size_t>(std::ceil(2.0 * b.radius / out.delta_used));
    const double sub = b.radius / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      pieces.push_back({{{b.center[0] - b.radius + (2.0 * static_cast<double>(j) + 1.0) * sub, 0.0}, sub}, k});
    }
  }
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    return a.ball.center[0] != b.ball.center[0] ? a.ball.center[0] < b.ball.center[0] : a.ball.center[1] < b.ball.center[1];
  });

  // Error diffusion over the pieces keeps the running lattice count within half a
  // point of the running target, so conclusion (1) holds to one cell overall.
  double carry = 0.0;
  for (const auto& piece : pieces) {
    const auto pts = lattice_points_in(piece.ball, grid);
    const double target = f.terms[piece.parent].coefficient * static_cast<double>(pts.size());
    const double desired = target + carry;
    const auto radii = achievable_radii(piece.ball, pts, grid);
    auto best = radii.front();
    for (const auto& cand : radii) {
      if (std::abs(static_cast<double>(cand.second) - desired) < std::abs(static_cast<double>(best.second) - desired)) {
        best = cand;
      }
    }
    if (best.second == 0) {
      carry = desired;
      continue;
    }
    const Ball chosen{piece.ball.center, best.first};
    carry = desired - static_cast<double>(count_in(chosen, pts, grid));
    out.pieces.push_back(chosen);
    out.parent.push_back(piece.parent);
  }
  return out;
}

GridFunction indicator_samples(const MoonApproximant& m, const Grid& grid) {
  std::vector<double> v(grid.size(), 0.0);
  for (const auto& b : m.pieces) {
    for (std::size_t flat : lattice_points_in(b, grid)) v[flat] = 1.0;
  }
  return GridFunction::from_real(grid, v);
}

ApproximationCheck check_moon(const SimpleFunction& f, const MoonApproximant& m, const KernelFamily& fam, int workers) {
  const Grid& grid = fam.grid();
  const GridFunction fs = rasterize(f, grid);
  const GridFunction is = indicator_samples(m, grid);
  const double l1 = lp_norm(fs, 1.0);
  ApproximationCheck out;
  out.measure_gap = std::abs(lp_norm(is, 1.0) - l1);
  const GridFunction diff = fs - is;
  std::vector<double> sup(fam.size());
  parallel_for(fam.size(), workers, [&](std::size_t t) { sup[t] = convolve(diff, fam[t].samples()).max_abs(); });
  for (double s : sup) out.sup_error = std::max(out.sup_error, s);
  out.bound = l1 * m.epsilon;
  out.passed = out.measure_gap <= grid.cell_volume() * (1.0 + 1e-9) && out.sup_error < out.bound;
  return out;
}

CdGApproximant cdg_point_masses(const SimpleFunction& f, const KernelFamily& fam, double epsilon) {
  const Grid& grid = fam.grid();
  if (f.dim != grid.dim()) throw DomainError("cdg_point_masses: dimension mismatch");
  if (f.terms.empty()) throw DomainError("cdg_point_masses: f has no terms");
  for (const auto& term : f.terms) {
    if (!term.region.is_cube()) throw DomainError("cdg_point_masses: regions must be dyadic cubes");
    if (!(term.coefficient > 0.0)) throw DomainError("cdg_point_masses: coefficients must be positive");
  }
  CdGApproximant out;
  out.epsilon = epsilon;
  out.delta_used = modulus_delta(fam, epsilon);
  const double limit = out.delta_used / std::sqrt(static_cast<double>(f.dim));
  double side = 1.0;
  while (side > limit) side *= 0.5;
  while (2.0 * side <= limit && 2.0 * side <= grid.length()) side *= 2.0;
  if (side < grid.spacing()) {
    throw ResolutionError("cdg_point_masses: cubes of side delta/sqrt(d) are below one lattice cell");
  }
  out.side = side;
  out.refined = dyadic_refine(f, side);
  std::vector<Point> pts;
  std::vector<double> weights;
  for (const auto& term : out.refined.terms) {
    pts.push_back(term.region.as_cube().center());
    weights.push_back(term.coefficient * term.region.measure(f.dim));
  }
  out.points = PointConfiguration(f.dim, std::move(pts), std::move(weights));
  return out;
}

ApproximationCheck check_cdg(const SimpleFunction& f, const CdGApproximant& c, const KernelFamily& fam, int workers) {
  const Grid& grid = fam.grid();
  const GridFunction fs = rasterize(f, grid);
  ApproximationCheck out;
  std::vector<double> sup(fam.size());
  parallel_for(fam.size(), workers, [&](std::size_t t) {
    const GridFunction lhs = convolve(fs, fam[t].samples());
    const GridFunction rhs = comb_convolve(c.points, fam[t], grid);
    sup[t] = (lhs - rhs).max_abs();
  });
  for (double s : sup) out.sup_error = std::max(out.sup_error, s);
  out.bound = 2.0 * lp_norm(fs, 1.0) * c.epsilon;
  out.passed = out.sup_error < out.bound;
  return out;
}

nlohmann::ordered_json to_json(const SimpleFunction& f) {
  nlohmann::ordered_json j;
  j["dim"] = f.dim;
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : f.terms) {
    auto r = region_json(t.region);
    r["coefficient"] = t.coefficient;
    j["terms"].push_back(r);
  }
  return j;
}

nlohmann::ordered_json to_json(const MoonApproximant& m) {
  nlohmann::ordered_json j;
  j["kind"] = "moon_indicator";
  j["epsilon"] = m.epsilon;
  j["delta_used"] = m.delta_used;
  j["pieces"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.pieces.size(); ++i) {
    auto r = region_json(Region(m.pieces[i]));
    r["parent"] = m.parent[i];
    j["pieces"].push_back(r);
  }
  return j;
}

nlohmann::ordered_json to_json(const CdGApproximant& c) {
  nlohmann::ordered_json j;
  j["kind"] = "cdg_point_masses";
  j["epsilon"] = c.epsilon;
  j["delta_used"] = c.delta_used;
  j["side"] = c.side;
  j["refined"] = to_json(c.refined);
  j["points"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < c.points.points.size(); ++k) {
    j["points"].push_back({{"at", {c.points.points[k][0], c.points.points[k][1]}}, {"weight", c.points.weight(k)}});
  }
  return j;
}

}  // namespace varpoint
