#include "varpoint/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "varpoint/errors.hpp"
#include "varpoint/rng.hpp"

#include <json.hpp>

namespace varpoint {

double Rng::normal() {
  // 1 - u keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// ---------------------------------------------------------------- Grid

Grid::Grid(int dim, std::size_t extent, double spacing, Point origin)
    : dim_(dim), extent_(extent), spacing_(spacing), origin_(origin) {
  if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
  if (extent < 2 || !std::has_single_bit(extent)) throw DomainError("grid extent must be a power of two");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("grid spacing must be positive");
  if (dim == 1) origin_[1] = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double k = origin_[a] / spacing;
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, std::abs(k))) {
      throw DomainError("grid origin must be an integer multiple of the spacing");
    }
  }
}

Grid Grid::centered(int dim, std::size_t extent, double spacing) {
  const double o = -static_cast<double>(extent / 2) * spacing;
  return Grid(dim, extent, spacing, {o, dim == 2 ? o : 0.0});
}

std::size_t Grid::size() const { return dim_ == 1 ? extent_ : extent_ * extent_; }

double Grid::cell_volume() const { return dim_ == 1 ? spacing_ : spacing_ * spacing_; }

std::int64_t Grid::zero_index(int axis) const {
  return static_cast<std::int64_t>(std::llround(-origin_[axis] / spacing_));
}

Point Grid::point(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Point p{origin_[0] + static_cast<double>(idx[0]) * spacing_, 0.0};
  if (dim_ == 2) p[1] = origin_[1] + static_cast<double>(idx[1]) * spacing_;
  return p;
}

std::array<std::size_t, 2> Grid::multi_index(std::size_t flat) const {
  if (dim_ == 1) return {flat, 0};
  return {flat / extent_, flat % extent_};
}

double Grid::wrap(double displacement) const {
  const double len = length();
  return displacement - len * std::floor((displacement + 0.5 * len) / len);
}

double Grid::nyquist() const { return M_PI / spacing_; }

// ---------------------------------------------------------------- GridFunction

GridFunction::GridFunction(Grid grid) : grid_(grid), samples_(grid.size(), Complex{}) {}

GridFunction::GridFunction(Grid grid, std::vector<Complex> samples) : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size()) throw DomainError("sample count does not match the grid");
}

GridFunction GridFunction::from_real(Grid grid, std::span<const double> samples) {
  return GridFunction(grid, std::vector<Complex>(samples.begin(), samples.end()));
}

std::vector<double> GridFunction::real_part() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), [](const Complex& z) { return z.real(); });
  return out;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (const auto& z : samples_) m = std::max(m, std::abs(z));
  return m;
}

GridFunction GridFunction::operator+(const GridFunction& other) const {
  if (!(grid_ == other.grid_)) throw DomainError("grid mismatch");
  std::vector<Complex> out(samples_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += other.samples_[i];
  return GridFunction(grid_, std::move(out));
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
  if (!(grid_ == other.grid_)) throw DomainError("grid mismatch");
  std::vector<Complex> out(samples_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= other.samples_[i];
  return GridFunction(grid_, std::move(out));
}

GridFunction GridFunction::operator*(double scale) const {
  std::vector<Complex> out(samples_);
  for (auto& z : out) z *= scale;
  return GridFunction(grid_, std::move(out));
}

// ---------------------------------------------------------------- Regions

double DyadicCube::side() const { return std::ldexp(1.0, -level); }

Point DyadicCube::lower() const {
  const double s = side();
  return {static_cast<double>(corner[0]) * s, static_cast<double>(corner[1]) * s};
}

Point DyadicCube::center() const {
  const double s = side();
  const Point lo = lower();
  return {lo[0] + 0.5 * s, lo[1] + 0.5 * s};
}

Region::Region(DyadicCube cube) : shape_(cube) {}

Region::Region(Ball ball) : shape_(ball) {
  if (!(ball.radius > 0.0)) throw DomainError("ball radius must be positive");
}

bool Region::contains(const Point& p, int dim) const {
  if (const auto* c = std::get_if<DyadicCube>(&shape_)) {
    const double s = c->side();
    const Point lo = c->lower();
    for (int a = 0; a < dim; ++a) {
      if (p[a] < lo[a] || p[a] >= lo[a] + s) return false;
    }
    return true;
  }
  const Ball& b = std::get<Ball>(shape_);
  const double dx = p[0] - b.center[0];
  if (dim == 1) return -b.radius <= dx && dx < b.radius;
  const double dy = p[1] - b.center[1];
  const double d2 = dx * dx + dy * dy;
  const double r2 = b.radius * b.radius;
  if (d2 < r2) return true;
  if (d2 > r2) return false;
  return dx < 0.0 || (dx == 0.0 && dy < 0.0);
}

double Region::measure(int dim) const {
  if (const auto* c = std::get_if<DyadicCube>(&shape_)) return std::pow(c->side(), dim);
  const double r = std::get<Ball>(shape_).radius;
  return dim == 1 ? 2.0 * r : M_PI * r * r;
}

double Region::diameter(int dim) const {
  if (const auto* c = std::get_if<DyadicCube>(&shape_)) return c->side() * std::sqrt(static_cast<double>(dim));
  return 2.0 * std::get<Ball>(shape_).radius;
}

std::pair<Point, Point> Region::bounds(int dim) const {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};
  if (const auto* c = std::get_if<DyadicCube>(&shape_)) {
    lo = c->lower();
    hi = {lo[0] + c->side(), lo[1] + c->side()};
  } else {
    const Ball& b = std::get<Ball>(shape_);
    lo = {b.center[0] - b.radius, b.center[1] - b.radius};
    hi = {b.center[0] + b.radius, b.center[1] + b.radius};
  }
  if (dim == 1) lo[1] = hi[1] = 0.0;
  return {lo, hi};
}

double SimpleFunction::l1_norm() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coefficient) * t.region.measure(dim);
  return s;
}

double SimpleFunction::max_coefficient() const {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, std::abs(t.coefficient));
  return m;
}

PointConfiguration::PointConfiguration(int d, std::vector<Point> pts, std::vector<double> w)
    : dim(d), points(std::move(pts)), weights(std::move(w)) {
  if (points.empty()) throw DomainError("point configuration must contain at least one point");
  if (!weights.empty()) {
    if (weights.size() != points.size()) throw DomainError("one weight per point required");
    for (double x : weights) {
      if (!(x > 0.0)) throw DomainError("point weights must be positive");
    }
  }
}

// ---------------------------------------------------------------- Rasterisation and norms

GridFunction rasterize(const SimpleFunction& sf, const Grid& grid) {
  if (sf.dim != grid.dim()) throw DomainError("simple function and grid dimensions differ");
  std::vector<Complex> out(grid.size(), Complex{});
  const double h = grid.spacing();
  const auto n = static_cast<std::int64_t>(grid.extent());
  for (const auto& term : sf.terms) {
    const auto [lo, hi] = term.region.bounds(sf.dim);
    std::array<std::int64_t, 2> first{0, 0};
    std::array<std::int64_t, 2> last{0, 0};
    for (int a = 0; a < sf.dim; ++a) {
      const double o = grid.origin()[a];
      if (lo[a] < o - 1e-12 || hi[a] > o + grid.length() + 1e-12) {
        throw DomainError("region does not fit inside the grid");
      }
      first[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((lo[a] - o) / h)) - 1);
      last[a] = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::ceil((hi[a] - o) / h)) + 1);
    }
    for (std::int64_t i = first[0]; i <= last[0]; ++i) {
      for (std::int64_t j = first[1]; j <= last[1]; ++j) {
        const std::size_t flat = grid.flat_index(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        if (term.region.contains(grid.point(flat), sf.dim)) out[flat] += term.coefficient;
      }
    }
  }
  return GridFunction(grid, std::move(out));
}

double level_measure(const GridFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("level must be positive");
  std::size_t count = 0;
  for (const auto& z : f.samples()) count += std::abs(z) > lambda ? 1 : 0;
  return static_cast<double>(count) * f.grid().cell_volume();
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm needs p >= 1");
  if (std::isinf(p)) return f.max_abs();
  double acc = 0.0;
  if (p == 1.0) {
    for (const auto& z : f.samples()) acc += std::abs(z);
    return acc * f.grid().cell_volume();
  }
  if (p == 2.0) {
    for (const auto& z : f.samples()) acc += std::norm(z);
    return std::sqrt(acc * f.grid().cell_volume());
  }
  for (const auto& z : f.samples()) acc += std::pow(std::abs(z), p);
  return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

// ---------------------------------------------------------------- Dyadic refinement

namespace {

std::vector<DyadicCube> children(const DyadicCube& c, int dim) {
  std::vector<DyadicCube> out;
  const int lv = c.level + 1;
  for (std::int64_t i = 0; i < 2; ++i) {
    if (dim == 1) {
      out.push_back({lv, {2 * c.corner[0] + i, 0}});
      continue;
    }
    for (std::int64_t j = 0; j < 2; ++j) out.push_back({lv, {2 * c.corner[0] + i, 2 * c.corner[1] + j}});
  }
  return out;
}

// True when `outer` strictly contains `inner`.
bool strictly_contains(const DyadicCube& outer, const DyadicCube& inner, int dim) {
  if (inner.level <= outer.level) return false;
  const int shift = inner.level - outer.level;
  for (int a = 0; a < dim; ++a) {
    if ((inner.corner[a] >> shift) != outer.corner[a]) return false;
  }
  return true;
}

}  // namespace

SimpleFunction dyadic_refine(const SimpleFunction& sf, double max_side) {
  if (!(max_side > 0.0)) throw DomainError("max_side must be positive");
  struct Piece {
    double coefficient;
    DyadicCube cube;
  };
  std::vector<Piece> pieces;
  for (const auto& t : sf.terms) {
    if (!t.region.is_cube()) throw DomainError("dyadic_refine needs dyadic cube regions");
    DyadicCube c = t.region.as_cube();
    if (sf.dim == 1) c.corner[1] = 0;
    pieces.push_back({t.coefficient, c});
  }

  // Split any cube that strictly contains another one.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < pieces.size() && !changed; ++i) {
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        if (i != j && strictly_contains(pieces[i].cube, pieces[j].cube, sf.dim)) {
          const Piece parent = pieces[i];
          pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(i));
          for (const auto& ch : children(parent.cube, sf.dim)) pieces.push_back({parent.coefficient, ch});
          changed = true;
          break;
        }
      }
    }
  }
  // Merge coinciding cubes.
  std::vector<Piece> merged;
  for (const auto& p : pieces) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const Piece& q) { return q.cube == p.cube; });
    if (it == merged.end()) {
      merged.push_back(p);
    } else {
      it->coefficient += p.coefficient;
    }
  }

  SimpleFunction out{sf.dim, {}};
  std::vector<DyadicCube> stack;
  for (const auto& p : merged) {
    stack.assign(1, p.cube);
    std::vector<DyadicCube> done;
    while (!stack.empty()) {
      const DyadicCube c = stack.back();
      stack.pop_back();
      if (c.side() <= max_side) {
        done.push_back(c);
        continue;
      }
      auto ch = children(c, sf.dim);
      stack.insert(stack.end(), ch.rbegin(), ch.rend());
    }
    for (const auto& c : done) out.terms.push_back({p.coefficient, Region(c)});
  }
  return out;
}

// ---------------------------------------------------------------- Random simple functions

namespace {

bool overlaps(const Region& a, const Region& b, int dim) {
  if (a.is_cube() && b.is_cube()) {
    const auto& ca = a.as_cube();
    const auto& cb = b.as_cube();
    return ca == cb || strictly_contains(ca, cb, dim) || strictly_contains(cb, ca, dim);
  }
  const auto& ba = a.as_ball();
  const auto& bb = b.as_ball();
  const double dx = ba.center[0] - bb.center[0];
  const double dy = dim == 2 ? ba.center[1] - bb.center[1] : 0.0;
  return std::sqrt(dx * dx + dy * dy) < ba.radius + bb.radius;
}

double snap_to(double x, double q) { return q > 0.0 ? std::round(x / q) * q : x; }

Region random_region(Rng& rng, const SimpleFunctionParams& p) {
  const double max_scale = p.region_scale;
  const double min_scale = p.region_min_scale > 0.0 ? p.region_min_scale : max_scale / 8.0;
  if (p.kind == RegionKind::cube) {
    const int coarse = static_cast<int>(std::ceil(-std::log2(max_scale) - 1e-12));
    const int fine = std::max(coarse, static_cast<int>(std::floor(-std::log2(min_scale) + 1e-12)));
    const int level = static_cast<int>(rng.integer(coarse, fine));
    const double side = std::ldexp(1.0, -level);
    const auto cells = static_cast<std::int64_t>(std::floor(p.window / side));
    if (cells < 1) throw DomainError("window too small for the requested cube size");
    std::array<std::int64_t, 2> corner{rng.integer(-cells, cells - 1), 0};
    if (p.dim == 2) corner[1] = rng.integer(-cells, cells - 1);
    return Region(DyadicCube{level, corner});
  }
  double r = rng.uniform(min_scale, max_scale);
  if (p.snap > 0.0) r = std::max(p.snap, snap_to(r, p.snap));
  if (r >= p.window) throw DomainError("window too small for the requested ball size");
  Point c{rng.uniform(-p.window + r, p.window - r), 0.0};
  if (p.dim == 2) c[1] = rng.uniform(-p.window + r, p.window - r);
  c[0] = snap_to(c[0], p.snap);
  c[1] = snap_to(c[1], p.snap);
  return Region(Ball{c, r});
}

}  // namespace

SimpleFunction random_simple_function(std::uint64_t seed, const SimpleFunctionParams& params) {
  if (params.dim != 1 && params.dim != 2) throw DomainError("dimension must be 1 or 2");
  if (params.num_terms < 1) throw DomainError("need at least one term");
  if (!(params.region_scale > 0.0) || !(params.window > 0.0)) throw DomainError("scales must be positive");
  if (!(params.coeff_min > 0.0 && params.coeff_min <= 1.0)) throw DomainError("coeff_min must lie in (0, 1]");
  Rng rng(seed);
  SimpleFunction sf{params.dim, {}};
  constexpr int kMaxAttempts = 2000;
  for (int k = 0; k < params.num_terms; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      Region candidate = random_region(rng, params);
      const bool clash = std::any_of(sf.terms.begin(), sf.terms.end(),
                                     [&](const Term& t) { return overlaps(t.region, candidate, params.dim); });
      if (clash) continue;
      const double a = params.indicator ? 1.0 : rng.uniform(params.coeff_min, 1.0);
      sf.terms.push_back({a, candidate});
      placed = true;
    }
    if (!placed) throw DomainError("could not place disjoint regions in the window");
  }
  const double top = sf.max_coefficient();
  for (auto& t : sf.terms) t.coefficient /= top;
  return sf;
}

// ---------------------------------------------------------------- Combs

GridFunction comb_convolve(const PointConfiguration& pc, const PointEvaluator& kernel, const Grid& grid) {
  if (pc.dim != grid.dim()) throw DomainError("configuration and grid dimensions differ");
  std::vector<Complex> out(grid.size(), Complex{});
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point x = grid.point(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < pc.points.size(); ++k) {
      Point d{grid.wrap(x[0] - pc.points[k][0]), 0.0};
      if (grid.dim() == 2) d[1] = grid.wrap(x[1] - pc.points[k][1]);
      acc += pc.weight(k) * kernel(d);
    }
    out[i] = acc;
  }
  return GridFunction(grid, std::move(out));
}

// ---------------------------------------------------------------- Serialisation

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::array<int, 256> lookup{};
  lookup.fill(-1);
  for (int i = 0; i < 64; ++i) lookup[static_cast<unsigned char>(kAlphabet[i])] = i;
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char ch : text) {
    if (ch == '=') break;
    const int v = lookup[static_cast<unsigned char>(ch)];
    if (v < 0) throw DomainError("invalid base64 payload");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

void put_le(double x, std::uint8_t* dst) {
  std::uint64_t u = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) dst[b] = static_cast<std::uint8_t>(u >> (8 * b));
}

double get_le(const std::uint8_t* src) {
  std::uint64_t u = 0;
  for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(src[b]) << (8 * b);
  return std::bit_cast<double>(u);
}

}  // namespace

std::string serialize(const GridFunction& f) {
  const Grid& g = f.grid();
  std::vector<std::uint8_t> bytes(f.size() * 16);
  for (std::size_t i = 0; i < f.size(); ++i) {
    put_le(f[i].real(), &bytes[16 * i]);
    put_le(f[i].imag(), &bytes[16 * i + 8]);
  }
  nlohmann::ordered_json j;
  j["format"] = "varpoint.gridfunction";
  j["version"] = 1;
  j["dim"] = g.dim();
  j["extent"] = g.extent();
  j["spacing"] = g.spacing();
  j["origin"] = g.dim() == 1 ? nlohmann::json::array({g.origin()[0]})
                             : nlohmann::json::array({g.origin()[0], g.origin()[1]});
  j["encoding"] = "base64:f64le:re,im";
  j["data"] = base64_encode(bytes);
  return j.dump();
}

GridFunction deserialize(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("grid function is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "varpoint.gridfunction") throw DomainError("not a serialized grid function");
  const int dim = j.at("dim").get<int>();
  const auto extent = j.at("extent").get<std::size_t>();
  const double spacing = j.at("spacing").get<double>();
  const auto& o = j.at("origin");
  Point origin{o.at(0).get<double>(), dim == 2 ? o.at(1).get<double>() : 0.0};
  Grid grid(dim, extent, spacing, origin);
  const auto bytes = base64_decode(j.at("data").get<std::string>());
  if (bytes.size() != grid.size() * 16) throw DomainError("payload length does not match the grid");
  std::vector<Complex> samples(grid.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = {get_le(&bytes[16 * i]), get_le(&bytes[16 * i + 8])};
  return GridFunction(grid, std::move(samples));
}

}  // namespace varpoint
