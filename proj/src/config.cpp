#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "varpoint/errors.hpp"
#include "varpoint/experiments.hpp"

namespace varpoint {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config key '" + path + "': " + what);
}

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
}

double number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  fail(path, "expected a number");
}

std::int64_t integer(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  fail(path, "expected an integer");
}

std::size_t count(const json& v, const std::string& path) {
  const auto n = integer(v, path);
  if (n < 0) fail(path, "must be non-negative");
  return static_cast<std::size_t>(n);
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string str(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json encode(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json encode(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(encode(x));
  return a;
}

void read_grid(const json& v, const std::string& path, GridConfig& g) {
  require_object(v, path);
  for (const auto& [k, x] : v.items()) {
    const auto p = join(path, k);
    if (k == "dim") {
      g.dim = static_cast<int>(integer(x, p));
    } else if (k == "extent") {
      g.extent = count(x, p);
    } else if (k == "spacing") {
      g.spacing = number(x, p);
    } else {
      fail(p, "unknown key");
    }
  }
}

void read_family(const json& v, const std::string& path, FamilyConfig& f) {
  require_object(v, path);
  for (const auto& [k, x] : v.items()) {
    const auto p = join(path, k);
    if (k == "kind") {
      f.kind = str(x, p);
    } else if (k == "T") {
      f.T = static_cast<int>(integer(x, p));
    } else if (k == "params" || k == "times" || k == "scales" || k == "radii") {
      f.params = numbers(x, p);
    } else if (k == "mollify_epsilon") {
      if (x.is_null()) {
        f.mollify_epsilon.reset();
      } else {
        f.mollify_epsilon = number(x, p);
      }
    } else {
      fail(p, "unknown key");
    }
  }
}

OperatorConfig read_operator(const json& v, const std::string& path) {
  require_object(v, path);
  OperatorConfig op;
  if (!v.contains("kind")) fail(join(path, "kind"), "missing");
  for (const auto& [k, x] : v.items()) {
    const auto p = join(path, k);
    if (k == "kind") {
      try {
        op.kind = operator_kind_from_string(str(x, p));
      } catch (const DomainError& e) {
        fail(p, e.what());
      }
    } else if (k == "r") {
      const double r = number(x, p);
      if (!(r >= 1.0)) fail(p, "r must be in [1, inf]");
      op.r = std::isinf(r) ? VariationExponent::infinity() : VariationExponent(r);
    } else if (k == "lambdas") {
      op.jump_lambdas = numbers(x, p);
    } else {
      fail(p, "unknown key");
    }
  }
  return op;
}

std::vector<OperatorConfig> read_operators(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of operators");
  std::vector<OperatorConfig> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_operator(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

RegionKind region_kind(const json& v, const std::string& path) {
  const auto s = str(v, path);
  if (s == "ball") return RegionKind::ball;
  if (s == "cube") return RegionKind::cube;
  fail(path, "expected \"ball\" or \"cube\"");
}

void read_tests(const json& v, const std::string& path, TestFamilySpec& t) {
  require_object(v, path);
  for (const auto& [k, x] : v.items()) {
    const auto p = join(path, k);
    if (k == "count") {
      t.count = count(x, p);
    } else if (k == "lambda_grid") {
      t.lambda_grid = numbers(x, p);
    } else if (k == "steps_per_octave") {
      t.steps_per_octave = static_cast<int>(integer(x, p));
    } else if (k == "min_terms") {
      t.min_terms = static_cast<int>(integer(x, p));
    } else if (k == "max_terms") {
      t.max_terms = static_cast<int>(integer(x, p));
    } else if (k == "region") {
      t.shape.kind = region_kind(x, p);
    } else if (k == "region_scale") {
      t.shape.region_scale = number(x, p);
    } else if (k == "region_min_scale") {
      t.shape.region_min_scale = number(x, p);
    } else if (k == "window") {
      t.shape.window = number(x, p);
      t.point_window = t.shape.window;
    } else if (k == "snap") {
      t.shape.snap = number(x, p);
      t.point_snap = t.shape.snap;
    } else if (k == "coeff_min") {
      t.shape.coeff_min = number(x, p);
    } else if (k == "min_points") {
      t.min_points = static_cast<int>(integer(x, p));
    } else if (k == "max_points") {
      t.max_points = static_cast<int>(integer(x, p));
    } else if (k == "max_denominator") {
      t.max_denominator = static_cast<int>(integer(x, p));
    } else {
      fail(p, "unknown key");
    }
  }
}

void read_verify(const json& v, const std::string& path, VerifyConfig& c) {
  require_object(v, path);
  for (const auto& [k, x] : v.items()) {
    const auto p = join(path, k);
    if (k == "variation_trials") {
      c.variation_trials = count(x, p);
    } else if (k == "variation_max_length") {
      c.variation_max_length = count(x, p);
    } else if (k == "variation_exponents") {
      c.variation_exponents = numbers(x, p);
    } else if (k == "jump_trials") {
      c.jump_trials = count(x, p);
    } else if (k == "jump_max_length") {
      c.jump_max_length = count(x, p);
    } else if (k == "jump_lambdas") {
      c.jump_lambdas = count(x, p);
    } else if (k == "inequality_trials") {
      c.inequality_trials = count(x, p);
    } else if (k == "inequality_max_length") {
      c.inequality_max_length = count(x, p);
    } else if (k == "field_trials") {
      c.field_trials = count(x, p);
    } else {
      fail(p, "unknown key");
    }
  }
}

DecayCurveConfig read_decay(const json& v, const std::string& path) {
  require_object(v, path);
  DecayCurveConfig d;
  for (const auto& [k, x] : v.items()) {
    const auto p = join(path, k);
    if (k == "name") {
      d.name = str(x, p);
    } else if (k == "grid") {
      read_grid(x, p, d.grid);
    } else if (k == "family") {
      read_family(x, p, d.family);
    } else if (k == "p") {
      d.p = number(x, p);
    } else if (k == "k_min") {
      d.k_min = static_cast<int>(integer(x, p));
    } else if (k == "k_max") {
      d.k_max = static_cast<int>(integer(x, p));
    } else if (k == "probes") {
      d.probes = count(x, p);
    } else if (k == "expect") {
      require_object(x, p);
      for (const auto& [ek, ex] : x.items()) {
        const auto ep = join(p, ek);
        if (ek == "decreasing") {
          d.expect_decreasing = boolean(ex, ep);
        } else if (ek == "final_below") {
          d.expect_final_below = number(ex, ep);
        } else if (ek == "slope") {
          d.expect_slope = number(ex, ep);
        } else if (ek == "slope_tolerance") {
          d.slope_tolerance = number(ex, ep);
        } else if (ek == "not_smoothing") {
          d.expect_not_smoothing = boolean(ex, ep);
        } else {
          fail(ep, "unknown key");
        }
      }
    } else {
      fail(p, "unknown key");
    }
  }
  return d;
}

void read_decomposition(const json& v, const std::string& path, DecompositionConfig& d) {
  require_object(v, path);
  for (const auto& [k, x] : v.items()) {
    const auto p = join(path, k);
    if (k == "enabled") {
      d.enabled = boolean(x, p);
    } else if (k == "grid") {
      read_grid(x, p, d.grid);
    } else if (k == "family") {
      read_family(x, p, d.family);
    } else if (k == "operator") {
      d.op = read_operator(x, p);
    } else if (k == "lambda") {
      d.lambda = number(x, p);
    } else if (k == "p") {
      d.p = number(x, p);
    } else if (k == "q") {
      d.q = number(x, p);
    } else if (k == "count") {
      d.count = count(x, p);
    } else if (k == "region_scale") {
      d.shape.region_scale = number(x, p);
    } else if (k == "window") {
      d.shape.window = number(x, p);
    } else if (k == "num_terms") {
      d.shape.num_terms = static_cast<int>(integer(x, p));
    } else {
      fail(p, "unknown key");
    }
  }
}

Convention convention_from_string(const std::string& s, const std::string& path) {
  if (s == "weak_1q") return Convention::weak_1q;
  if (s == "restricted_1q") return Convention::restricted_1q;
  if (s == "pointed_pp") return Convention::pointed_pp;
  if (s == "strong_pp") return Convention::strong_pp;
  fail(path, "unknown convention '" + s + "'");
}

void read_estimate(const json& v, const std::string& path, EstimateConfig& e) {
  require_object(v, path);
  for (const auto& [k, x] : v.items()) {
    const auto p = join(path, k);
    if (k == "convention") {
      e.convention = convention_from_string(str(x, p), p);
    } else if (k == "operator") {
      e.op = read_operator(x, p);
    } else if (k == "exponent") {
      e.exponent = number(x, p);
    } else {
      fail(p, "unknown key");
    }
  }
}

void validate_grid(const GridConfig& g, const std::string& path) {
  try {
    (void)Grid::centered(g.dim, g.extent, g.spacing);
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

void validate_family(const FamilyConfig& f, int dim, const std::string& path) {
  const auto& k = f.kind;
  if (k == "dyadic_averages") {
    if (f.T < 0) fail(join(path, "T"), "must be >= 0");
  } else if (k == "identity") {
    if (f.T < 1) fail(join(path, "T"), "must be >= 1");
  } else if (k == "heat" || k == "poisson" || k == "sphere") {
    if (f.params.empty()) fail(join(path, "params"), "must be non-empty");
    for (double x : f.params) {
      if (!(x > 0.0) || !std::isfinite(x)) fail(join(path, "params"), "entries must be positive and finite");
    }
    if (k == "sphere" && dim != 2) fail(join(path, "kind"), "sphere families need dim 2");
  } else {
    fail(join(path, "kind"), "unknown family kind '" + k + "'");
  }
  if (f.mollify_epsilon && !(*f.mollify_epsilon > 0.0)) fail(join(path, "mollify_epsilon"), "must be positive");
}

void validate_operator(const OperatorConfig& op, const std::string& path) {
  if (op.kind == OperatorKind::jump_surrogate) {
    if (op.jump_lambdas.empty()) fail(join(path, "lambdas"), "jump operators need at least one jump size");
    for (double l : op.jump_lambdas) {
      if (!(l > 0.0) || !std::isfinite(l)) fail(join(path, "lambdas"), "jump sizes must be positive");
    }
    if (op.r && op.r->is_infinite()) fail(join(path, "r"), "jump operators need finite r");
  }
}

void validate(const ExperimentConfig& c) {
  static const std::vector<std::string> names{"verify",    "moon_equivalence", "cdg_equivalence",
                                              "smoothing", "inequalities",     "estimate"};
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    fail("experiment", "unknown experiment '" + c.experiment + "'");
  }
  if (c.format != "csv" && c.format != "json") fail("output.format", "expected \"csv\" or \"json\"");
  if (c.workers < 0) fail("workers", "must be >= 0");
  validate_grid(c.grid, "grid");
  validate_family(c.family, c.grid.dim, "family");
  for (std::size_t i = 0; i < c.operators.size(); ++i) {
    validate_operator(c.operators[i], "operators[" + std::to_string(i) + "]");
  }
  for (double q : c.q_values) {
    if (!(q > 0.0) || !std::isfinite(q)) fail("q_values", "entries must be positive and finite");
  }
  for (double p : c.p_values) {
    if (!(p >= 1.0) || !std::isfinite(p)) fail("p_values", "entries must be in [1, inf)");
  }
  for (const auto& [spec, path] : {std::pair{&c.tests, "tests"}, std::pair{&c.combs, "combs"}}) {
    try {
      spec->validate();
    } catch (const DomainError& e) {
      fail(path, e.what());
    }
    if (!(spec->shape.region_scale > 0.0)) fail(join(path, "region_scale"), "must be positive");
    if (!(spec->shape.window > 0.0)) fail(join(path, "window"), "must be positive");
  }
  if (!(c.tolerance >= 0.0)) fail("tolerance", "must be >= 0");
  for (double r : c.verify.variation_exponents) {
    if (!(r >= 1.0)) fail("verify.variation_exponents", "entries must be in [1, inf]");
  }
  if (c.verify.variation_max_length < 1 || c.verify.variation_max_length > kVariationOracleMaxLength) {
    fail("verify.variation_max_length", "must be in [1, 20]");
  }
  if (c.verify.jump_max_length < 1 || c.verify.jump_max_length > kJumpOracleMaxLength) {
    fail("verify.jump_max_length", "must be in [1, 14]");
  }
  if (c.verify.inequality_max_length < 1) fail("verify.inequality_max_length", "must be >= 1");
  for (std::size_t i = 0; i < c.decay.size(); ++i) {
    const auto path = "decay[" + std::to_string(i) + "]";
    const auto& d = c.decay[i];
    validate_grid(d.grid, join(path, "grid"));
    validate_family(d.family, d.grid.dim, join(path, "family"));
    if (!(d.p >= 1.0)) fail(join(path, "p"), "must be >= 1");
    if (d.k_max < d.k_min || d.k_min < 0) fail(join(path, "k_max"), "need 0 <= k_min <= k_max");
  }
  if (c.decomposition.enabled) {
    const auto& d = c.decomposition;
    validate_grid(d.grid, "decomposition.grid");
    validate_family(d.family, d.grid.dim, "decomposition.family");
    validate_operator(d.op, "decomposition.operator");
    if (d.p != 2.0) fail("decomposition.p", "only p = 2 is supported (the exact multiplier bound)");
    if (!(d.lambda > 0.0)) fail("decomposition.lambda", "must be positive");
    if (!(d.q > 0.0)) fail("decomposition.q", "must be positive");
  }
  validate_operator(c.estimate.op, "estimate.operator");
  if (!(c.estimate.exponent > 0.0)) fail("estimate.exponent", "must be positive");
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

ordered_json grid_json(const GridConfig& g) {
  return ordered_json{{"dim", g.dim}, {"extent", g.extent}, {"spacing", g.spacing}};
}

ordered_json family_json(const FamilyConfig& f) {
  ordered_json j{{"kind", f.kind}, {"T", f.T}, {"params", encode(f.params)}};
  if (f.mollify_epsilon) j["mollify_epsilon"] = *f.mollify_epsilon;
  return j;
}

ordered_json operator_json(const OperatorConfig& op) {
  ordered_json j{{"kind", op.kind == OperatorKind::jump_surrogate ? "jump" : to_string(op.kind)}};
  if (op.r) j["r"] = encode(op.r->value());
  if (!op.jump_lambdas.empty()) j["lambdas"] = encode(op.jump_lambdas);
  return j;
}

ordered_json tests_json(const TestFamilySpec& t, bool combs) {
  ordered_json j{{"count", t.count}};
  if (combs) {
    j["min_points"] = t.min_points;
    j["max_points"] = t.max_points;
    j["window"] = t.point_window;
    j["snap"] = t.point_snap;
    j["max_denominator"] = t.max_denominator;
  } else {
    j["min_terms"] = t.min_terms;
    j["max_terms"] = t.max_terms;
    j["region"] = t.shape.kind == RegionKind::ball ? "ball" : "cube";
    j["region_scale"] = t.shape.region_scale;
    j["region_min_scale"] = t.shape.region_min_scale;
    j["window"] = t.shape.window;
    j["snap"] = t.shape.snap;
    j["coeff_min"] = t.shape.coeff_min;
  }
  j["steps_per_octave"] = t.steps_per_octave;
  j["lambda_grid"] = encode(t.lambda_grid);
  return j;
}

}  // namespace

KernelFamily FamilyConfig::make(const Grid& grid) const {
  auto fam = [&] {
    if (kind == "dyadic_averages") return dyadic_averages(T, grid.dim(), grid);
    if (kind == "heat") return heat_family(params, grid);
    if (kind == "poisson") return poisson_family(params, grid);
    if (kind == "sphere") return sphere_family(params, grid);
    if (kind == "identity") return identity_family(static_cast<std::size_t>(T), grid);
    throw ConfigError("unknown family kind '" + kind + "'");
  }();
  if (mollify_epsilon) return mollify(fam, *mollify_epsilon);
  return fam;
}

std::string OperatorConfig::label() const {
  OperatorSpec spec{kind, r.value_or(VariationExponent(2.0)), std::nullopt, {}};
  return spec.label();
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    const auto colon = msg.rfind(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg);
  }
  require_object(root, "<root>");
  if (!root.contains("seed")) fail("seed", "missing (a seed is mandatory)");
  if (!root.contains("experiment")) fail("experiment", "missing");
  const auto seed = integer(root["seed"], "seed");
  if (seed < 0) fail("seed", "must be non-negative");
  const auto name = str(root["experiment"], "experiment");
  ExperimentConfig c;
  try {
    c = default_config(name, static_cast<std::uint64_t>(seed));
  } catch (const ConfigError&) {
    fail("experiment", "unknown experiment '" + name + "'");
  }

  for (const auto& [k, x] : root.items()) {
    if (k == "experiment" || k == "seed") continue;
    if (k == "output") {
      require_object(x, k);
      for (const auto& [ok, ox] : x.items()) {
        const auto p = join(k, ok);
        if (ok == "dir") {
          c.out_dir = str(ox, p);
        } else if (ok == "format") {
          c.format = str(ox, p);
        } else {
          fail(p, "unknown key");
        }
      }
    } else if (k == "workers") {
      c.workers = static_cast<int>(integer(x, k));
    } else if (k == "grid") {
      read_grid(x, k, c.grid);
    } else if (k == "family") {
      read_family(x, k, c.family);
    } else if (k == "operators") {
      c.operators = read_operators(x, k);
    } else if (k == "q_values") {
      c.q_values = numbers(x, k);
    } else if (k == "p_values") {
      c.p_values = numbers(x, k);
    } else if (k == "tests") {
      read_tests(x, k, c.tests);
    } else if (k == "combs") {
      read_tests(x, k, c.combs);
    } else if (k == "weighted_count") {
      c.weighted_count = count(x, k);
    } else if (k == "indicator_seed_offset") {
      c.indicator_seed_offset = count(x, k);
    } else if (k == "tolerance") {
      c.tolerance = number(x, k);
    } else if (k == "proof_chain") {
      c.proof_chain = boolean(x, k);
    } else if (k == "verify") {
      read_verify(x, k, c.verify);
    } else if (k == "decay") {
      if (!x.is_array()) fail(k, "expected an array of decay curves");
      c.decay.clear();
      for (std::size_t i = 0; i < x.size(); ++i) c.decay.push_back(read_decay(x[i], k + "[" + std::to_string(i) + "]"));
    } else if (k == "decomposition") {
      read_decomposition(x, k, c.decomposition);
    } else if (k == "estimate") {
      read_estimate(x, k, c.estimate);
    } else {
      fail(k, "unknown key");
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig default_config(const std::string& experiment, std::uint64_t seed) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.seed = seed;

  c.grid = GridConfig{1, 4096, 0.125};
  c.family = FamilyConfig{"dyadic_averages", 6, {}, std::nullopt};
  c.operators = {
      {OperatorKind::variation, VariationExponent(2.0), {}},
      {OperatorKind::variation, VariationExponent::infinity(), {}},
      {OperatorKind::jump_surrogate, VariationExponent(2.0), {0.05, 0.1, 0.2}},
  };

  c.tests.count = 200;
  c.tests.min_terms = 1;
  c.tests.max_terms = 5;
  c.tests.shape.kind = RegionKind::ball;
  c.tests.shape.region_scale = 4.0;
  c.tests.shape.window = 16.0;

  c.combs.test_class = TestClass::point_combs;
  c.combs.count = 200;
  c.combs.min_points = 1;
  c.combs.max_points = 5;
  c.combs.point_window = 16.0;

  c.decomposition.shape.kind = RegionKind::ball;
  c.decomposition.shape.num_terms = 3;
  c.decomposition.shape.region_scale = 2.0;
  c.decomposition.shape.window = 16.0;

  c.estimate.op = OperatorConfig{OperatorKind::maximal, std::nullopt, {}};

  if (experiment == "cdg_equivalence") {
    c.tests.shape.kind = RegionKind::cube;
  } else if (experiment == "smoothing") {
    DecayCurveConfig heat;
    heat.name = "heat";
    heat.grid = GridConfig{1, 4096, 1.0 / 64};
    heat.family = FamilyConfig{"heat", 0, {0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64, 1.28}, std::nullopt};
    heat.k_min = 0;
    heat.k_max = 6;
    heat.expect_decreasing = true;
    heat.expect_final_below = 0.01;

    DecayCurveConfig sphere;
    sphere.name = "sphere";
    sphere.grid = GridConfig{2, 512, 1.0 / 64};
    sphere.family = FamilyConfig{"sphere", 0, {1.0, 2.0}, std::nullopt};
    sphere.k_min = 1;
    sphere.k_max = 6;
    sphere.expect_slope = -0.5;
    sphere.slope_tolerance = 0.1;

    DecayCurveConfig delta;
    delta.name = "identity";
    delta.grid = GridConfig{1, 1024, 1.0 / 64};
    delta.family = FamilyConfig{"identity", 4, {}, std::nullopt};
    delta.k_min = 0;
    delta.k_max = 6;
    delta.expect_not_smoothing = true;

    c.decay = {heat, sphere, delta};
  } else if (experiment != "verify" && experiment != "moon_equivalence" && experiment != "inequalities" &&
             experiment != "estimate") {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  c.decomposition.enabled = experiment == "smoothing";
  return c;
}

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["output"] = ordered_json{{"dir", c.out_dir}, {"format", c.format}};
  j["workers"] = c.workers;
  j["grid"] = grid_json(c.grid);
  j["family"] = family_json(c.family);
  ordered_json ops = ordered_json::array();
  for (const auto& op : c.operators) ops.push_back(operator_json(op));
  j["operators"] = ops;
  j["q_values"] = encode(c.q_values);
  j["p_values"] = encode(c.p_values);
  j["tests"] = tests_json(c.tests, false);
  j["combs"] = tests_json(c.combs, true);
  j["weighted_count"] = c.weighted_count;
  j["indicator_seed_offset"] = c.indicator_seed_offset;
  j["tolerance"] = c.tolerance;
  j["proof_chain"] = c.proof_chain;
  const auto& v = c.verify;
  j["verify"] = ordered_json{{"variation_trials", v.variation_trials},
                             {"variation_max_length", v.variation_max_length},
                             {"variation_exponents", encode(v.variation_exponents)},
                             {"jump_trials", v.jump_trials},
                             {"jump_max_length", v.jump_max_length},
                             {"jump_lambdas", v.jump_lambdas},
                             {"inequality_trials", v.inequality_trials},
                             {"inequality_max_length", v.inequality_max_length},
                             {"field_trials", v.field_trials}};
  ordered_json decay = ordered_json::array();
  for (const auto& d : c.decay) {
    ordered_json expect{{"decreasing", d.expect_decreasing}, {"not_smoothing", d.expect_not_smoothing}};
    if (d.expect_final_below) expect["final_below"] = *d.expect_final_below;
    if (d.expect_slope) {
      expect["slope"] = *d.expect_slope;
      expect["slope_tolerance"] = d.slope_tolerance;
    }
    decay.push_back(ordered_json{{"name", d.name},
                                 {"grid", grid_json(d.grid)},
                                 {"family", family_json(d.family)},
                                 {"p", encode(d.p)},
                                 {"k_min", d.k_min},
                                 {"k_max", d.k_max},
                                 {"probes", d.probes},
                                 {"expect", expect}});
  }
  j["decay"] = decay;
  const auto& d = c.decomposition;
  j["decomposition"] = ordered_json{{"enabled", d.enabled},
                                    {"grid", grid_json(d.grid)},
                                    {"family", family_json(d.family)},
                                    {"operator", operator_json(d.op)},
                                    {"lambda", d.lambda},
                                    {"p", d.p},
                                    {"q", d.q},
                                    {"count", d.count},
                                    {"num_terms", d.shape.num_terms},
                                    {"region_scale", d.shape.region_scale},
                                    {"window", d.shape.window}};
  j["estimate"] = ordered_json{{"convention", to_string(c.estimate.convention)},
                               {"operator", operator_json(c.estimate.op)},
                               {"exponent", c.estimate.exponent}};
  return j;
}

}  // namespace varpoint
