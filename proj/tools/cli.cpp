#include "cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "varpoint/errors.hpp"

namespace varpoint {

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> grid;
  std::optional<int> dim;
  std::optional<int> workers;
  std::string format;
  bool no_timing = false;
  std::string name;
  std::string in;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "Seed (overrides the config)");
  sub->add_option("--out", o.out, "Output directory (default: $VARPOINT_OUT, then the config, then varpoint_out)");
  sub->add_option("--grid", o.grid, "Grid extent n (points per axis)");
  sub->add_option("--dim", o.dim, "Dimension")->check(CLI::IsMember({1, 2}));
  sub->add_option("--workers", o.workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  sub->add_option("--format", o.format, "Result format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--no-timing", o.no_timing, "Write runtime_ms as 0 so reruns are byte-identical");
}

ExperimentConfig resolve_config(const Options& o, const std::string& experiment) {
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    cfg = load_config(o.config);
    if (cfg.experiment != experiment) {
      throw ConfigError(o.config + ": config is for experiment '" + cfg.experiment + "', not '" + experiment + "'");
    }
    if (o.seed) cfg.seed = *o.seed;
  } else {
    cfg = default_config(experiment, o.seed.value_or(1));
  }
  if (o.grid) cfg.grid.extent = *o.grid;
  if (o.dim) cfg.grid.dim = *o.dim;
  if (o.workers) cfg.workers = *o.workers;
  if (!o.format.empty()) cfg.format = o.format;
  // Re-validate after the overrides.
  return parse_config(config_to_json(cfg).dump());
}

std::string output_dir(const Options& o, const ExperimentConfig* cfg) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("VARPOINT_OUT"); env && *env) return env;
  if (cfg && !cfg->out_dir.empty()) return cfg->out_dir;
  return "varpoint_out";
}

std::string margin_text(const std::optional<double>& v) {
  if (!v) return "-";
  std::ostringstream os;
  os.precision(6);
  os << *v;
  return os.str();
}

void print_summary(const RunOutcome& run, const std::string& dir) {
  std::size_t failed = 0;
  std::size_t boosted_pass = 0;
  for (const auto& r : run.records) {
    if (r.status == "FAIL") ++failed;
    if (r.quantity == "pointed_boosted_check" && r.status == "PASS") {
      ++boosted_pass;
      continue;
    }
    std::cout << r.status << "  " << r.quantity;
    if (!r.op.empty() && r.op != "none") std::cout << "  " << r.op;
    if (r.q) std::cout << "  q=" << *r.q;
    if (r.p) std::cout << "  p=" << *r.p;
    std::cout << "  value=" << margin_text(r.value);
    if (r.ratio) std::cout << "  ratio=" << margin_text(r.ratio);
    if (!r.detail.empty()) std::cout << "  " << r.detail;
    if (r.status == "FAIL" && !r.witness.empty()) std::cout << "  witness=" << r.witness;
    std::cout << "\n";
  }
  if (boosted_pass > 0) std::cout << "PASS  pointed_boosted_check  " << boosted_pass << " records\n";
  std::cout << run.records.size() << " records, " << failed << " failed; results in " << dir << "\n";
  if (failed > 0) {
    std::cout << "failing:";
    for (const auto& r : run.records) {
      if (r.status == "FAIL") std::cout << " " << r.quantity << (r.op.empty() || r.op == "none" ? "" : "/" + r.op);
    }
    std::cout << "\n";
  }
}

int run_and_report(const ExperimentConfig& cfg, const Options& o, const VerifyHooks& hooks) {
  const RunOutcome run = cfg.experiment == "verify" ? run_verify(cfg, hooks) : run_experiment(cfg);
  const std::string dir = output_dir(o, &cfg);
  emit_report(run.records, cfg.format, dir, !o.no_timing);
  print_summary(run, dir);
  return run.passed ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv, const VerifyHooks& hooks) {
  CLI::App app{"varpoint: variation, jump and maximal operators of kernel families on periodic lattices"};
  app.require_subcommand(1);
  Options o;

  auto* verify = app.add_subcommand("verify", "Run the oracle, inequality, Littlewood-Paley and field suites");
  add_common(verify, o);
  auto* estimate = app.add_subcommand("estimate", "Estimate one weak/restricted/pointed/strong type constant");
  add_common(estimate, o);
  auto* experiment = app.add_subcommand("experiment", "Run a named experiment");
  experiment->add_option("name", o.name, "moon_equivalence | cdg_equivalence | smoothing | inequalities | verify | estimate")
      ->required();
  add_common(experiment, o);
  auto* report = app.add_subcommand("report", "Re-emit tables and plots from a results file");
  report->add_option("--in", o.in, "results.csv or results.jsonl")->required()->check(CLI::ExistingFile);
  report->add_option("--out", o.out, "Output directory");
  report->add_option("--format", o.format, "Result format")->check(CLI::IsMember({"csv", "json"}));
  auto* config = app.add_subcommand("config", "Print the built-in config for an experiment");
  config->add_option("name", o.name, "Experiment name")->required();
  config->add_option("--seed", o.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*verify) return run_and_report(resolve_config(o, "verify"), o, hooks);
    if (*estimate) return run_and_report(resolve_config(o, "estimate"), o, hooks);
    if (*experiment) return run_and_report(resolve_config(o, o.name), o, hooks);
    if (*config) {
      std::cout << config_to_json(default_config(o.name, o.seed.value_or(1))).dump(2) << "\n";
      return 0;
    }
    if (*report) {
      const auto records = read_records(o.in);
      const std::string format = o.format.empty() ? (o.in.ends_with(".csv") ? "csv" : "json") : o.format;
      const std::string dir = output_dir(o, nullptr);
      const auto written = emit_report(records, format, dir);
      std::size_t failed = 0;
      for (const auto& r : records) failed += r.status == "FAIL" ? 1 : 0;
      std::cout << records.size() << " records, " << failed << " failed; wrote " << written.size() << " files to "
                << dir << "\n";
      return failed == 0 ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace varpoint
