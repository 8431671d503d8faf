// wcl: command-line front end for the localization toolkit.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "wcl/error.hpp"
#include "wcl/harness.hpp"

namespace {

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("WCL_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw wcl::Error(wcl::ErrorCode::config, std::string("WCL_SEED is not an unsigned integer: ") + s);
  }
}

std::optional<std::filesystem::path> env_out_dir() {
  const char* s = std::getenv("WCL_OUT_DIR");
  if (!s || !*s) return std::nullopt;
  return std::filesystem::path(s);
}

wcl::ExperimentConfig load(const std::string& path) {
  auto cfg = wcl::load_experiment_config(path);
  if (auto s = env_seed()) cfg.seed = *s;
  return cfg;
}

// Runs `fn` against the configured output file, or stdout when none is set.
template <typename Fn>
void with_output(const std::string& configured, Fn&& fn) {
  if (configured.empty()) {
    fn(std::cout);
    return;
  }
  std::filesystem::path path(configured);
  if (auto dir = env_out_dir(); dir && path.is_relative()) path = *dir / path;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw wcl::Error(wcl::ErrorCode::config, "cannot write " + path.string());
  fn(os);
  std::cerr << "wrote " << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted centroid localization: simulation, analysis and overhead accounting"};
  app.require_subcommand(1);

  std::string config;
  std::string out;

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of one configuration");
  simulate->add_option("--config", config, "JSON configuration file")->required();
  simulate->add_option("--out", out, "CSV output path (overrides the config)");

  bool theory_schema = false;
  auto* theory = app.add_subcommand("theory", "Analytical error statistics for one configuration");
  theory->add_option("--config", config, "JSON configuration file")->required();
  theory->add_option("--out", out, "CSV output path (overrides the config)");
  theory->add_flag("--theory-schema", theory_schema, "emit the analysis schema instead of result rows");

  std::string figure_id;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  auto* figure = app.add_subcommand("figure", "Reproduce the data behind a figure");
  figure->add_option("id", figure_id, "fig1a, fig1b, fig2 .. fig10")->required();
  figure->add_option("--trials", trials, "trials per sweep point");
  figure->add_option("--seed", seed, "base seed");
  figure->add_option("--out", out_dir, "output directory");

  std::string ledger_path;
  auto* dwcl = app.add_subcommand("dwcl", "Distributed WCL runs with message ledger");
  dwcl->add_option("--config", config, "JSON configuration file")->required();
  dwcl->add_option("--out", out, "per-run result CSV (overrides the config)");
  dwcl->add_option("--ledger", ledger_path, "message ledger CSV");

  auto* overhead = app.add_subcommand("overhead", "Power and operation counts, CWCL vs DWCL");
  overhead->add_option("--config", config, "JSON configuration file")->required();
  overhead->add_option("--out", out, "CSV output path (overrides the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      auto cfg = load(config);
      const auto row = wcl::run_experiment(cfg);
      with_output(out.empty() ? cfg.output : out, [&](std::ostream& os) { wcl::write_result_csv(os, {row}); });
    } else if (theory->parsed()) {
      auto cfg = load(config);
      if (theory_schema) {
        wcl::TheoryScenario sc;
        sc.deployment = cfg.deployment;
        sc.channel = cfg.resolved_channel();
        sc.wcl = cfg.estimator.wcl;
        sc.method = cfg.theory.method;
        wcl::Rng rng(cfg.seed);
        const auto avg = wcl::average_over_placements(sc, cfg.theory.placements, rng);
        with_output(out.empty() ? cfg.output : out, [&](std::ostream& os) {
          wcl::write_theory_csv_header(os);
          wcl::write_theory_csv_row(os, cfg.scenario, sc, avg);
        });
      } else {
        const auto row = wcl::run_theory(cfg);
        with_output(out.empty() ? cfg.output : out, [&](std::ostream& os) { wcl::write_result_csv(os, {row}); });
      }
    } else if (figure->parsed()) {
      wcl::FigureOptions opts;
      opts.trials = trials;
      if (auto s = env_seed()) opts.seed = *s;
      if (seed) opts.seed = *seed;
      std::filesystem::path dir = out_dir.empty() ? env_out_dir().value_or("results") : std::filesystem::path(out_dir);
      for (const auto& p : wcl::run_figure(figure_id, opts, dir)) std::cout << p.string() << '\n';
    } else if (dwcl->parsed()) {
      auto cfg = load(config);
      std::ofstream ledger;
      if (!ledger_path.empty()) {
        ledger.open(ledger_path);
        if (!ledger) throw wcl::Error(wcl::ErrorCode::config, "cannot write " + ledger_path);
      }
      wcl::DwclRunSummary summary;
      with_output(out.empty() ? cfg.output : out, [&](std::ostream& os) {
        summary = wcl::run_dwcl_experiment(cfg, ledger_path.empty() ? nullptr : &ledger, &os);
      });
      std::cerr << "dwcl: mean error " << summary.row.mean_err_m << " m (" << summary.row.mean_err_over_d
                << " D), head-selection fallbacks " << summary.fallbacks << ", eta " << summary.mean_eta
                << ", messages/run " << summary.mean_messages << '\n';
    } else if (overhead->parsed()) {
      auto cfg = load(config);
      const auto cmp = wcl::run_overhead(cfg);
      with_output(out.empty() ? cfg.output : out, [&](std::ostream& os) {
        wcl::write_overhead_csv_header(os);
        for (const auto* r : {&cmp.cwcl_analytic, &cmp.cwcl_ledger, &cmp.dwcl_analytic, &cmp.dwcl_ledger}) {
          wcl::write_overhead_csv_row(os, *r);
        }
      });
      std::cerr << "overhead: R_C " << cmp.cluster_radius << " m, L " << cmp.counts.l << ", M " << cmp.counts.m
                << ", K " << cmp.counts.k << ", eta " << cmp.eta << "; per-node power is total / N\n";
    }
  } catch (const wcl::Error& ex) {
    std::cerr << "wcl: error [" << wcl::to_string(ex.code()) << "]: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "wcl: error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
