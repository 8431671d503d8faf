#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wcl/channel.hpp"
#include "wcl/dwcl.hpp"
#include "wcl/estimators.hpp"
#include "wcl/overhead.hpp"
#include "wcl/placement.hpp"
#include "wcl/theory.hpp"

namespace wcl {

struct EstimatorSpec {
  Method method = Method::cwcl;
  WclConfig wcl;
  // Radius used for the border-quantile floor; the deployment radius when unset.
  std::optional<double> pmin_radius;
  double cluster_radius = 200.0;
  std::optional<double> active_threshold_dbm;
  bool aggregate = false;
};

struct TheorySpec {
  RatioMethod method = RatioMethod::hayya;
  std::size_t placements = 20;
};

struct OverheadSpec {
  double p_r_min_dbm = -70.0;
  std::optional<std::size_t> clusters;  // pick R_C giving this many nonempty clusters
  std::optional<double> eta;            // analytical eta; measured from the runs when unset
};

struct ExperimentConfig {
  std::string scenario = "experiment";
  DeploymentSpec deployment;
  ChannelParams channel;
  // Correlation distance as a multiple of D; overrides channel.x_c when set.
  std::optional<double> x_c_over_d;
  EstimatorSpec estimator;
  TheorySpec theory;
  OverheadSpec overhead;
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  std::string output;

  void validate() const;
  /// Nominal D = sqrt(area / N) of the configured deployment.
  double nominal_spacing() const;
  /// Channel with x_c resolved from x_c_over_d.
  ChannelParams resolved_channel() const;
  double x_c_ratio() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ResultRow {
  std::string scenario;
  std::string method;
  std::size_t n = 0;
  double sigma_s = 0.0;
  double x_c_over_d = 0.0;
  double sigma_l = 0.0;
  double doi = 0.0;
  double participation = 1.0;
  double mean_err_m = 0.0;
  double mean_err_over_d = 0.0;
  double std_err = 0.0;        // sample std of the error, m
  std::size_t trials = 0;      // trials that produced an estimate
  std::size_t skipped = 0;
  double spacing = 0.0;        // D

  double standard_error() const;  // of mean_err_m
};

void write_result_csv_header(std::ostream& os);
void write_result_csv_row(std::ostream& os, const ResultRow& row);
void write_result_csv(std::ostream& os, const std::vector<ResultRow>& rows);

/// Per-trial outcomes, kept for callers that need the raw errors.
struct TrialLog {
  std::vector<double> errors;  // m, successful trials only
  std::vector<Point2> estimates;
  std::vector<Point2> pus;
  std::vector<std::string> failures;  // diagnostic per skipped trial
};

/// Monte Carlo run of one configuration. Throws when more than 1% of the
/// trials fail.
ResultRow run_experiment(const ExperimentConfig& cfg, TrialLog* log = nullptr);

/// Analytical counterpart of run_experiment (CWCL with all nodes).
ResultRow run_theory(const ExperimentConfig& cfg);

/// DWCL trials with per-run ledger and result CSV.
struct DwclRunSummary {
  ResultRow row;
  std::size_t fallbacks = 0;
  double mean_eta = 0.0;
  double mean_messages = 0.0;
  ClusterCounts counts;
};
DwclRunSummary run_dwcl_experiment(const ExperimentConfig& cfg, std::ostream* ledger_csv, std::ostream* result_csv);

/// Analytical and ledger-priced power plus OPS for CWCL and DWCL on the
/// configured deployment.
struct OverheadComparison {
  OverheadReport cwcl_analytic;
  OverheadReport cwcl_ledger;
  OverheadReport dwcl_analytic;
  OverheadReport dwcl_ledger;
  double cluster_radius = 0.0;
  ClusterCounts counts;
  double eta = 0.0;
};
OverheadComparison run_overhead(const ExperimentConfig& cfg);

struct FigureOptions {
  std::optional<std::size_t> trials;
  std::uint64_t seed = 1;
};

/// Sweep configurations for a Monte Carlo figure (fig1a .. fig8).
std::vector<ExperimentConfig> figure_preset(const std::string& id, const FigureOptions& opts = {});
bool is_overhead_figure(const std::string& id);
const std::vector<std::string>& figure_ids();

/// Runs a figure and writes `<id>.csv` (plus `<id>_theory.csv` where the
/// analysis applies) under out_dir. Returns the written paths.
std::vector<std::filesystem::path> run_figure(const std::string& id, const FigureOptions& opts,
                                              const std::filesystem::path& out_dir);

/// Overhead sweeps behind fig9 and fig10.
std::vector<OverheadReport> overhead_figure(const std::string& id, const FigureOptions& opts);

}  // namespace wcl
