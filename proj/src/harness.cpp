#include "wcl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wcl/error.hpp"

namespace wcl {

void ExperimentConfig::validate() const {
  if (trials < 1) throw Error(ErrorCode::config, "trials must be >= 1");
  if (deployment.n < 1) throw Error(ErrorCode::config, "deployment.n must be >= 1");
  if (!(deployment.radius > 0.0)) throw Error(ErrorCode::config, "deployment radius must be positive");
  if (!(deployment.sigma_l >= 0.0)) throw Error(ErrorCode::config, "sigma_l must be >= 0");
  if (x_c_over_d && !(*x_c_over_d >= 0.0)) throw Error(ErrorCode::config, "x_c_over_d must be >= 0");
  resolved_channel().validate();
  estimator.wcl.validate();
  if (!(estimator.cluster_radius > 0.0)) throw Error(ErrorCode::config, "cluster_radius must be positive");
}

double ExperimentConfig::nominal_spacing() const { return average_node_spacing(deployment.area(), deployment.n); }

ChannelParams ExperimentConfig::resolved_channel() const {
  ChannelParams ch = channel;
  if (x_c_over_d) {
    if (*x_c_over_d == 0.0) {
      ch.mode = ShadowingMode::iid;
      ch.x_c = 0.0;
    } else {
      ch.mode = ShadowingMode::correlated;
      ch.x_c = *x_c_over_d * nominal_spacing();
    }
  }
  return ch;
}

double ExperimentConfig::x_c_ratio() const {
  if (x_c_over_d) return *x_c_over_d;
  return channel.mode == ShadowingMode::correlated ? channel.x_c / nominal_spacing() : 0.0;
}

double ResultRow::standard_error() const {
  return trials > 1 ? std_err / std::sqrt(static_cast<double>(trials)) : 0.0;
}

void write_result_csv_header(std::ostream& os) {
  os << "scenario,method,N,sigma_s,x_c_over_D,sigma_l,doi,participation,mean_err_m,mean_err_over_D,std_err,trials\n";
}

void write_result_csv_row(std::ostream& os, const ResultRow& r) {
  const auto old_precision = os.precision(10);
  os << r.scenario << ',' << r.method << ',' << r.n << ',' << r.sigma_s << ',' << r.x_c_over_d << ',' << r.sigma_l
     << ',' << r.doi << ',' << r.participation << ',' << r.mean_err_m << ',' << r.mean_err_over_d << ','
     << r.std_err << ',' << r.trials << '\n';
  os.precision(old_precision);
}

void write_result_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  write_result_csv_header(os);
  for (const auto& r : rows) write_result_csv_row(os, r);
}

namespace {

// Welford running mean and variance.
struct Running {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double stddev() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

// Everything a single trial needs to form an estimate.
struct TrialInput {
  std::size_t index = 0;
  const Deployment* dep = nullptr;
  const RssRealization* rss = nullptr;
  const std::vector<NodeId>* candidates = nullptr;
  double pmin = 0.0;
  ChannelParams channel;
};

DeploymentSpec simulated_spec(const ExperimentConfig& cfg) {
  DeploymentSpec spec = cfg.deployment;
  const double doi = cfg.channel.doi;
  if (doi > 0.0) {
    // Irregular coverage can reach past R; keep the density and widen the field.
    const double scale = 1.0 + 3.0 * doi;
    spec.radius *= scale;
    spec.n = static_cast<std::size_t>(std::llround(static_cast<double>(spec.n) * scale * scale));
  }
  return spec;
}

struct LoopResult {
  Running err;
  std::size_t skipped = 0;
  std::size_t nodes = 0;
  double spacing = 0.0;
};

LoopResult trial_loop(const ExperimentConfig& cfg, const std::function<Estimate(const TrialInput&)>& estimate,
                      TrialLog* log) {
  cfg.validate();
  const ChannelParams channel = cfg.resolved_channel();
  const DeploymentSpec spec = simulated_spec(cfg);
  const bool fixed_layout = spec.kind == PlacementKind::fixed_grid && !spec.pu_uniform;
  const double pmin_radius = cfg.estimator.pmin_radius.value_or(cfg.deployment.radius);
  const double pmin = compute_pmin(channel, pmin_radius, cfg.estimator.wcl);

  const Rng root(cfg.seed);
  std::optional<Deployment> base;
  std::optional<ShadowingSampler> sampler;
  if (fixed_layout) {
    DeploymentSpec clean = spec;
    clean.sigma_l = 0.0;
    Rng r0 = root.derive(0);
    base = make_deployment(clean, r0);
    sampler.emplace(channel, base->true_positions);
  }

  LoopResult out;
  std::string first_failure;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng tr = root.derive(t + 1);
    Deployment dep;
    if (base) {
      Rng noise = tr.derive(2);
      dep = apply_position_noise(*base, spec.sigma_l, noise);
    } else {
      dep = make_deployment(spec, tr);
    }
    if (t == 0) {
      if (channel.doi > 0.0) {
        out.nodes = cfg.deployment.n;
        out.spacing = cfg.nominal_spacing();
      } else {
        out.nodes = dep.size();
        out.spacing = average_node_spacing(dep);
      }
    }
    try {
      Rng shadow = tr.derive(4);
      const RssRealization rss = sampler ? sample_rss(channel, dep, *sampler, shadow) : sample_rss(channel, dep, shadow);
      std::vector<NodeId> candidates;
      if (channel.doi > 0.0) {
        Rng cov = tr.derive(5);
        candidates = sample_coverage(channel.doi, cfg.deployment.radius, dep, cov, channel.doi_correlation).covered_ids();
      } else {
        candidates = all_nodes(dep.size());
      }
      TrialInput in{t, &dep, &rss, &candidates, pmin, channel};
      const Estimate est = estimate(in);
      const double e = localization_error(est, dep.pu);
      out.err.add(e);
      if (log) {
        log->errors.push_back(e);
        log->estimates.push_back(est.position);
        log->pus.push_back(dep.pu);
      }
    } catch (const Error& ex) {
      ++out.skipped;
      std::ostringstream msg;
      msg << cfg.scenario << " trial " << t << ": " << ex.what();
      if (first_failure.empty()) first_failure = msg.str();
      if (log) log->failures.push_back(msg.str());
    }
  }
  if (out.skipped * 100 > cfg.trials) {
    std::ostringstream msg;
    msg << cfg.scenario << ": " << out.skipped << " of " << cfg.trials
        << " trials failed, above the 1% budget (first: " << first_failure << ")";
    throw Error(ErrorCode::config, msg.str());
  }
  if (out.skipped > 0) {
    std::cerr << "wcl: " << cfg.scenario << ": skipped " << out.skipped << " of " << cfg.trials
              << " trials (first: " << first_failure << ")\n";
  }
  return out;
}

Estimate estimate_for(const ExperimentConfig& cfg, const TrialInput& in) {
  const auto& dep = *in.dep;
  const auto& rss = *in.rss;
  const auto& cand = *in.candidates;
  const WclConfig& w = cfg.estimator.wcl;
  switch (cfg.estimator.method) {
    case Method::cwcl: {
      const bool filtered = w.rule == ParticipationRule::near_strongest || w.participation_fraction < 1.0;
      if (!filtered) return wcl_estimate(dep, rss, in.pmin, cand);
      const auto ids = w.rule == ParticipationRule::near_strongest
                           ? select_near_strongest(rss, w.near_strongest_fraction, cand)
                           : select_participants(rss, w.participation_fraction, cand);
      if (!w.refloor_selected) return wcl_estimate(dep, rss, in.pmin, ids);
      // A lone survivor has nothing to weigh against.
      if (ids.size() == 1) return strongest_node_estimate(dep, rss, ids);
      double floor = std::numeric_limits<double>::infinity();
      for (NodeId i : ids) floor = std::min(floor, rss.powers[i]);
      return wcl_estimate(dep, rss, floor, ids);
    }
    case Method::centroid: {
      std::vector<NodeId> in_range;
      for (NodeId i : cand) {
        if (rss.powers[i] > in.pmin) in_range.push_back(i);
      }
      return centroid_estimate(dep, in_range);
    }
    case Method::sn:
      return strongest_node_estimate(dep, rss, cand);
    case Method::lateration:
      return lateration_estimate(dep, rss, in.channel, cand);
    case Method::dwcl: {
      DwclConfig dc;
      dc.cluster_radius = cfg.estimator.cluster_radius;
      dc.active_threshold_dbm = cfg.estimator.active_threshold_dbm;
      dc.options.aggregate = cfg.estimator.aggregate;
      return run_dwcl(dep, rss, dc).estimate;
    }
  }
  throw Error(ErrorCode::config, "unknown method");
}

ResultRow base_row(const ExperimentConfig& cfg) {
  ResultRow row;
  row.scenario = cfg.scenario;
  row.method = to_string(cfg.estimator.method);
  row.sigma_s = cfg.channel.sigma_s;
  row.x_c_over_d = cfg.x_c_ratio();
  row.sigma_l = cfg.deployment.sigma_l;
  row.doi = cfg.channel.doi;
  row.participation = cfg.estimator.wcl.participation_fraction;
  return row;
}

void fill_row(ResultRow& row, const LoopResult& lr) {
  row.n = lr.nodes;
  row.spacing = lr.spacing;
  row.trials = lr.err.n;
  row.skipped = lr.skipped;
  row.mean_err_m = lr.err.mean;
  row.mean_err_over_d = lr.err.mean / lr.spacing;
  row.std_err = lr.err.stddev();
}

}  // namespace

ResultRow run_experiment(const ExperimentConfig& cfg, TrialLog* log) {
  const LoopResult lr = trial_loop(cfg, [&](const TrialInput& in) { return estimate_for(cfg, in); }, log);
  ResultRow row = base_row(cfg);
  fill_row(row, lr);
  return row;
}

ResultRow run_theory(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.estimator.method != Method::cwcl || cfg.estimator.wcl.participation_fraction != 1.0 ||
      cfg.estimator.wcl.rule != ParticipationRule::top_fraction || cfg.channel.doi != 0.0) {
    throw Error(ErrorCode::config,
                cfg.scenario + ": the analysis covers CWCL with every node participating and regular coverage");
  }
  TheoryScenario sc;
  sc.deployment = cfg.deployment;
  sc.channel = cfg.resolved_channel();
  sc.wcl = cfg.estimator.wcl;
  sc.method = cfg.theory.method;
  Rng rng(cfg.seed);
  PlacementAverage avg;
  try {
    avg = average_over_placements(sc, cfg.theory.placements, rng);
  } catch (const Error& ex) {
    throw Error(ex.code(), cfg.scenario + ": " + ex.what());
  }
  ResultRow row = base_row(cfg);
  row.method = std::string("theory_") + to_string(cfg.theory.method);
  row.n = avg.nodes;
  row.spacing = avg.spacing;
  row.mean_err_m = avg.mean_err;
  row.mean_err_over_d = avg.mean_err_over_d;
  row.std_err = avg.std_err;
  row.trials = avg.placements;
  return row;
}

DwclRunSummary run_dwcl_experiment(const ExperimentConfig& cfg, std::ostream* ledger_csv, std::ostream* result_csv) {
  ExperimentConfig c = cfg;
  c.estimator.method = Method::dwcl;
  DwclRunSummary sum;
  Running eta, msgs;
  Running m_acc, l_acc, k_acc;
  if (ledger_csv) write_ledger_csv_header(*ledger_csv);
  if (result_csv) write_dwcl_csv_header(*result_csv);
  const LoopResult lr = trial_loop(
      c,
      [&](const TrialInput& in) {
        DwclConfig dc;
        dc.cluster_radius = c.estimator.cluster_radius;
        dc.active_threshold_dbm = c.estimator.active_threshold_dbm;
        dc.options.aggregate = c.estimator.aggregate;
        ClusterSet set = build_hex_clusters(*in.dep, dc.cluster_radius);
        DwclResult res = run_dwcl(set, *in.dep, *in.rss, dc);
        const ClusterCounts cc = cluster_counts(set);
        m_acc.add(cc.m);
        l_acc.add(static_cast<double>(cc.l));
        k_acc.add(cc.k);
        if (res.selection.fallback) ++sum.fallbacks;
        eta.add(cc.l > 0 ? static_cast<double>(res.selection.full_checks) / static_cast<double>(cc.l) : 0.0);
        msgs.add(static_cast<double>(res.ledger.size()));
        if (ledger_csv) write_ledger_csv(*ledger_csv, in.index, res.ledger);
        if (result_csv) write_dwcl_csv_row(*result_csv, in.index, res, in.dep->pu);
        return res.estimate;
      },
      nullptr);
  sum.row = base_row(c);
  fill_row(sum.row, lr);
  sum.mean_eta = eta.mean;
  sum.mean_messages = msgs.mean;
  sum.counts.m = m_acc.mean;
  sum.counts.l = static_cast<std::size_t>(std::llround(l_acc.mean));
  sum.counts.k = k_acc.mean;
  return sum;
}

OverheadComparison run_overhead(const ExperimentConfig& cfg) {
  cfg.validate();
  const ChannelParams channel = cfg.resolved_channel();
  PowerModel model;
  model.p_r_min_dbm = cfg.overhead.p_r_min_dbm;
  model.gamma = channel.gamma;
  model.d0 = channel.d0;
  model.sigma_s = channel.sigma_s;
  model.validate();

  const Rng root(cfg.seed);
  Rng r0 = root.derive(0);
  const Deployment first = make_deployment(cfg.deployment, r0);
  const std::size_t n = first.size();

  OverheadComparison out;
  if (cfg.overhead.clusters) {
    const auto r = cluster_radius_for_count(first, *cfg.overhead.clusters, cfg.deployment.radius);
    if (!r) {
      throw Error(ErrorCode::config, cfg.scenario + ": no cluster radius yields " +
                                         std::to_string(*cfg.overhead.clusters) + " nonempty clusters");
    }
    out.cluster_radius = *r;
  } else {
    out.cluster_radius = cfg.estimator.cluster_radius;
  }

  const bool fixed_layout = cfg.deployment.kind == PlacementKind::fixed_grid && !cfg.deployment.pu_uniform &&
                            cfg.deployment.sigma_l == 0.0;
  Running cwcl_power, dwcl_power, eta, msgs;
  Running m_acc, l_acc, k_acc;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng tr = root.derive(t + 1);
    const Deployment dep = fixed_layout ? first : make_deployment(cfg.deployment, tr);
    Rng shadow = tr.derive(4);
    const RssRealization rss = sample_rss(channel, dep, shadow);
    ClusterSet set = build_hex_clusters(dep, out.cluster_radius);
    DwclConfig dc;
    dc.cluster_radius = out.cluster_radius;
    dc.active_threshold_dbm = cfg.estimator.active_threshold_dbm;
    dc.options.aggregate = cfg.estimator.aggregate;
    const DwclResult res = run_dwcl(set, dep, rss, dc);
    const ClusterCounts cc = cluster_counts(set);
    m_acc.add(cc.m);
    l_acc.add(static_cast<double>(cc.l));
    k_acc.add(cc.k);
    eta.add(cc.l > 0 ? static_cast<double>(res.selection.full_checks) / static_cast<double>(cc.l) : 0.0);
    msgs.add(static_cast<double>(res.ledger.size()));
    Rng link = tr.derive(6);
    dwcl_power.add(ledger_power(model, res.ledger, link));
    Rng link_c = tr.derive(7);
    cwcl_power.add(cwcl_ledger_power(model, dep, link_c));
  }
  out.counts.m = m_acc.mean;
  out.counts.l = static_cast<std::size_t>(std::llround(l_acc.mean));
  out.counts.k = k_acc.mean;
  out.eta = cfg.overhead.eta.value_or(eta.mean);

  // The closed form assumes a disk; a square is replaced by the disk of equal area.
  double radius = cfg.deployment.radius;
  if (cfg.deployment.square_area) radius = 2.0 * cfg.deployment.radius / std::sqrt(std::numbers::pi);
  const double nd = static_cast<double>(n);
  const double l = l_acc.mean;
  const double m = nd / l;
  const double k = out.counts.k;

  auto report = [&](const std::string& method, double msg, double total, double ops) {
    OverheadReport r;
    r.scenario = cfg.scenario;
    r.method = method;
    r.clusters = method.rfind("dwcl", 0) == 0 ? out.counts.l : 1;
    r.msg_count = msg;
    r.total_power_mw = total;
    r.per_node_power_mw = total / nd;
    r.ops = ops;
    return r;
  };
  const auto [alg1, alg2] = dwcl_message_count(m, l, k, out.eta);
  out.cwcl_analytic = report("cwcl", nd, cwcl_expected_power(model, radius, n), cwcl_ops(n));
  out.cwcl_ledger = report("cwcl_ledger", nd, cwcl_power.mean, cwcl_ops(n));
  out.dwcl_analytic = report("dwcl", alg1 + alg2,
                             dwcl_expected_power(model, out.cluster_radius, n, l, k, out.eta),
                             dwcl_ops(nd, m, l, k, out.eta));
  out.dwcl_ledger = report("dwcl_ledger", msgs.mean, dwcl_power.mean, dwcl_ops(nd, m, l, k, out.eta));
  return out;
}

}  // namespace wcl
