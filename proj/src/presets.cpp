#include <fstream>
#include <iostream>
#include <sstream>

#include "wcl/error.hpp"
#include "wcl/harness.hpp"

namespace wcl {

namespace {

constexpr std::size_t kDefaultTrials = 2000;

ExperimentConfig base(const std::string& id, const FigureOptions& opts) {
  ExperimentConfig c;
  c.scenario = id;
  c.trials = opts.trials.value_or(kDefaultTrials);
  c.seed = opts.seed;
  c.deployment.radius = 100.0;
  c.deployment.n = 100;
  c.channel.sigma_s = 4.0;
  return c;
}

void set_correlation(ExperimentConfig& c, double ratio) {
  c.x_c_over_d = ratio;
  c.channel.mode = ratio > 0.0 ? ShadowingMode::correlated : ShadowingMode::iid;
}

const std::vector<std::size_t> kGridNs{25, 49, 100, 196, 400};

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5",
                                            "fig6",  "fig7",  "fig8", "fig9", "fig10"};
  return ids;
}

bool is_overhead_figure(const std::string& id) { return id == "fig9" || id == "fig10"; }

std::vector<ExperimentConfig> figure_preset(const std::string& id, const FigureOptions& opts) {
  std::vector<ExperimentConfig> out;
  if (id == "fig1a") {
    for (double s : {2.5, 5.0, 7.5, 10.0}) {
      for (std::size_t n : kGridNs) {
        auto c = base(id, opts);
        c.channel.sigma_s = s;
        c.deployment.n = n;
        out.push_back(c);
      }
    }
  } else if (id == "fig1b") {
    for (double r : {1.0, 2.0, 5.0, 10.0}) {
      for (std::size_t n : kGridNs) {
        auto c = base(id, opts);
        c.deployment.n = n;
        set_correlation(c, r);
        out.push_back(c);
      }
    }
  } else if (id == "fig2") {
    for (double sl : {0.0, 1.0, 3.0, 5.0, 7.0}) {
      for (std::size_t n : {49, 100, 196}) {
        auto c = base(id, opts);
        c.channel.sigma_s = 5.0;
        c.deployment.sigma_l = sl;
        c.deployment.n = n;
        out.push_back(c);
      }
    }
  } else if (id == "fig3") {
    for (auto kind : {PlacementKind::random_grid, PlacementKind::uniform_disk}) {
      for (double r : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        auto c = base(id, opts);
        c.deployment.kind = kind;
        set_correlation(c, r);
        out.push_back(c);
      }
    }
  } else if (id == "fig4") {
    for (double doi : {0.0, 0.1, 0.2, 0.3, 0.4}) {
      auto c = base(id, opts);
      c.deployment.kind = PlacementKind::uniform_disk;
      c.channel.doi = doi;
      out.push_back(c);
    }
  } else if (id == "fig5") {
    for (auto kind : {PlacementKind::fixed_grid, PlacementKind::random_grid, PlacementKind::uniform_disk}) {
      for (double s : {2.5, 5.0, 7.5, 10.0}) {
        auto c = base(id, opts);
        c.deployment.kind = kind;
        c.channel.sigma_s = s;
        out.push_back(c);
      }
    }
  } else if (id == "fig6") {
    for (double r : {0.0, 1.0, 2.0, 5.0}) {
      for (double p : {0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0}) {
        auto c = base(id, opts);
        c.deployment.kind = PlacementKind::uniform_disk;
        c.estimator.wcl.participation_fraction = p;
        set_correlation(c, r);
        out.push_back(c);
      }
    }
  } else if (id == "fig7") {
    for (auto m : {Method::cwcl, Method::centroid, Method::sn, Method::lateration}) {
      for (double s : {1.0, 2.0, 4.0, 6.0, 8.0, 10.0}) {
        auto c = base(id, opts);
        c.deployment.kind = PlacementKind::uniform_disk;
        c.channel.sigma_s = s;
        c.estimator.method = m;
        out.push_back(c);
      }
    }
  } else if (id == "fig8") {
    for (auto m : {Method::cwcl, Method::dwcl, Method::sn}) {
      for (double s : {2.0, 4.0, 6.0}) {
        auto c = base(id, opts);
        c.deployment.kind = PlacementKind::uniform_square;
        c.deployment.square_area = true;
        c.deployment.radius = 1000.0;
        c.deployment.n = 1000;
        c.deployment.pu_uniform = true;
        c.channel.sigma_s = s;
        c.estimator.method = m;
        c.estimator.cluster_radius = 200.0;
        // Centralized WCL over the neighborhood a cluster can hear: the floor
        // is the mean power at 200 m with no extra margin, otherwise far
        // nodes outside that neighborhood leak in.
        c.estimator.pmin_radius = 200.0;
        c.estimator.wcl.pmin = BorderQuantilePmin{0.0};
        out.push_back(c);
      }
    }
  } else if (is_overhead_figure(id)) {
    throw Error(ErrorCode::config, id + " is an overhead figure; use overhead_figure");
  } else {
    throw Error(ErrorCode::config, "unknown figure id '" + id + "'");
  }
  return out;
}

std::vector<OverheadReport> overhead_figure(const std::string& id, const FigureOptions& opts) {
  std::vector<OverheadReport> out;
  auto cfg_for = [&](std::size_t n, std::size_t clusters, std::size_t trials) {
    ExperimentConfig c = base(id, opts);
    c.deployment.n = n;
    c.overhead.clusters = clusters;
    c.trials = trials;
    c.scenario = id + "_N" + std::to_string(n) + "_L" + std::to_string(clusters);
    return c;
  };
  if (id == "fig9") {
    for (std::size_t n : {100, 196, 400}) {
      const auto cmp = run_overhead(cfg_for(n, 16, std::min<std::size_t>(opts.trials.value_or(1000), 1000)));
      for (const auto* r : {&cmp.cwcl_analytic, &cmp.cwcl_ledger, &cmp.dwcl_analytic, &cmp.dwcl_ledger}) {
        out.push_back(*r);
      }
    }
  } else if (id == "fig10") {
    for (std::size_t n : {100, 400}) {
      for (std::size_t l : {4, 9, 16, 25}) {
        try {
          const auto cmp = run_overhead(cfg_for(n, l, std::min<std::size_t>(opts.trials.value_or(200), 200)));
          out.push_back(cmp.cwcl_analytic);
          out.push_back(cmp.dwcl_analytic);
        } catch (const Error& ex) {
          std::cerr << "wcl: " << id << ": skipping N=" << n << " L=" << l << ": " << ex.what() << '\n';
        }
      }
    }
  } else {
    throw Error(ErrorCode::config, "unknown overhead figure '" + id + "'");
  }
  return out;
}

std::vector<std::filesystem::path> run_figure(const std::string& id, const FigureOptions& opts,
                                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::string& name) {
    const auto path = out_dir / name;
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::config, "cannot write " + path.string());
    written.push_back(path);
    return os;
  };

  if (is_overhead_figure(id)) {
    const auto reports = overhead_figure(id, opts);
    auto os = open(id + ".csv");
    write_overhead_csv_header(os);
    for (const auto& r : reports) write_overhead_csv_row(os, r);
    return written;
  }

  const auto configs = figure_preset(id, opts);
  std::vector<ResultRow> rows;
  std::vector<ResultRow> theory;
  for (const auto& c : configs) {
    rows.push_back(run_experiment(c));
    const bool analyzable = c.estimator.method == Method::cwcl && c.estimator.wcl.participation_fraction == 1.0 &&
                            c.channel.doi == 0.0 && !c.deployment.square_area;
    if (analyzable) theory.push_back(run_theory(c));
  }
  {
    auto os = open(id + ".csv");
    write_result_csv(os, rows);
  }
  if (!theory.empty()) {
    auto os = open(id + "_theory.csv");
    write_result_csv(os, theory);
  }
  return written;
}

}  // namespace wcl
