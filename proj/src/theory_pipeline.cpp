#include <cmath>
#include <ostream>

#include "wcl/error.hpp"
#include "wcl/theory.hpp"

namespace wcl {

PlacementAnalysis analyze_placement(const Deployment& dep, const ChannelParams& params, double pmin,
                                    RatioMethod method) {
  PlacementAnalysis a;
  a.pmin = pmin;
  a.spacing = average_node_spacing(dep);
  a.x = axis_error_stats(params, dep, pmin, Axis::x, method);
  a.y = axis_error_stats(params, dep, pmin, Axis::y, method);
  a.cross = cross_axis_correlation(dep, params, pmin, dep.sigma_l, method);
  a.cov = decorrelate(a.x, a.y, a.cross.rho_xy);
  a.pdf = error_norm_distribution(a.cov);
  return a;
}

PlacementAverage average_over_placements(const TheoryScenario& scenario, std::size_t n_placements, Rng& rng) {
  scenario.channel.validate();
  scenario.wcl.validate();
  // The analysis is already an expectation over shadowing and position
  // noise, so only the layout itself needs sampling.
  const DeploymentSpec& spec = scenario.deployment;
  const bool random_layout = spec.kind != PlacementKind::fixed_grid || spec.pu_uniform;
  const std::size_t count = random_layout ? std::max<std::size_t>(n_placements, 1) : 1;
  const double pmin = compute_pmin(scenario.channel, spec.radius, scenario.wcl);

  PlacementAverage avg;
  double sum = 0.0, sum_sq = 0.0, sum_std = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    Rng child = rng.derive(i);
    const Deployment dep = make_deployment(spec, child);
    const PlacementAnalysis a = analyze_placement(dep, scenario.channel, pmin, scenario.method);
    sum += a.pdf.mean;
    sum_sq += a.pdf.mean * a.pdf.mean;
    sum_std += a.pdf.std;
    avg.nodes = dep.size();
    avg.spacing = a.spacing;
  }
  const double n = static_cast<double>(count);
  avg.placements = count;
  avg.mean_err = sum / n;
  avg.std_err = sum_std / n;
  avg.mean_err_over_d = avg.mean_err / avg.spacing;
  if (count > 1) {
    const double var = std::max(sum_sq / n - avg.mean_err * avg.mean_err, 0.0) * n / (n - 1.0);
    avg.standard_error = std::sqrt(var / n);
  }
  return avg;
}

void write_theory_csv_header(std::ostream& os) {
  os << "scenario,N,sigma_s,x_c,sigma_l,mean_err_m,mean_err_over_D,std_err_m,method\n";
}

void write_theory_csv_row(std::ostream& os, const std::string& scenario, const TheoryScenario& sc,
                          const PlacementAverage& avg) {
  const double x_c = sc.channel.mode == ShadowingMode::correlated ? sc.channel.x_c : 0.0;
  os << scenario << ',' << avg.nodes << ',' << sc.channel.sigma_s << ',' << x_c << ',' << sc.deployment.sigma_l
     << ',' << avg.mean_err << ',' << avg.mean_err_over_d << ',' << avg.std_err << ',' << to_string(sc.method)
     << '\n';
}

}  // namespace wcl
