#include "wcl/channel.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "wcl/error.hpp"

namespace wcl {

const char* to_string(ShadowingMode mode) { return mode == ShadowingMode::iid ? "iid" : "correlated"; }

void ChannelParams::validate() const {
  if (!(d0 > 0.0)) throw Error(ErrorCode::invalid_argument, "d0 must be positive");
  if (!(gamma > 0.0)) throw Error(ErrorCode::invalid_argument, "gamma must be positive");
  if (!(sigma_s >= 0.0)) throw Error(ErrorCode::invalid_argument, "sigma_s must be >= 0");
  if (mode == ShadowingMode::correlated && !(x_c > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "x_c must be positive for correlated shadowing");
  }
  if (!(doi >= 0.0 && doi < 1.0)) throw Error(ErrorCode::invalid_argument, "doi must lie in [0, 1)");
  if (!(doi_correlation >= 0.0 && doi_correlation < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "doi_correlation must lie in [0, 1)");
  }
}

double mean_received_power(const ChannelParams& params, double distance) {
  if (!(distance > 0.0)) {
    throw Error(ErrorCode::zero_distance, "undefined path loss at zero distance");
  }
  return params.p0 - 10.0 * params.gamma * std::log10(distance / params.d0);
}

Eigen::MatrixXd shadowing_covariance(std::span<const Point2> positions, double sigma_s, double x_c) {
  if (!(x_c > 0.0)) throw Error(ErrorCode::invalid_argument, "x_c must be positive");
  const auto n = static_cast<Eigen::Index>(positions.size());
  const double var = sigma_s * sigma_s;
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cov(i, i) = var;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double c = var * std::exp(-distance(positions[i], positions[j]) / x_c);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  return cov;
}

ShadowingSampler::ShadowingSampler(const ChannelParams& params, std::span<const Point2> positions)
    : n_(positions.size()), sigma_s_(params.sigma_s),
      correlated_(params.mode == ShadowingMode::correlated && params.sigma_s > 0.0) {
  params.validate();
  if (!correlated_) return;
  Eigen::MatrixXd cov = shadowing_covariance(positions, params.sigma_s, params.x_c);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-9 * params.sigma_s * params.sigma_s;
    llt.compute(cov);
    regularized_ = true;
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::not_psd, "shadowing covariance not factorizable after regularization");
    }
  }
  factor_ = llt.matrixL();
}

ShadowingDraw ShadowingSampler::sample(Rng& rng) const {
  ShadowingDraw out;
  out.values.assign(n_, 0.0);
  out.regularized = regularized_;
  if (sigma_s_ == 0.0) return out;
  if (!correlated_) {
    for (auto& v : out.values) v = rng.normal(0.0, sigma_s_);
    return out;
  }
  Eigen::VectorXd z(static_cast<Eigen::Index>(n_));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  const Eigen::VectorXd s = factor_.triangularView<Eigen::Lower>() * z;
  for (std::size_t i = 0; i < n_; ++i) out.values[i] = s(static_cast<Eigen::Index>(i));
  return out;
}

ShadowingDraw sample_shadowing(const ChannelParams& params, std::span<const Point2> positions, Rng& rng) {
  return ShadowingSampler(params, positions).sample(rng);
}

std::vector<double> mean_powers(const ChannelParams& params, const Deployment& dep) {
  std::vector<double> out(dep.size());
  for (std::size_t i = 0; i < dep.size(); ++i) {
    out[i] = mean_received_power(params, distance(dep.true_positions[i], dep.pu));
  }
  return out;
}

RssRealization sample_rss(const ChannelParams& params, const Deployment& dep,
                          const ShadowingSampler& sampler, Rng& rng) {
  if (sampler.size() != dep.size()) {
    throw Error(ErrorCode::invalid_argument, "shadowing sampler does not match deployment size");
  }
  RssRealization rss;
  rss.powers = mean_powers(params, dep);
  auto draw = sampler.sample(rng);
  rss.shadowing = std::move(draw.values);
  rss.regularized = draw.regularized;
  for (std::size_t i = 0; i < rss.size(); ++i) rss.powers[i] += rss.shadowing[i];
  return rss;
}

RssRealization sample_rss(const ChannelParams& params, const Deployment& dep, Rng& rng) {
  // Path loss first so a co-located PU fails before any factorization work.
  (void)mean_powers(params, dep);
  return sample_rss(params, dep, ShadowingSampler(params, dep.true_positions), rng);
}

double CoverageMask::radius_at(double theta) const {
  const double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  const auto n = radius.size();
  auto idx = static_cast<std::size_t>(std::lround(t / two_pi * static_cast<double>(n)));
  return radius[idx % n];
}

std::vector<NodeId> CoverageMask::covered_ids() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (covered[i]) out.push_back(i);
  }
  return out;
}

CoverageMask sample_coverage(double doi, double radius, const Deployment& dep, Rng& rng,
                             double ar_coefficient) {
  if (!(doi >= 0.0 && doi < 1.0)) throw Error(ErrorCode::invalid_argument, "doi must lie in [0, 1)");
  if (!(ar_coefficient >= 0.0 && ar_coefficient < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "AR coefficient must lie in [0, 1)");
  }
  constexpr std::size_t n = CoverageMask::kAngularSamples;
  CoverageMask mask;
  mask.radius.assign(n, radius);

  if (doi > 0.0) {
    // Circular AR(1): x_t = phi x_{t-1} + e_t with x_{-1} = x_{n-1}. Its
    // covariance is circulant, so lag one is identical across the seam.
    const double phi = ar_coefficient;
    const double phi_n = std::pow(phi, static_cast<double>(n));
    std::vector<double> e(n);
    for (auto& v : e) v = rng.normal();
    double x0 = 0.0;
    double w = 1.0;
    for (std::size_t m = 0; m < n; ++m) {
      x0 += w * e[(n - m) % n];
      w *= phi;
    }
    x0 /= 1.0 - phi_n;
    std::vector<double> x(n);
    x[0] = x0;
    for (std::size_t t = 1; t < n; ++t) x[t] = phi * x[t - 1] + e[t];
    // Var(x_t) = (1 + phi^n) / ((1 - phi^2)(1 - phi^n)) for unit innovations.
    const double var = (1.0 + phi_n) / ((1.0 - phi * phi) * (1.0 - phi_n));
    const double scale = radius * doi / std::sqrt(var);
    for (std::size_t t = 0; t < n; ++t) mask.radius[t] = std::max(0.0, radius + scale * x[t]);
  }

  mask.covered.resize(dep.size());
  for (std::size_t i = 0; i < dep.size(); ++i) {
    const Point2 rel = dep.true_positions[i] - dep.pu;
    const double theta = std::atan2(rel.y, rel.x);
    mask.covered[i] = norm(rel) <= mask.radius_at(theta);
  }
  return mask;
}

void write_rss_csv(std::ostream& os, const RssRealization& rss) {
  const auto old_precision = os.precision(12);
  os << "id,power_dbm,shadow_db\n";
  for (std::size_t i = 0; i < rss.size(); ++i) {
    os << i << ',' << rss.powers[i] << ',' << rss.shadowing[i] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace wcl
