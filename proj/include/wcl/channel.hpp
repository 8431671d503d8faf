#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wcl/placement.hpp"

namespace wcl {

enum class ShadowingMode { iid, correlated };

const char* to_string(ShadowingMode mode);

/// Log-distance path loss with log-normal shadowing.
struct ChannelParams {
  double p0 = 0.0;      // dBm at d0
  double d0 = 1.0;      // m
  double gamma = 3.8;   // path-loss exponent
  double sigma_s = 0.0; // dB
  double x_c = 0.0;     // m, correlation distance (correlated mode)
  ShadowingMode mode = ShadowingMode::iid;
  double doi = 0.0;     // degree of irregularity in [0, 1)
  double doi_correlation = 0.95;  // lag-one AR coefficient of r(theta), 1 degree steps

  void validate() const;
};

struct RssRealization {
  std::vector<double> powers;     // dBm
  std::vector<double> shadowing;  // dB
  bool regularized = false;       // covariance needed diagonal jitter

  std::size_t size() const { return powers.size(); }
};

/// P0 - 10 gamma log10(d / d0). Throws on d <= 0.
double mean_received_power(const ChannelParams& params, double distance);

/// sigma_s^2 exp(-|Li - Lj| / x_c).
Eigen::MatrixXd shadowing_covariance(std::span<const Point2> positions, double sigma_s, double x_c);

struct ShadowingDraw {
  std::vector<double> values;
  bool regularized = false;
};

/// Holds the covariance factor for a fixed set of positions so repeated
/// draws cost O(N^2) instead of O(N^3).
class ShadowingSampler {
 public:
  ShadowingSampler(const ChannelParams& params, std::span<const Point2> positions);

  ShadowingDraw sample(Rng& rng) const;
  bool regularized() const { return regularized_; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  double sigma_s_ = 0.0;
  bool correlated_ = false;
  bool regularized_ = false;
  Eigen::MatrixXd factor_;  // lower-triangular, factor * factor^T = covariance
};

ShadowingDraw sample_shadowing(const ChannelParams& params, std::span<const Point2> positions, Rng& rng);

/// Received powers at every node's true position for one shadowing draw.
RssRealization sample_rss(const ChannelParams& params, const Deployment& dep, Rng& rng);
RssRealization sample_rss(const ChannelParams& params, const Deployment& dep,
                          const ShadowingSampler& sampler, Rng& rng);

/// Deterministic part of sample_rss (no shadowing).
std::vector<double> mean_powers(const ChannelParams& params, const Deployment& dep);

/// Irregular coverage: the PU's range as a function of bearing.
struct CoverageMask {
  static constexpr std::size_t kAngularSamples = 360;

  std::vector<bool> covered;   // per node
  std::vector<double> radius;  // r(theta) at 1 degree steps

  double radius_at(double theta) const;  // nearest angular sample
  std::vector<NodeId> covered_ids() const;
};

/// r(theta) = R + zero-mean circular AR(1) process with marginal std R*doi and
/// lag-one correlation `ar_coefficient`, clamped at zero.
CoverageMask sample_coverage(double doi, double radius, const Deployment& dep, Rng& rng,
                             double ar_coefficient = 0.95);

void write_rss_csv(std::ostream& os, const RssRealization& rss);

}  // namespace wcl
