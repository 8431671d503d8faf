#include "wcl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "exact_sum.hpp"
#include "wcl/error.hpp"

namespace wcl {

void WclConfig::validate() const {
  if (const auto* q = std::get_if<BorderQuantilePmin>(&pmin); q && !(q->margin_sigmas >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "margin_sigmas must be >= 0");
  }
  if (!(participation_fraction > 0.0 && participation_fraction <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "participation fraction must lie in (0, 1]");
  }
  if (!(near_strongest_fraction >= 0.0 && near_strongest_fraction < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "near-strongest fraction must lie in [0, 1)");
  }
}

double compute_pmin(const ChannelParams& params, double radius, const WclConfig& cfg) {
  if (const auto* f = std::get_if<FixedPmin>(&cfg.pmin)) return f->dbm;
  const auto& q = std::get<BorderQuantilePmin>(cfg.pmin);
  return mean_received_power(params, radius) - q.margin_sigmas * params.sigma_s;
}

std::vector<NodeId> all_nodes(std::size_t n) {
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  return ids;
}

namespace {

void check_sizes(const Deployment& dep, const RssRealization& rss) {
  if (dep.size() != rss.size()) {
    throw Error(ErrorCode::invalid_argument, "deployment and RSS realization differ in size");
  }
}

void check_ids(std::span<const NodeId> ids, std::size_t n) {
  for (auto id : ids) {
    if (id >= n) throw Error(ErrorCode::invalid_argument, "node id out of range");
  }
}

}  // namespace

Estimate wcl_estimate(const Deployment& dep, const RssRealization& rss, double pmin,
                      std::span<const NodeId> candidates) {
  check_sizes(dep, rss);
  check_ids(candidates, dep.size());
  Estimate est;
  detail::ExactSum wsum, sx, sy;
  for (auto id : candidates) {
    const double w = rss.powers[id] - pmin;
    if (!(w > 0.0)) continue;
    est.participants.push_back(id);
    est.weights.push_back(w);
    wsum.add(w);
    sx.add(w * dep.measured_positions[id].x);
    sy.add(w * dep.measured_positions[id].y);
  }
  if (est.participants.empty()) throw Error(ErrorCode::no_node_above_pmin, "no node above P_min");
  est.position = {sx.value() / wsum.value(), sy.value() / wsum.value()};
  return est;
}

Estimate wcl_estimate(const Deployment& dep, const RssRealization& rss, double pmin) {
  const auto ids = all_nodes(dep.size());
  return wcl_estimate(dep, rss, pmin, ids);
}

namespace {

// Strongest first; equal powers keep the lower id first.
std::vector<NodeId> sorted_by_power(const RssRealization& rss, std::span<const NodeId> candidates) {
  std::vector<NodeId> ids(candidates.begin(), candidates.end());
  std::stable_sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
    if (rss.powers[a] != rss.powers[b]) return rss.powers[a] > rss.powers[b];
    return a < b;
  });
  return ids;
}

}  // namespace

std::vector<NodeId> select_participants(const RssRealization& rss, double fraction,
                                        std::span<const NodeId> candidates) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "participation fraction must lie in (0, 1]");
  }
  check_ids(candidates, rss.size());
  auto ids = sorted_by_power(rss, candidates);
  // 0.3 * 10 is 3.0000000000000004 in binary; keep ceil from rounding up.
  const double raw = fraction * static_cast<double>(ids.size());
  auto keep = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  keep = std::clamp<std::size_t>(keep, ids.empty() ? 0 : 1, ids.size());
  ids.resize(keep);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<NodeId> select_participants(const RssRealization& rss, double fraction) {
  const auto ids = all_nodes(rss.size());
  return select_participants(rss, fraction, ids);
}

std::vector<NodeId> select_near_strongest(const RssRealization& rss, double fraction,
                                          std::span<const NodeId> candidates) {
  check_ids(candidates, rss.size());
  if (candidates.empty()) return {};
  double best = -std::numeric_limits<double>::infinity();
  for (auto id : candidates) best = std::max(best, rss.powers[id]);
  // Linear-power ratio P_i / P_max >= 1 - fraction, evaluated in dB.
  const double floor_db = best + 10.0 * std::log10(1.0 - fraction);
  std::vector<NodeId> out;
  for (auto id : candidates) {
    if (rss.powers[id] >= floor_db) out.push_back(id);
  }
  return out;
}

Estimate centroid_estimate(const Deployment& dep, std::span<const NodeId> in_range) {
  if (in_range.empty()) throw Error(ErrorCode::empty_set, "centroid of an empty node set");
  check_ids(in_range, dep.size());
  Estimate est;
  detail::ExactSum sx, sy;
  for (auto id : in_range) {
    sx.add(dep.measured_positions[id].x);
    sy.add(dep.measured_positions[id].y);
    est.participants.push_back(id);
    est.weights.push_back(1.0);
  }
  const double n = static_cast<double>(in_range.size());
  est.position = {sx.value() / n, sy.value() / n};
  return est;
}

Estimate strongest_node_estimate(const Deployment& dep, const RssRealization& rss,
                                 std::span<const NodeId> candidates) {
  check_sizes(dep, rss);
  check_ids(candidates, dep.size());
  if (candidates.empty()) throw Error(ErrorCode::empty_set, "strongest node of an empty node set");
  NodeId best = candidates.front();
  for (auto id : candidates) {
    if (rss.powers[id] > rss.powers[best] || (rss.powers[id] == rss.powers[best] && id < best)) best = id;
  }
  return Estimate{dep.measured_positions[best], {best}, {1.0}};
}

Estimate strongest_node_estimate(const Deployment& dep, const RssRealization& rss) {
  const auto ids = all_nodes(dep.size());
  return strongest_node_estimate(dep, rss, ids);
}

Estimate lateration_estimate(const Deployment& dep, const RssRealization& rss, const ChannelParams& params,
                             std::span<const NodeId> candidates) {
  check_sizes(dep, rss);
  check_ids(candidates, dep.size());
  if (candidates.size() < 3) throw Error(ErrorCode::degenerate_geometry, "degenerate geometry");

  const auto m = static_cast<Eigen::Index>(candidates.size());
  std::vector<double> ranges(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    ranges[k] = params.d0 * std::pow(10.0, (params.p0 - rss.powers[candidates[k]]) / (10.0 * params.gamma));
  }
  // |L - Lk|^2 = rk^2 minus the anchor's equation gives
  // 2 (Lk - L1) . L = r1^2 - rk^2 + |Lk|^2 - |L1|^2.
  const Point2 a = dep.measured_positions[candidates[0]];
  Eigen::MatrixXd A(m - 1, 2);
  Eigen::VectorXd rhs(m - 1);
  for (Eigen::Index k = 1; k < m; ++k) {
    const Point2 p = dep.measured_positions[candidates[static_cast<std::size_t>(k)]];
    A(k - 1, 0) = 2.0 * (p.x - a.x);
    A(k - 1, 1) = 2.0 * (p.y - a.y);
    rhs(k - 1) = ranges[0] * ranges[0] - ranges[static_cast<std::size_t>(k)] * ranges[static_cast<std::size_t>(k)] +
                 dot(p, p) - dot(a, a);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() < 2 || !(sv(1) > 1e-10 * sv(0))) {
    throw Error(ErrorCode::degenerate_geometry, "degenerate geometry");
  }
  const Eigen::Vector2d sol = svd.solve(rhs);
  Estimate est;
  est.position = {sol(0), sol(1)};
  est.participants.assign(candidates.begin(), candidates.end());
  est.weights.assign(candidates.size(), 1.0);
  return est;
}

Estimate lateration_estimate(const Deployment& dep, const RssRealization& rss, const ChannelParams& params) {
  const auto ids = all_nodes(dep.size());
  return lateration_estimate(dep, rss, params, ids);
}

double localization_error(const Estimate& est, Point2 pu) { return distance(est.position, pu); }

const char* to_string(Method m) {
  switch (m) {
    case Method::cwcl: return "cwcl";
    case Method::dwcl: return "dwcl";
    case Method::centroid: return "centroid";
    case Method::sn: return "sn";
    case Method::lateration: return "lateration";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "cwcl" || name == "wcl") return Method::cwcl;
  if (name == "dwcl") return Method::dwcl;
  if (name == "centroid") return Method::centroid;
  if (name == "sn") return Method::sn;
  if (name == "lateration") return Method::lateration;
  throw Error(ErrorCode::config, "unknown estimator method '" + name + "'");
}

}  // namespace wcl
