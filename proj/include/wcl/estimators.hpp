#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wcl/channel.hpp"
#include "wcl/placement.hpp"

namespace wcl {

struct FixedPmin {
  double dbm = -90.0;
};

/// Mean border power minus `margin_sigmas` shadowing deviations; 2.33 leaves
/// about 1% of border draws below the floor.
struct BorderQuantilePmin {
  double margin_sigmas = 2.33;
};

using PminPolicy = std::variant<FixedPmin, BorderQuantilePmin>;

enum class ParticipationRule {
  top_fraction,           // ceil(fraction * N) strongest nodes
  near_strongest,         // linear power within `near_strongest_fraction` of the strongest
};

struct WclConfig {
  PminPolicy pmin = BorderQuantilePmin{};
  double participation_fraction = 1.0;
  ParticipationRule rule = ParticipationRule::top_fraction;
  double near_strongest_fraction = 0.15;
  // With a participation filter active, measure weights from the weakest
  // selected node instead of pmin.
  bool refloor_selected = true;

  void validate() const;
};

struct Estimate {
  Point2 position;
  std::vector<NodeId> participants;
  std::vector<double> weights;  // aligned with participants
};

double compute_pmin(const ChannelParams& params, double radius, const WclConfig& cfg);

/// Weighted centroid of measured positions with weights max(P_i - pmin, 0).
/// Zero-weight nodes are dropped from the participant list.
Estimate wcl_estimate(const Deployment& dep, const RssRealization& rss, double pmin);
Estimate wcl_estimate(const Deployment& dep, const RssRealization& rss, double pmin,
                      std::span<const NodeId> candidates);

std::vector<NodeId> select_participants(const RssRealization& rss, double fraction);
std::vector<NodeId> select_participants(const RssRealization& rss, double fraction,
                                        std::span<const NodeId> candidates);
std::vector<NodeId> select_near_strongest(const RssRealization& rss, double fraction,
                                          std::span<const NodeId> candidates);

Estimate centroid_estimate(const Deployment& dep, std::span<const NodeId> in_range);

Estimate strongest_node_estimate(const Deployment& dep, const RssRealization& rss);
Estimate strongest_node_estimate(const Deployment& dep, const RssRealization& rss,
                                 std::span<const NodeId> candidates);

/// Linearized least squares on path-loss-inverted ranges, anchored at the
/// first candidate.
Estimate lateration_estimate(const Deployment& dep, const RssRealization& rss, const ChannelParams& params);
Estimate lateration_estimate(const Deployment& dep, const RssRealization& rss, const ChannelParams& params,
                             std::span<const NodeId> candidates);

double localization_error(const Estimate& est, Point2 pu);

std::vector<NodeId> all_nodes(std::size_t n);

enum class Method { cwcl, dwcl, centroid, sn, lateration };
const char* to_string(Method m);
Method method_from_string(const std::string& name);

}  // namespace wcl
