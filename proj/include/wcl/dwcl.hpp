#pragma once

// Distributed WCL over a hexagonal clustering of the sensor field.
//
// Phase one picks a head cluster by hill climbing on cluster-average RSS,
// phase two runs WCL around the strongest node of that cluster with nodes
// polled from the neighboring clusters. Every protocol message lands in a
// ledger so the overhead module can price it.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wcl/channel.hpp"
#include "wcl/estimators.hpp"
#include "wcl/placement.hpp"

namespace wcl {

using ClusterId = std::size_t;

struct Cluster {
  ClusterId id = 0;
  int q = 0;  // axial hex coordinates
  int r = 0;
  Point2 center;
  std::vector<NodeId> members;
  std::optional<NodeId> head;  // empty hexes have no head
  std::vector<ClusterId> adjacency;

  bool empty() const { return members.empty(); }
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  double radius = 0.0;  // hex circumradius R_C
  Point2 origin;        // center of hex (0, 0)
  Area area;
  std::vector<ClusterId> active;
  std::vector<ClusterId> node_cluster;  // node id -> cluster id

  std::vector<ClusterId> nonempty() const;
  bool is_active(ClusterId id) const;
  std::vector<ClusterId> active_neighbors(ClusterId id) const;
  std::vector<ClusterId> nonempty_neighbors(ClusterId id) const;
};

/// Pointy-top hexes of circumradius r_c covering the area and every measured
/// position, anchored at the area's lower-left bounding-box corner so a
/// symmetric layout does not force a symmetric (odd) cluster count. All
/// nonempty clusters start active.
ClusterSet build_hex_clusters(const Deployment& dep, double r_c);

/// Hex (q, r) containing `p`.
std::pair<int, int> hex_of(Point2 p, double r_c, Point2 origin = {});
Point2 hex_center(int q, int r, double r_c, Point2 origin = {});

/// Largest R_C (searched downward in `step` increments) giving exactly
/// `target` nonempty clusters; nullopt when none does before the count runs
/// past 2 * target + 6.
std::optional<double> cluster_radius_for_count(const Deployment& dep, std::size_t target, double r_max,
                                               double step = 0.05);

enum class MessageKind { report, avg_rss, probe, poll, result };
const char* to_string(MessageKind k);

struct Message {
  NodeId from = 0;
  NodeId to = 0;
  MessageKind kind = MessageKind::report;
  double distance = 0.0;  // m, between true positions
  std::size_t payload = 1;
  int phase = 1;          // algorithm that sent it
};

class MessageLedger {
 public:
  void append(const Message& m) { entries_.push_back(m); }
  const std::vector<Message>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t count(MessageKind k) const;
  std::size_t count_phase(int phase) const;

 private:
  std::vector<Message> entries_;
};

struct ClusterStats {
  double avg_rss = 0.0;
  Point2 centroid;
  Point2 wcl;
  Point2 gradient;     // unit vector, pointing up the RSS field
  bool flat = true;    // |L_w - L_c| below 1e-9
};

ClusterStats cluster_statistics(const Cluster& cluster, const Deployment& dep, const RssRealization& rss);

/// Active neighbor whose center offset best aligns with the gradient.
/// Throws isolated_cluster when no neighbor is active.
ClusterId next_cluster(const ClusterSet& set, ClusterId id, const std::vector<ClusterStats>& stats);

/// Active = nonempty clusters with avg_rss >= threshold (all nonempty when
/// unset). Updates set.active.
std::vector<ClusterId> form_active_set(ClusterSet& set, const Deployment& dep, const RssRealization& rss,
                                       std::optional<double> threshold_dbm);

/// Previous head cluster and its nonempty neighbors (multi-round mode).
std::vector<ClusterId> mobility_active_set(ClusterSet& set, ClusterId previous);

struct HeadSelection {
  ClusterId selected = 0;
  bool fallback = false;          // no cluster passed the neighbor check
  std::size_t full_checks = 0;    // clusters that reached the all-neighbor comparison
  std::vector<ClusterId> winners; // clusters that passed it
};

HeadSelection head_cluster_selection(const ClusterSet& set, const Deployment& dep, const RssRealization& rss,
                                     MessageLedger& ledger);

struct DwclOptions {
  bool aggregate = false;  // neighbors reply with one partial sum instead of per-node data
};

struct DwclResult {
  ClusterId selected = 0;
  NodeId strongest = 0;
  double r_star = 0.0;
  Estimate estimate;
  MessageLedger ledger;
  HeadSelection selection;
  bool unweighted = false;  // every pooled power equal, plain centroid used
};

DwclResult modified_wcl(const ClusterSet& set, ClusterId selected, const Deployment& dep, const RssRealization& rss,
                        MessageLedger ledger, const DwclOptions& opts = {});

struct DwclConfig {
  double cluster_radius = 200.0;
  std::optional<double> active_threshold_dbm;
  DwclOptions options;
};

/// Both phases on a fresh clustering.
DwclResult run_dwcl(const Deployment& dep, const RssRealization& rss, const DwclConfig& cfg);
DwclResult run_dwcl(ClusterSet& set, const Deployment& dep, const RssRealization& rss, const DwclConfig& cfg);

/// Realized (M, L, K) of a run: mean nodes per nonempty cluster, active
/// cluster count, mean nonempty neighbors per active cluster.
struct ClusterCounts {
  double m = 0.0;
  std::size_t l = 0;
  double k = 0.0;
};
ClusterCounts cluster_counts(const ClusterSet& set);

void write_ledger_csv_header(std::ostream& os);
void write_ledger_csv(std::ostream& os, std::size_t run, const MessageLedger& ledger);
void write_dwcl_csv_header(std::ostream& os);
void write_dwcl_csv_row(std::ostream& os, std::size_t run, const DwclResult& res, Point2 pu);

}  // namespace wcl
