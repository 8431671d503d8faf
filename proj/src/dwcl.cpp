#include "wcl/dwcl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>
#include <ostream>

#include "wcl/error.hpp"

namespace wcl {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr int kDirections[6][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}};

struct Box {
  double xmin, xmax, ymin, ymax;
};

Box area_box(const Area& area) {
  if (const auto* d = std::get_if<Disk>(&area)) return {-d->radius, d->radius, -d->radius, d->radius};
  const auto& s = std::get<Square>(area);
  return {-s.half_side, s.half_side, -s.half_side, s.half_side};
}

NodeId head_of(const ClusterSet& set, ClusterId id) {
  const auto& h = set.clusters.at(id).head;
  if (!h) throw Error(ErrorCode::empty_set, "cluster " + std::to_string(id) + " has no head");
  return *h;
}

double link_distance(const Deployment& dep, NodeId a, NodeId b) {
  return distance(dep.true_positions[a], dep.true_positions[b]);
}

}  // namespace

Point2 hex_center(int q, int r, double r_c, Point2 origin) {
  return origin + Point2{r_c * kSqrt3 * (q + 0.5 * r), r_c * 1.5 * r};
}

std::pair<int, int> hex_of(Point2 p, double r_c, Point2 origin) {
  p = p - origin;
  const double fq = (kSqrt3 / 3.0 * p.x - p.y / 3.0) / r_c;
  const double fr = (2.0 / 3.0 * p.y) / r_c;
  const double fs = -fq - fr;
  double q = std::round(fq);
  double r = std::round(fr);
  const double s = std::round(fs);
  const double dq = std::abs(q - fq);
  const double dr = std::abs(r - fr);
  const double ds = std::abs(s - fs);
  if (dq > dr && dq > ds) {
    q = -r - s;
  } else if (dr > ds) {
    r = -q - s;
  }
  return {static_cast<int>(q), static_cast<int>(r)};
}

std::vector<ClusterId> ClusterSet::nonempty() const {
  std::vector<ClusterId> ids;
  for (const auto& c : clusters) {
    if (!c.empty()) ids.push_back(c.id);
  }
  return ids;
}

bool ClusterSet::is_active(ClusterId id) const { return std::find(active.begin(), active.end(), id) != active.end(); }

std::vector<ClusterId> ClusterSet::active_neighbors(ClusterId id) const {
  std::vector<ClusterId> out;
  for (ClusterId n : clusters.at(id).adjacency) {
    if (is_active(n)) out.push_back(n);
  }
  return out;
}

std::vector<ClusterId> ClusterSet::nonempty_neighbors(ClusterId id) const {
  std::vector<ClusterId> out;
  for (ClusterId n : clusters.at(id).adjacency) {
    if (!clusters[n].empty()) out.push_back(n);
  }
  return out;
}

ClusterSet build_hex_clusters(const Deployment& dep, double r_c) {
  if (!(r_c > 0.0)) throw Error(ErrorCode::invalid_argument, "cluster radius must be positive");
  ClusterSet set;
  set.radius = r_c;
  set.area = dep.area;

  Box box = area_box(dep.area);
  set.origin = {box.xmin, box.ymin};
  const Point2 o = set.origin;
  for (const auto& p : dep.measured_positions) {
    box.xmin = std::min(box.xmin, p.x);
    box.xmax = std::max(box.xmax, p.x);
    box.ymin = std::min(box.ymin, p.y);
    box.ymax = std::max(box.ymax, p.y);
  }
  box = {box.xmin - r_c, box.xmax + r_c, box.ymin - r_c, box.ymax + r_c};

  std::map<std::pair<int, int>, ClusterId> index;
  const int r_lo = static_cast<int>(std::floor((box.ymin - o.y) / (1.5 * r_c))) - 1;
  const int r_hi = static_cast<int>(std::ceil((box.ymax - o.y) / (1.5 * r_c))) + 1;
  for (int r = r_lo; r <= r_hi; ++r) {
    const int q_lo = static_cast<int>(std::floor((box.xmin - o.x) / (kSqrt3 * r_c) - 0.5 * r)) - 1;
    const int q_hi = static_cast<int>(std::ceil((box.xmax - o.x) / (kSqrt3 * r_c) - 0.5 * r)) + 1;
    for (int q = q_lo; q <= q_hi; ++q) {
      const Point2 c = hex_center(q, r, r_c, o);
      if (c.x < box.xmin || c.x > box.xmax || c.y < box.ymin || c.y > box.ymax) continue;
      Cluster cl;
      cl.id = set.clusters.size();
      cl.q = q;
      cl.r = r;
      cl.center = c;
      index[{q, r}] = cl.id;
      set.clusters.push_back(std::move(cl));
    }
  }
  for (auto& cl : set.clusters) {
    for (const auto& d : kDirections) {
      const auto it = index.find({cl.q + d[0], cl.r + d[1]});
      if (it != index.end()) cl.adjacency.push_back(it->second);
    }
    std::sort(cl.adjacency.begin(), cl.adjacency.end());
  }

  set.node_cluster.resize(dep.size());
  for (NodeId i = 0; i < dep.size(); ++i) {
    const auto it = index.find(hex_of(dep.measured_positions[i], r_c, o));
    if (it == index.end()) throw Error(ErrorCode::degenerate_geometry, "node outside the hex tiling");
    set.node_cluster[i] = it->second;
    set.clusters[it->second].members.push_back(i);
  }
  for (auto& cl : set.clusters) {
    double best = 0.0;
    for (NodeId m : cl.members) {
      const double d = distance(dep.measured_positions[m], cl.center);
      if (!cl.head || d < best) {
        cl.head = m;
        best = d;
      }
    }
  }
  set.active = set.nonempty();
  return set;
}

std::optional<double> cluster_radius_for_count(const Deployment& dep, std::size_t target, double r_max, double step) {
  if (!(step > 0.0) || !(r_max > 0.0)) throw Error(ErrorCode::invalid_argument, "radius search needs positive bounds");
  for (double r = r_max; r > step * 0.5; r -= step) {
    const std::size_t count = build_hex_clusters(dep, r).nonempty().size();
    if (count == target) return r;
    // Counts only fluctuate by a few hexes as r shrinks; far past the
    // target nothing smaller will come back down to it.
    if (count > 2 * target + 6) break;
  }
  return std::nullopt;
}

const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::report: return "report";
    case MessageKind::avg_rss: return "avg_rss";
    case MessageKind::probe: return "probe";
    case MessageKind::poll: return "poll";
    case MessageKind::result: return "result";
  }
  return "?";
}

std::size_t MessageLedger::count(MessageKind k) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [k](const Message& m) { return m.kind == k; }));
}

std::size_t MessageLedger::count_phase(int phase) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [phase](const Message& m) { return m.phase == phase; }));
}

ClusterStats cluster_statistics(const Cluster& cluster, const Deployment& dep, const RssRealization& rss) {
  if (cluster.empty()) throw Error(ErrorCode::empty_set, "cluster statistics of an empty cluster");
  ClusterStats st;
  double floor = cluster.members.empty() ? 0.0 : rss.powers[cluster.members.front()];
  Point2 sum_pos{0.0, 0.0};
  for (NodeId m : cluster.members) {
    st.avg_rss += rss.powers[m];
    sum_pos = sum_pos + dep.measured_positions[m];
    floor = std::min(floor, rss.powers[m]);
  }
  const double n = static_cast<double>(cluster.members.size());
  st.avg_rss /= n;
  st.centroid = sum_pos / n;

  double wsum = 0.0;
  Point2 wpos{0.0, 0.0};
  for (NodeId m : cluster.members) {
    const double w = rss.powers[m] - floor;
    wsum += w;
    wpos = wpos + w * dep.measured_positions[m];
  }
  st.wcl = wsum > 0.0 ? wpos / wsum : st.centroid;
  // Louder members pull L_w toward the source, so L_w - L_c points uphill.
  const Point2 g = st.wcl - st.centroid;
  const double len = norm(g);
  st.flat = len < 1e-9;
  st.gradient = st.flat ? Point2{0.0, 0.0} : g / len;
  return st;
}

ClusterId next_cluster(const ClusterSet& set, ClusterId id, const std::vector<ClusterStats>& stats) {
  const auto nbrs = set.active_neighbors(id);
  if (nbrs.empty()) throw Error(ErrorCode::isolated_cluster, "isolated cluster " + std::to_string(id));
  const ClusterStats& own = stats.at(id);

  auto louder = [&](ClusterId a, ClusterId b) {
    if (stats[a].avg_rss != stats[b].avg_rss) return stats[a].avg_rss > stats[b].avg_rss;
    return a < b;
  };
  if (own.flat) return *std::min_element(nbrs.begin(), nbrs.end(), louder);

  const Point2 c0 = set.clusters[id].center;
  ClusterId best = nbrs.front();
  double best_dot = -2.0;
  for (ClusterId n : nbrs) {
    const Point2 off = set.clusters[n].center - c0;
    const double d = dot(off / norm(off), own.gradient);
    if (d > best_dot + 1e-12 || (std::abs(d - best_dot) <= 1e-12 && louder(n, best))) {
      best = n;
      best_dot = std::max(d, best_dot);
    }
  }
  return best;
}

std::vector<ClusterId> form_active_set(ClusterSet& set, const Deployment& dep, const RssRealization& rss,
                                       std::optional<double> threshold_dbm) {
  std::vector<ClusterId> active;
  for (ClusterId id : set.nonempty()) {
    if (!threshold_dbm || cluster_statistics(set.clusters[id], dep, rss).avg_rss >= *threshold_dbm) {
      active.push_back(id);
    }
  }
  if (active.empty()) throw Error(ErrorCode::no_active_clusters, "no active clusters");
  set.active = active;
  return active;
}

std::vector<ClusterId> mobility_active_set(ClusterSet& set, ClusterId previous) {
  if (set.clusters.at(previous).empty()) throw Error(ErrorCode::no_active_clusters, "previous head cluster is empty");
  std::vector<ClusterId> active{previous};
  for (ClusterId n : set.nonempty_neighbors(previous)) active.push_back(n);
  std::sort(active.begin(), active.end());
  set.active = active;
  return active;
}

HeadSelection head_cluster_selection(const ClusterSet& set, const Deployment& dep, const RssRealization& rss,
                                     MessageLedger& ledger) {
  if (set.active.empty()) throw Error(ErrorCode::no_active_clusters, "no active clusters");
  std::vector<ClusterStats> stats(set.clusters.size());
  for (ClusterId id : set.active) {
    const Cluster& c = set.clusters[id];
    const NodeId head = head_of(set, id);
    for (NodeId m : c.members) {
      if (m != head) ledger.append({m, head, MessageKind::report, link_distance(dep, m, head), 1, 1});
    }
    stats[id] = cluster_statistics(c, dep, rss);
  }

  HeadSelection sel;
  for (ClusterId id : set.active) {
    const auto nbrs = set.active_neighbors(id);
    if (nbrs.empty()) {
      sel.winners.push_back(id);
      continue;
    }
    const ClusterId next = next_cluster(set, id, stats);
    const NodeId h = head_of(set, id);
    const NodeId hn = head_of(set, next);
    ledger.append({h, hn, MessageKind::avg_rss, link_distance(dep, h, hn), 1, 1});
    ledger.append({hn, h, MessageKind::avg_rss, link_distance(dep, hn, h), 1, 1});
    if (!(stats[id].avg_rss > stats[next].avg_rss)) continue;

    ++sel.full_checks;
    bool maximal = true;
    for (ClusterId n : nbrs) {
      const NodeId hb = head_of(set, n);
      ledger.append({h, hb, MessageKind::probe, link_distance(dep, h, hb), 1, 1});
      ledger.append({hb, h, MessageKind::probe, link_distance(dep, hb, h), 1, 1});
      if (stats[n].avg_rss > stats[id].avg_rss) maximal = false;
    }
    if (maximal) sel.winners.push_back(id);
  }

  auto louder = [&](ClusterId a, ClusterId b) {
    if (stats[a].avg_rss != stats[b].avg_rss) return stats[a].avg_rss > stats[b].avg_rss;
    return a < b;
  };
  if (!sel.winners.empty()) {
    sel.selected = *std::min_element(sel.winners.begin(), sel.winners.end(), louder);
  } else {
    sel.fallback = true;
    sel.selected = *std::min_element(set.active.begin(), set.active.end(), louder);
  }
  return sel;
}

namespace {

// Partial sums a cluster head can ship instead of raw node data; the floor
// correction sum (P - f) L = sum P L - f sum L keeps it exact.
struct Partial {
  Point2 sum_pl{0.0, 0.0};
  Point2 sum_l{0.0, 0.0};
  double sum_p = 0.0;
  std::size_t n = 0;
  double min_p = std::numeric_limits<double>::infinity();

  void add(double p, Point2 l) {
    sum_pl = sum_pl + p * l;
    sum_l = sum_l + l;
    sum_p += p;
    ++n;
    min_p = std::min(min_p, p);
  }
  void merge(const Partial& o) {
    sum_pl = sum_pl + o.sum_pl;
    sum_l = sum_l + o.sum_l;
    sum_p += o.sum_p;
    n += o.n;
    min_p = std::min(min_p, o.min_p);
  }
};

}  // namespace

DwclResult modified_wcl(const ClusterSet& set, ClusterId selected, const Deployment& dep, const RssRealization& rss,
                        MessageLedger ledger, const DwclOptions& opts) {
  const Cluster& sel = set.clusters.at(selected);
  if (sel.empty()) throw Error(ErrorCode::empty_set, "selected cluster is empty");
  DwclResult res;
  res.selected = selected;

  NodeId ns = sel.members.front();
  for (NodeId m : sel.members) {
    if (rss.powers[m] > rss.powers[ns]) ns = m;
  }
  res.strongest = ns;
  const Point2 ls = dep.measured_positions[ns];
  res.r_star = std::min(edge_distance(set.area, ls), set.radius);
  const double reach = res.r_star * (1.0 + 1e-12) + 1e-12;

  std::vector<NodeId> pooled;
  Partial total;
  auto collect = [&](const Cluster& c, Partial& part) {
    std::size_t added = 0;
    for (NodeId m : c.members) {
      if (distance(dep.measured_positions[m], ls) <= reach) {
        pooled.push_back(m);
        part.add(rss.powers[m], dep.measured_positions[m]);
        ++added;
      }
    }
    return added;
  };
  collect(sel, total);

  const NodeId h = head_of(set, selected);
  for (ClusterId n : set.nonempty_neighbors(selected)) {
    const NodeId hn = head_of(set, n);
    Partial part;
    const std::size_t added = collect(set.clusters[n], part);
    ledger.append({h, hn, MessageKind::poll, link_distance(dep, h, hn), 1, 2});
    ledger.append({hn, h, MessageKind::result, link_distance(dep, hn, h), opts.aggregate ? 1 : added, 2});
    total.merge(part);
  }
  if (pooled.empty()) throw Error(ErrorCode::empty_set, "pooled set is empty");

  Estimate& est = res.estimate;
  est.participants = pooled;
  const double floor = total.min_p;
  if (opts.aggregate) {
    const double wsum = total.sum_p - floor * static_cast<double>(total.n);
    if (wsum > 0.0) {
      est.position = (total.sum_pl - floor * total.sum_l) / wsum;
    } else {
      est.position = total.sum_l / static_cast<double>(total.n);
      res.unweighted = true;
    }
    for (NodeId m : pooled) est.weights.push_back(rss.powers[m] - floor);
  } else {
    double wsum = 0.0;
    Point2 acc{0.0, 0.0};
    Point2 plain{0.0, 0.0};
    for (NodeId m : pooled) {
      const double w = rss.powers[m] - floor;
      est.weights.push_back(w);
      wsum += w;
      acc = acc + w * dep.measured_positions[m];
      plain = plain + dep.measured_positions[m];
    }
    if (wsum > 0.0) {
      est.position = acc / wsum;
    } else {
      est.position = plain / static_cast<double>(pooled.size());
      res.unweighted = true;
    }
  }
  res.ledger = std::move(ledger);
  return res;
}

DwclResult run_dwcl(ClusterSet& set, const Deployment& dep, const RssRealization& rss, const DwclConfig& cfg) {
  form_active_set(set, dep, rss, cfg.active_threshold_dbm);
  MessageLedger ledger;
  const HeadSelection sel = head_cluster_selection(set, dep, rss, ledger);
  DwclResult res = modified_wcl(set, sel.selected, dep, rss, std::move(ledger), cfg.options);
  res.selection = sel;
  return res;
}

DwclResult run_dwcl(const Deployment& dep, const RssRealization& rss, const DwclConfig& cfg) {
  ClusterSet set = build_hex_clusters(dep, cfg.cluster_radius);
  return run_dwcl(set, dep, rss, cfg);
}

ClusterCounts cluster_counts(const ClusterSet& set) {
  ClusterCounts c;
  c.l = set.active.size();
  if (c.l == 0) return c;
  double members = 0.0;
  double nbrs = 0.0;
  for (ClusterId id : set.active) {
    members += static_cast<double>(set.clusters[id].members.size());
    nbrs += static_cast<double>(set.nonempty_neighbors(id).size());
  }
  c.m = members / static_cast<double>(c.l);
  c.k = nbrs / static_cast<double>(c.l);
  return c;
}

void write_ledger_csv_header(std::ostream& os) { os << "run,from,to,kind,distance_m\n"; }

void write_ledger_csv(std::ostream& os, std::size_t run, const MessageLedger& ledger) {
  const auto old_precision = os.precision(12);
  for (const auto& m : ledger.entries()) {
    os << run << ',' << m.from << ',' << m.to << ',' << to_string(m.kind) << ',' << m.distance << '\n';
  }
  os.precision(old_precision);
}

void write_dwcl_csv_header(std::ostream& os) { os << "run,cluster,Ns,Rstar,est_x,est_y,error_m\n"; }

void write_dwcl_csv_row(std::ostream& os, std::size_t run, const DwclResult& res, Point2 pu) {
  const auto old_precision = os.precision(12);
  os << run << ',' << res.selected << ',' << res.strongest << ',' << res.r_star << ',' << res.estimate.position.x
     << ',' << res.estimate.position.y << ',' << distance(res.estimate.position, pu) << '\n';
  os.precision(old_precision);
}

}  // namespace wcl
