#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "wcl/dwcl.hpp"
#include "wcl/error.hpp"

using namespace wcl;

namespace {

Deployment square_field(std::size_t n, double half, std::uint64_t seed, Point2 pu) {
  Rng rng(seed);
  auto d = place_uniform_square(half, n, rng);
  d.pu = pu;
  return d;
}

RssRealization noiseless(const Deployment& d) {
  ChannelParams p;
  Rng rng(0);
  return sample_rss(p, d, rng);
}

}  // namespace

TEST(Dwcl, HexRoundTrip) {
  const double rc = 37.0;
  for (int q = -4; q <= 4; ++q) {
    for (int r = -4; r <= 4; ++r) {
      const Point2 c = hex_center(q, r, rc);
      EXPECT_EQ(hex_of(c, rc), std::make_pair(q, r));
      // Anything within the inscribed circle belongs to the same hex.
      for (int k = 0; k < 12; ++k) {
        const double t = k * 0.5236;
        const Point2 p = c + Point2{0.85 * rc * std::cos(t), 0.85 * rc * std::sin(t)};
        EXPECT_EQ(hex_of(p, rc), std::make_pair(q, r));
      }
    }
  }
}

TEST(Dwcl, ClusteringPartitionsNodes) {
  const auto d = square_field(500, 1000, 1, {0, 0});
  const auto set = build_hex_clusters(d, 200);
  std::size_t total = 0;
  for (const auto& c : set.clusters) {
    total += c.members.size();
    EXPECT_LE(c.adjacency.size(), 6u);
    for (ClusterId n : c.adjacency) {
      const auto& back = set.clusters[n].adjacency;
      EXPECT_NE(std::find(back.begin(), back.end(), c.id), back.end());
      EXPECT_NEAR(distance(c.center, set.clusters[n].center), 200 * std::sqrt(3.0), 1e-9);
    }
    for (NodeId m : c.members) {
      EXPECT_EQ(set.node_cluster[m], c.id);
      // A hex point is never farther than R_C from its center.
      EXPECT_LE(distance(d.measured_positions[m], c.center), 200 * (1 + 1e-9));
    }
    if (!c.empty()) {
      ASSERT_TRUE(c.head);
      for (NodeId m : c.members) {
        EXPECT_LE(distance(d.measured_positions[*c.head], c.center),
                  distance(d.measured_positions[m], c.center));
      }
    } else {
      EXPECT_FALSE(c.head);
    }
  }
  EXPECT_EQ(total, d.size());
  EXPECT_EQ(set.active, set.nonempty());
}

TEST(Dwcl, ClusterStatisticsGradientPointsUphill) {
  Deployment d;
  d.true_positions = d.measured_positions = {{0, 0}, {10, 0}, {0, 10}};
  d.pu = {100, 0};
  Cluster c;
  c.members = {0, 1, 2};
  const auto rss = noiseless(d);
  const auto st = cluster_statistics(c, d, rss);
  EXPECT_FALSE(st.flat);
  EXPECT_GT(st.gradient.x, 0.0);
  EXPECT_NEAR(norm(st.gradient), 1.0, 1e-12);
  EXPECT_NEAR(st.centroid.x, 10.0 / 3, 1e-12);
  EXPECT_NEAR(st.avg_rss, (rss.powers[0] + rss.powers[1] + rss.powers[2]) / 3, 1e-12);

  RssRealization flat;
  flat.powers = {-50, -50, -50};
  flat.shadowing = {0, 0, 0};
  EXPECT_TRUE(cluster_statistics(c, d, flat).flat);
}

TEST(Dwcl, NextClusterFollowsGradient) {
  const auto d = square_field(800, 1000, 2, {600, 300});
  auto set = build_hex_clusters(d, 200);
  const auto rss = noiseless(d);
  std::vector<ClusterStats> stats(set.clusters.size());
  for (ClusterId id : set.active) stats[id] = cluster_statistics(set.clusters[id], d, rss);
  int toward = 0, total = 0;
  for (ClusterId id : set.active) {
    if (set.active_neighbors(id).empty() || stats[id].flat) continue;
    const ClusterId n = next_cluster(set, id, stats);
    const Point2 c0 = set.clusters[id].center;
    if (distance(c0, d.pu) < 400) continue;
    ++total;
    if (distance(set.clusters[n].center, d.pu) < distance(c0, d.pu)) ++toward;
  }
  EXPECT_GT(total, 10);
  EXPECT_GE(toward, total * 8 / 10);
}

TEST(Dwcl, IsolatedClusterThrows) {
  const auto d = square_field(200, 1000, 3, {0, 0});
  auto set = build_hex_clusters(d, 200);
  const ClusterId only = set.nonempty().front();
  set.active = {only};
  std::vector<ClusterStats> stats(set.clusters.size());
  try {
    next_cluster(set, only, stats);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::isolated_cluster);
  }
}

TEST(Dwcl, MessageCountsFollowProtocol) {
  const auto d = square_field(1000, 1000, 4, {-250, 410});
  auto set = build_hex_clusters(d, 200);
  ChannelParams p;
  p.sigma_s = 4;
  Rng rng(5);
  const auto rss = sample_rss(p, d, rng);
  const auto res = run_dwcl(set, d, rss, DwclConfig{});
  const auto& lg = res.ledger;
  std::size_t reports = 0, with_nbrs = 0;
  for (ClusterId id : set.active) {
    reports += set.clusters[id].members.size() - 1;
    if (!set.active_neighbors(id).empty()) ++with_nbrs;
  }
  EXPECT_EQ(lg.count(MessageKind::report), reports);
  EXPECT_EQ(lg.count(MessageKind::avg_rss), 2 * with_nbrs);
  EXPECT_EQ(lg.count(MessageKind::probe) % 2, 0u);
  const auto k = set.nonempty_neighbors(res.selected).size();
  EXPECT_EQ(lg.count(MessageKind::poll), k);
  EXPECT_EQ(lg.count(MessageKind::result), k);
  EXPECT_EQ(lg.count_phase(2), 2 * k);
  EXPECT_EQ(lg.count_phase(1) + lg.count_phase(2), lg.size());
  for (const auto& m : lg.entries()) {
    EXPECT_NEAR(m.distance, distance(d.true_positions[m.from], d.true_positions[m.to]), 1e-9);
  }
}

TEST(Dwcl, NoiselessRunLandsNearSource) {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    Rng pr(seed);
    const Point2 pu{pr.uniform(-700, 700), pr.uniform(-700, 700)};
    const auto d = square_field(1000, 1000, seed, pu);
    const auto rss = noiseless(d);
    const auto res = run_dwcl(d, rss, DwclConfig{});
    EXPECT_LT(distance(res.estimate.position, pu), 200.0) << seed;
    // The selected cluster holds the node nearest the PU, or borders it.
    NodeId nearest = 0;
    for (NodeId i = 0; i < d.size(); ++i) {
      if (distance(d.true_positions[i], pu) < distance(d.true_positions[nearest], pu)) nearest = i;
    }
    const auto set = build_hex_clusters(d, 200);
    const ClusterId home = set.node_cluster[nearest];
    const auto& adj = set.clusters[home].adjacency;
    EXPECT_TRUE(res.selected == home || std::find(adj.begin(), adj.end(), res.selected) != adj.end());
  }
}

TEST(Dwcl, AggregationMatchesPerNodeReplies) {
  const auto d = square_field(1000, 1000, 6, {120, -80});
  ChannelParams p;
  p.sigma_s = 6;
  Rng rng(7);
  const auto rss = sample_rss(p, d, rng);
  DwclConfig a, b;
  b.options.aggregate = true;
  const auto ra = run_dwcl(d, rss, a);
  const auto rb = run_dwcl(d, rss, b);
  EXPECT_NEAR(ra.estimate.position.x, rb.estimate.position.x, 1e-9);
  EXPECT_NEAR(ra.estimate.position.y, rb.estimate.position.y, 1e-9);
  EXPECT_EQ(ra.ledger.size(), rb.ledger.size());
  for (const auto& m : rb.ledger.entries()) {
    if (m.kind == MessageKind::result) EXPECT_EQ(m.payload, 1u);
  }
}

TEST(Dwcl, PooledSetRespectsRadius) {
  const auto d = square_field(1000, 1000, 8, {-900, 900});
  const auto res = run_dwcl(d, noiseless(d), DwclConfig{});
  const Point2 ls = d.measured_positions[res.strongest];
  EXPECT_LE(res.r_star, 200.0);
  EXPECT_NEAR(res.r_star, std::min(200.0, edge_distance(Square{1000}, ls)), 1e-12);
  for (NodeId m : res.estimate.participants) {
    EXPECT_LE(distance(d.measured_positions[m], ls), res.r_star + 1e-9);
  }
  // The weakest pooled node gets zero weight.
  EXPECT_EQ(*std::min_element(res.estimate.weights.begin(), res.estimate.weights.end()), 0.0);
}

TEST(Dwcl, ActiveThresholdAndMobility) {
  const auto d = square_field(1000, 1000, 9, {0, 0});
  auto set = build_hex_clusters(d, 200);
  const auto rss = noiseless(d);
  const auto all = form_active_set(set, d, rss, std::nullopt);
  EXPECT_EQ(all, set.nonempty());
  const auto loud = form_active_set(set, d, rss, -105.0);
  EXPECT_LT(loud.size(), all.size());
  EXPECT_THROW(form_active_set(set, d, rss, 50.0), Error);

  const ClusterId prev = set.node_cluster[0];
  const auto mob = mobility_active_set(set, prev);
  EXPECT_NE(std::find(mob.begin(), mob.end(), prev), mob.end());
  EXPECT_EQ(mob.size(), 1 + set.nonempty_neighbors(prev).size());
}

TEST(Dwcl, SelectionFallbackIsLoudest) {
  const auto d = square_field(400, 1000, 10, {0, 0});
  auto set = build_hex_clusters(d, 200);
  RssRealization rss;
  rss.powers.assign(d.size(), -60.0);
  rss.shadowing.assign(d.size(), 0.0);
  MessageLedger lg;
  const auto sel = head_cluster_selection(set, d, rss, lg);
  // Every cluster ties, so nobody is strictly louder than its next cluster.
  EXPECT_TRUE(sel.fallback);
  EXPECT_EQ(sel.selected, set.active.front());
  EXPECT_EQ(sel.full_checks, 0u);
}

TEST(Dwcl, ClusterRadiusSearch) {
  const auto d = square_field(400, 1000, 11, {0, 0});
  const auto r = cluster_radius_for_count(d, 16, 800);
  ASSERT_TRUE(r);
  EXPECT_EQ(build_hex_clusters(d, *r).nonempty().size(), 16u);
  EXPECT_FALSE(cluster_radius_for_count(d, 100000, 800, 50));
}

TEST(Dwcl, CountsAndCsv) {
  const auto d = square_field(300, 1000, 12, {0, 0});
  const auto set = build_hex_clusters(d, 250);
  const auto c = cluster_counts(set);
  EXPECT_EQ(c.l, set.nonempty().size());
  EXPECT_NEAR(c.m * c.l, 300.0, 1e-9);
  EXPECT_GT(c.k, 0.0);
  EXPECT_LE(c.k, 6.0);

  std::ostringstream os;
  write_ledger_csv_header(os);
  MessageLedger lg;
  lg.append({1, 2, MessageKind::poll, 3.5, 1, 2});
  write_ledger_csv(os, 7, lg);
  EXPECT_EQ(os.str(), "run,from,to,kind,distance_m\n7,1,2,poll,3.5\n");
}
