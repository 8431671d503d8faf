#include <gtest/gtest.h>

#include <cmath>

#include "wcl/error.hpp"
#include "wcl/estimators.hpp"

using namespace wcl;

namespace {

Deployment manual(std::vector<Point2> pts, Point2 pu = {0, 0}) {
  Deployment d;
  d.true_positions = pts;
  d.measured_positions = pts;
  d.pu = pu;
  d.area = Disk{100.0};
  return d;
}

RssRealization powers(std::vector<double> p) {
  RssRealization r;
  r.shadowing.assign(p.size(), 0.0);
  r.powers = std::move(p);
  return r;
}

}  // namespace

TEST(Estimators, PminPolicies) {
  ChannelParams p;
  p.sigma_s = 4.0;
  WclConfig c;
  EXPECT_NEAR(compute_pmin(p, 100.0, c), -85.32, 1e-9);
  c.pmin = FixedPmin{-90.0};
  EXPECT_EQ(compute_pmin(p, 100.0, c), -90.0);
  p.sigma_s = 0.0;
  c.pmin = BorderQuantilePmin{3.0};
  EXPECT_NEAR(compute_pmin(p, 100.0, c), -76.0, 1e-12);
}

TEST(Estimators, WclHandExamples) {
  auto d = manual({{-1, 0}, {1, 0}});
  auto e = wcl_estimate(d, powers({-50, -50}), -60);
  EXPECT_NEAR(e.position.x, 0.0, 1e-12);
  EXPECT_NEAR(e.position.y, 0.0, 1e-12);

  d = manual({{0, 0}, {4, 0}});
  e = wcl_estimate(d, powers({3, 1}), 0);
  EXPECT_NEAR(e.position.x, 1.0, 1e-12);
  EXPECT_NEAR(e.position.y, 0.0, 1e-12);
}

TEST(Estimators, NegativeWeightsDropped) {
  auto d = manual({{0, 0}, {4, 0}, {10, 10}});
  const auto e = wcl_estimate(d, powers({3, 1, -5}), 0);
  EXPECT_EQ(e.participants, (std::vector<NodeId>{0, 1}));
  EXPECT_NEAR(e.position.x, 1.0, 1e-12);
}

TEST(Estimators, NoNodeAbovePmin) {
  auto d = manual({{0, 0}, {4, 0}});
  try {
    wcl_estimate(d, powers({-5, -1}), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_node_above_pmin);
  }
}

TEST(Estimators, UsesMeasuredPositions) {
  auto d = manual({{0, 0}, {4, 0}});
  d.measured_positions = {{0, 2}, {4, 2}};
  const auto e = wcl_estimate(d, powers({1, 1}), 0);
  EXPECT_NEAR(e.position.y, 2.0, 1e-12);
}

TEST(Estimators, ScaleInvarianceAndHull) {
  Rng rng(1);
  Deployment d = place_uniform_disk(100, 50, rng);
  std::vector<double> p(50), q(50);
  for (int i = 0; i < 50; ++i) {
    p[i] = rng.uniform(1, 20);
    q[i] = 3.5 * p[i];
  }
  const auto a = wcl_estimate(d, powers(p), 0);
  const auto b = wcl_estimate(d, powers(q), 0);
  EXPECT_NEAR(a.position.x, b.position.x, 1e-9);
  EXPECT_NEAR(a.position.y, b.position.y, 1e-9);
  double xmin = 1e9, xmax = -1e9;
  for (const auto& pt : d.measured_positions) {
    xmin = std::min(xmin, pt.x);
    xmax = std::max(xmax, pt.x);
  }
  EXPECT_GE(a.position.x, xmin);
  EXPECT_LE(a.position.x, xmax);
}

TEST(Estimators, EqualPowersGiveCentroid) {
  Rng rng(2);
  Deployment d = place_uniform_disk(100, 30, rng);
  const auto w = wcl_estimate(d, powers(std::vector<double>(30, -40.0)), -60);
  const auto ids = all_nodes(30);
  const auto c = centroid_estimate(d, ids);
  EXPECT_NEAR(w.position.x, c.position.x, 1e-9);
  EXPECT_NEAR(w.position.y, c.position.y, 1e-9);
}

TEST(Estimators, ExactZeroOnSymmetricGrid) {
  ChannelParams p;
  const Deployment d = place_fixed_grid(100, 196);
  Rng rng(3);
  const auto rss = sample_rss(p, d, rng);
  const auto e = wcl_estimate(d, rss, compute_pmin(p, 100, WclConfig{}));
  EXPECT_EQ(localization_error(e, d.pu), 0.0);
}

// Independent straight-line implementation of the weighted centroid.
TEST(Estimators, MatchesBruteForceOracle) {
  ChannelParams p;
  p.sigma_s = 4.0;
  Rng rng(4);
  const double pmin = compute_pmin(p, 100, WclConfig{});
  double sum_lib = 0, sum_oracle = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const Deployment d = place_uniform_disk(100, 100, rng);
    const auto rss = sample_rss(p, d, rng);
    double w = 0, x = 0, y = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double dist = std::hypot(d.true_positions[i].x, d.true_positions[i].y);
      const double pw = -38.0 * std::log10(dist) + rss.shadowing[i];
      const double wi = pw > pmin ? pw - pmin : 0.0;
      w += wi;
      x += wi * d.measured_positions[i].x;
      y += wi * d.measured_positions[i].y;
    }
    sum_oracle += std::hypot(x / w, y / w);
    sum_lib += localization_error(wcl_estimate(d, rss, pmin), d.pu);
  }
  const double D = average_node_spacing(Disk{100}, 100);
  EXPECT_NEAR(sum_lib / trials / D, sum_oracle / trials / D, 0.1 * sum_oracle / trials / D);
  EXPECT_NEAR(sum_lib, sum_oracle, 1e-6 * sum_oracle);
}

TEST(Estimators, SelectParticipants) {
  const auto r = powers({1, 5, 3, 9, 7, 2, 8, 4, 6, 0});
  EXPECT_EQ(select_participants(r, 1.0).size(), 10u);
  EXPECT_EQ(select_participants(r, 0.3), (std::vector<NodeId>{3, 4, 6}));
  const auto eq = powers(std::vector<double>(9, 1.0));
  EXPECT_EQ(select_participants(eq, 0.5), (std::vector<NodeId>{0, 1, 2, 3, 4}));
  EXPECT_THROW(select_participants(r, 0.0), Error);
}

TEST(Estimators, NearStrongestUsesLinearPower) {
  // 0.85 in linear power is -0.7058 dB.
  const auto r = powers({-50.0, -50.7, -50.71, -60.0});
  const auto ids = all_nodes(4);
  EXPECT_EQ(select_near_strongest(r, 0.15, ids), (std::vector<NodeId>{0, 1}));
}

TEST(Estimators, CentroidExamples) {
  auto d = manual({{0, 0}, {2, 2}});
  const std::vector<NodeId> ids{0, 1};
  EXPECT_EQ(centroid_estimate(d, ids).position, (Point2{1, 1}));
  EXPECT_THROW(centroid_estimate(d, std::vector<NodeId>{}), Error);
}

TEST(Estimators, StrongestNode) {
  ChannelParams p;
  Rng rng(5);
  Deployment d = place_uniform_disk(100, 50, rng);
  d.pu = {13, -7};
  const auto rss = sample_rss(p, d, rng);
  const auto e = strongest_node_estimate(d, rss);
  double best = 1e9;
  for (const auto& pt : d.true_positions) best = std::min(best, distance(pt, d.pu));
  EXPECT_NEAR(distance(e.position, d.pu), best, 1e-12);
  auto one = manual({{3, 3}});
  EXPECT_EQ(strongest_node_estimate(one, powers({-1})).position, (Point2{3, 3}));
  auto tie = manual({{1, 0}, {2, 0}});
  EXPECT_EQ(strongest_node_estimate(tie, powers({-1, -1})).participants[0], 0u);
}

TEST(Estimators, LaterationExactWithoutNoise) {
  ChannelParams p;
  auto d = manual({{0, 0}, {50, 0}, {0, 40}, {30, 30}}, {12, 17});
  Rng rng(6);
  const auto rss = sample_rss(p, d, rng);
  const auto e = lateration_estimate(d, rss, p);
  EXPECT_NEAR(e.position.x, 12.0, 1e-9);
  EXPECT_NEAR(e.position.y, 17.0, 1e-9);
}

TEST(Estimators, LaterationPerturbedMatchesDirectSolve) {
  ChannelParams p;
  auto d = manual({{0, 0}, {50, 0}, {0, 40}}, {12, 17});
  Rng rng(7);
  auto rss = sample_rss(p, d, rng);
  // Inflate node 1's range by 10%.
  rss.powers[1] -= 10.0 * p.gamma * std::log10(1.1);
  const auto e = lateration_estimate(d, rss, p);
  // Three anchors: the 2x2 system solved by Cramer's rule.
  auto range = [&](int i) { return std::pow(10.0, -rss.powers[i] / (10.0 * p.gamma)); };
  const double r0 = range(0), r1 = range(1), r2 = range(2);
  const double a11 = 100, a12 = 0, a21 = 0, a22 = 80;
  const double b1 = r0 * r0 - r1 * r1 + 2500, b2 = r0 * r0 - r2 * r2 + 1600;
  const double det = a11 * a22 - a12 * a21;
  EXPECT_NEAR(e.position.x, (b1 * a22 - a12 * b2) / det, 1e-9);
  EXPECT_NEAR(e.position.y, (a11 * b2 - a21 * b1) / det, 1e-9);
  EXPECT_GT(distance(e.position, d.pu), 0.1);
}

TEST(Estimators, LaterationDegenerate) {
  ChannelParams p;
  auto d = manual({{0, 0}, {1, 0}, {2, 0}}, {5, 5});
  Rng rng(8);
  const auto rss = sample_rss(p, d, rng);
  try {
    lateration_estimate(d, rss, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_geometry);
  }
}

TEST(Estimators, ErrorMetric) {
  Estimate e;
  e.position = {3, 4};
  EXPECT_EQ(localization_error(e, {0, 0}), 5.0);
  e.position = {13, 24};
  EXPECT_EQ(localization_error(e, {10, 20}), 5.0);
}

TEST(Estimators, MethodNames) {
  for (auto m : {Method::cwcl, Method::dwcl, Method::centroid, Method::sn, Method::lateration}) {
    EXPECT_EQ(method_from_string(to_string(m)), m);
  }
  EXPECT_THROW(method_from_string("nope"), Error);
}
