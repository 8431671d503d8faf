#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "wcl/error.hpp"
#include "wcl/overhead.hpp"

using namespace wcl;

TEST(Overhead, LinkPowerExamples) {
  PowerModel m;
  const double pr = dbm_to_mw(-70.0);
  EXPECT_NEAR(link_tx_power(m, 1.0, 0.0), pr, 1e-20);
  EXPECT_NEAR(link_tx_power(m, 10.0, 0.0), pr * std::pow(10.0, 3.8), 1e-12 * pr * 1e4);
  EXPECT_NEAR(link_tx_power(m, 10.0, 10.0), link_tx_power(m, 10.0, 0.0) / 10.0, 1e-15);
  try {
    link_tx_power(m, 0.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::zero_distance);
  }
}

TEST(Overhead, DbmRoundTrip) {
  EXPECT_NEAR(dbm_to_mw(0.0), 1.0, 1e-15);
  EXPECT_NEAR(dbm_to_mw(-30.0), 1e-3, 1e-18);
  EXPECT_NEAR(mw_to_dbm(dbm_to_mw(-47.3)), -47.3, 1e-12);
}

TEST(Overhead, ShadowingFactor) {
  EXPECT_NEAR(shadowing_factor_closed(4.0), 1.5284, 2e-4);
  EXPECT_NEAR(shadowing_factor_closed(4.0), std::exp(0.5 * std::pow(0.4 * std::log(10.0), 2)), 1e-15);
  for (double s : {0.0, 1.0, 4.0, 8.0, 12.0}) {
    EXPECT_NEAR(shadowing_factor_quadrature(s), shadowing_factor_closed(s), 1e-9 * shadowing_factor_closed(s));
  }
}

TEST(Overhead, MeanDistancePower) {
  EXPECT_NEAR(mean_distance_power(100.0, 2.0), 5000.0, 1e-9);
  // Monte Carlo of d = R sqrt(U).
  Rng rng(1);
  double s = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) s += std::pow(100.0 * std::sqrt(rng.uniform()), 3.8);
  EXPECT_NEAR(mean_distance_power(100.0, 3.8), s / n, 0.01 * s / n);
}

TEST(Overhead, CwclExpectedPower) {
  PowerModel m;
  m.sigma_s = 0.0;
  m.gamma = 2.0;
  EXPECT_NEAR(cwcl_expected_power(m, 100.0, 50), 50 * dbm_to_mw(-70) * 5000.0, 1e-15);

  PowerModel g;
  Rng rng(2);
  const int n = 1000000;
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const double d = 100.0 * std::sqrt(rng.uniform());
    s += link_tx_power(g, std::max(d, 1e-9), rng.normal(0.0, g.sigma_s));
  }
  const double mc = 100.0 * s / n;
  EXPECT_NEAR(cwcl_expected_power(g, 100.0, 100), mc, 0.005 * mc);
}

TEST(Overhead, OpsAndMessageFormulas) {
  EXPECT_EQ(cwcl_ops(100), 2500.0);
  EXPECT_EQ(cwcl_ops(1), 25.0);
  EXPECT_EQ(cwcl_ops(200), 2.0 * cwcl_ops(100));
  EXPECT_THROW(cwcl_ops(0), Error);

  const auto mc = dwcl_message_count(25, 4, 6, 0.25);
  EXPECT_EQ(mc.first, 120.0);
  EXPECT_EQ(mc.second, 12.0);
  const auto z = dwcl_message_count(25, 4, 6, 0.0);
  EXPECT_EQ(z.first, 108.0);
  EXPECT_THROW(dwcl_message_count(25, 4, 6, 1.5), Error);

  EXPECT_EQ(dwcl_ops(100, 25, 4, 6, 0.25), 10168.0);
  EXPECT_NEAR(dwcl_ops(100, 25, 4, 6, 0.25) / cwcl_ops(100), 4.07, 0.01);
  EXPECT_EQ(dwcl_ops(100, 100, 1, 0, 0), 2700.0 + 44.0 + 2600.0);
}

TEST(Overhead, LedgerCountsBoundedByFormula) {
  Rng rng(3);
  auto d = place_uniform_square(1000, 1000, rng);
  d.pu = {210, -330};
  ChannelParams p;
  p.sigma_s = 4;
  const auto rss = sample_rss(p, d, rng);
  auto set = build_hex_clusters(d, 200);
  const auto res = run_dwcl(set, d, rss, DwclConfig{});
  const auto c = cluster_counts(set);
  const double l = static_cast<double>(c.l);
  // Realized eta: fraction of clusters doing the full neighbor comparison.
  const double eta = static_cast<double>(res.selection.full_checks) / l;
  // Probed clusters can have more neighbors than average; bound K by 6 for them.
  const auto formula = dwcl_message_count(c.m, l, 6.0, eta);
  EXPECT_LE(static_cast<double>(res.ledger.count_phase(1)), formula.first);
  EXPECT_LE(static_cast<double>(res.ledger.count_phase(2)), 2.0 * 6.0);
}

TEST(Overhead, LedgerPowerPricesEachMessage) {
  PowerModel m;
  m.sigma_s = 0.0;
  MessageLedger lg;
  lg.append({0, 1, MessageKind::report, 10.0, 1, 1});
  lg.append({1, 0, MessageKind::report, 0.2, 1, 1});
  Rng rng(4);
  const double pr = dbm_to_mw(-70);
  EXPECT_NEAR(ledger_power(m, lg, rng), pr * (std::pow(10.0, 3.8) + 1.0), 1e-15);

  Deployment d;
  d.true_positions = {{3, 4}, {0, 0}};
  EXPECT_NEAR(cwcl_ledger_power(m, d, rng), pr * (std::pow(5.0, 3.8) + 1.0), 1e-15);
}

TEST(Overhead, DwclExpectedPowerStructure) {
  PowerModel m;
  m.sigma_s = 0;
  const double pr = dbm_to_mw(-70);
  const double intra = 100 * pr * mean_distance_power(50, 3.8);
  EXPECT_NEAR(dwcl_expected_power(m, 50, 100, 4, 0, 0.5), intra, 1e-12 * intra);
  const double hop = pr * std::pow(std::sqrt(3.0) * 50, 3.8);
  EXPECT_NEAR(dwcl_expected_power(m, 50, 100, 4, 3, 0.5), intra + (8 + 12 + 6) * hop, 1e-12 * intra);
}

TEST(Overhead, CsvRow) {
  OverheadReport r{"s", "cwcl", 0, 100, 1.0, 0.01, 2500};
  std::ostringstream os;
  write_overhead_csv_header(os);
  write_overhead_csv_row(os, r);
  EXPECT_EQ(os.str(),
            "scenario,method,clusters,msg_count,total_power_dbm,per_node_power_dbm,ops\n"
            "s,cwcl,0,100,0,-20,2500\n");
}
