#pragma once

#include <iosfwd>
#include <string>
#include <utility>

#include "wcl/dwcl.hpp"
#include "wcl/rng.hpp"

namespace wcl {

/// Control-message link budget: the transmitter spends just enough to reach
/// the receiver sensitivity p_r_min through path loss and shadowing.
struct PowerModel {
  double p_r_min_dbm = -70.0;
  double gamma = 3.8;
  double d0 = 1.0;
  double sigma_s = 4.0;

  void validate() const;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// p_r_min(mW) (d/d0)^gamma 10^(-s/10).
double link_tx_power(const PowerModel& model, double distance, double shadow_db);

/// E[10^(-s/10)] for s ~ N(0, sigma^2): closed form and by quadrature of the
/// density of the factor itself.
double shadowing_factor_closed(double sigma_s);
double shadowing_factor_quadrature(double sigma_s);

/// E[(d/d0)^gamma] for d the distance of a uniform point in a disk of radius r.
double mean_distance_power(double r, double gamma, double d0 = 1.0);

double cwcl_expected_power(const PowerModel& model, double radius, std::size_t n);
double cwcl_ops(std::size_t n);

/// (M L + 2 L + 2 eta K L, 2 K).
std::pair<double, double> dwcl_message_count(double m, double l, double k, double eta);
/// (27N + 44L + 64KL + eta K L) + (34 K M + 26 M).
double dwcl_ops(double n, double m, double l, double k, double eta);

/// N members reporting inside disks of radius r_c plus the inter-head
/// messages of both phases at the adjacent-center distance sqrt(3) r_c.
double dwcl_expected_power(const PowerModel& model, double r_c, std::size_t n, double l, double k, double eta);

/// Sum of link_tx_power over the ledger, one fresh shadowing draw per entry.
/// Distances below d0 are charged at d0.
double ledger_power(const PowerModel& model, const MessageLedger& ledger, Rng& rng);

/// Every node reporting to a fusion center at the area origin.
double cwcl_ledger_power(const PowerModel& model, const Deployment& dep, Rng& rng);

struct OverheadReport {
  std::string scenario;
  std::string method;
  std::size_t clusters = 0;
  double msg_count = 0.0;
  double total_power_mw = 0.0;
  double per_node_power_mw = 0.0;  // total / N
  double ops = 0.0;

  double total_power_dbm() const { return mw_to_dbm(total_power_mw); }
  double per_node_power_dbm() const { return mw_to_dbm(per_node_power_mw); }
};

void write_overhead_csv_header(std::ostream& os);
void write_overhead_csv_row(std::ostream& os, const OverheadReport& r);

}  // namespace wcl
