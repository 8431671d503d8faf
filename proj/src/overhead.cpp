#include "wcl/overhead.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <ostream>

#include "wcl/error.hpp"

namespace wcl {

void PowerModel::validate() const {
  if (!(gamma > 0.0)) throw Error(ErrorCode::invalid_argument, "power model gamma must be positive");
  if (!(d0 > 0.0)) throw Error(ErrorCode::invalid_argument, "power model d0 must be positive");
  if (!(sigma_s >= 0.0)) throw Error(ErrorCode::invalid_argument, "power model sigma_s must be nonnegative");
  if (!std::isfinite(p_r_min_dbm)) throw Error(ErrorCode::invalid_argument, "p_r_min must be finite");
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double link_tx_power(const PowerModel& model, double distance, double shadow_db) {
  if (!(distance > 0.0)) throw Error(ErrorCode::zero_distance, "link power undefined at zero distance");
  return dbm_to_mw(model.p_r_min_dbm) * std::pow(distance / model.d0, model.gamma) *
         std::pow(10.0, -shadow_db / 10.0);
}

double shadowing_factor_closed(double sigma_s) {
  const double k = std::numbers::ln10 / 10.0;
  return std::exp(0.5 * sigma_s * sigma_s * k * k);
}

double shadowing_factor_quadrature(double sigma_s) {
  if (sigma_s == 0.0) return 1.0;
  if (!(sigma_s > 0.0)) throw Error(ErrorCode::invalid_argument, "sigma_s must be nonnegative");
  // Density of x = 10^(-s/10): f(x) = 10 / (x sigma ln10 sqrt(2 pi))
  // exp(-(10 log10 x)^2 / (2 sigma^2)). Integrate x f(x) dx over x = 10^u.
  const double ln10 = std::numbers::ln10;
  auto density = [&](double x) {
    const double db = 10.0 * std::log10(x);
    return 10.0 / (x * sigma_s * ln10 * std::sqrt(2.0 * std::numbers::pi)) *
           std::exp(-db * db / (2.0 * sigma_s * sigma_s));
  };
  auto integrand = [&](double u) {
    const double x = std::pow(10.0, u);
    return x * density(x) * ln10 * x;
  };
  // The integrand is a Gaussian in u centred at sigma^2 ln10 / 100.
  const double su = sigma_s / 10.0;
  const double centre = su * su * ln10;
  double err = 0.0;
  double l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, centre - 40.0 * su, centre + 40.0 * su, 15, 1e-13, &err, &l1);
  if (!(err <= 1e-9 * l1)) {
    throw Error(ErrorCode::quadrature_failed, "shadowing factor quadrature error " + std::to_string(err));
  }
  return v;
}

double mean_distance_power(double r, double gamma, double d0) {
  if (!(gamma > -2.0)) throw Error(ErrorCode::invalid_argument, "gamma must exceed -2");
  return std::pow(r / d0, gamma) / (gamma / 2.0 + 1.0);
}

namespace {

double checked_factor(double sigma_s) {
  const double closed = shadowing_factor_closed(sigma_s);
  const double quad = shadowing_factor_quadrature(sigma_s);
  if (std::abs(closed - quad) > 1e-6 * closed) {
    throw Error(ErrorCode::quadrature_failed, "shadowing factor quadrature disagrees with the closed form");
  }
  return closed;
}

}  // namespace

double cwcl_expected_power(const PowerModel& model, double radius, std::size_t n) {
  model.validate();
  return static_cast<double>(n) * dbm_to_mw(model.p_r_min_dbm) * mean_distance_power(radius, model.gamma, model.d0) *
         checked_factor(model.sigma_s);
}

double cwcl_ops(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "cwcl_ops needs N >= 1");
  return 25.0 * static_cast<double>(n);
}

std::pair<double, double> dwcl_message_count(double m, double l, double k, double eta) {
  if (m < 0.0 || l < 0.0 || k < 0.0) throw Error(ErrorCode::invalid_argument, "counts must be nonnegative");
  if (eta < 0.0 || eta > 1.0) throw Error(ErrorCode::invalid_argument, "eta must lie in [0, 1]");
  return {m * l + 2.0 * l + 2.0 * eta * k * l, 2.0 * k};
}

double dwcl_ops(double n, double m, double l, double k, double eta) {
  if (n < 0.0 || m < 0.0 || l < 0.0 || k < 0.0) throw Error(ErrorCode::invalid_argument, "counts must be nonnegative");
  if (eta < 0.0 || eta > 1.0) throw Error(ErrorCode::invalid_argument, "eta must lie in [0, 1]");
  return (27.0 * n + 44.0 * l + 64.0 * k * l + eta * k * l) + (34.0 * k * m + 26.0 * m);
}

double dwcl_expected_power(const PowerModel& model, double r_c, std::size_t n, double l, double k, double eta) {
  model.validate();
  const double p = dbm_to_mw(model.p_r_min_dbm);
  const double factor = checked_factor(model.sigma_s);
  const double intra = static_cast<double>(n) * p * mean_distance_power(r_c, model.gamma, model.d0) * factor;
  const double hops = k > 0.0 ? 2.0 * l + 2.0 * eta * k * l + 2.0 * k : 0.0;
  const double inter = hops * p * std::pow(std::sqrt(3.0) * r_c / model.d0, model.gamma) * factor;
  return intra + inter;
}

double ledger_power(const PowerModel& model, const MessageLedger& ledger, Rng& rng) {
  double total = 0.0;
  for (const auto& m : ledger.entries()) {
    total += link_tx_power(model, std::max(m.distance, model.d0), rng.normal(0.0, model.sigma_s));
  }
  return total;
}

double cwcl_ledger_power(const PowerModel& model, const Deployment& dep, Rng& rng) {
  double total = 0.0;
  for (const auto& p : dep.true_positions) {
    total += link_tx_power(model, std::max(norm(p), model.d0), rng.normal(0.0, model.sigma_s));
  }
  return total;
}

void write_overhead_csv_header(std::ostream& os) {
  os << "scenario,method,clusters,msg_count,total_power_dbm,per_node_power_dbm,ops\n";
}

void write_overhead_csv_row(std::ostream& os, const OverheadReport& r) {
  const auto old_precision = os.precision(10);
  os << r.scenario << ',' << r.method << ',' << r.clusters << ',' << r.msg_count << ',' << r.total_power_dbm() << ','
     << r.per_node_power_dbm() << ',' << r.ops << '\n';
  os.precision(old_precision);
}

}  // namespace wcl
