#include <algorithm>
#include <cmath>

#include "wcl/error.hpp"
#include "wcl/theory.hpp"

namespace wcl {

const char* to_string(RatioMethod m) { return m == RatioMethod::hayya ? "hayya" : "quadrature"; }

RatioMethod ratio_method_from_string(const std::string& name) {
  if (name == "hayya") return RatioMethod::hayya;
  if (name == "quadrature") return RatioMethod::quadrature;
  throw Error(ErrorCode::config, "unknown ratio method '" + name + "'");
}

std::vector<double> mu_constants(const ChannelParams& params, const Deployment& dep, double pmin) {
  std::vector<double> mu(dep.size());
  for (std::size_t i = 0; i < dep.size(); ++i) {
    mu[i] = mean_received_power(params, distance(dep.true_positions[i], dep.pu)) - pmin;
  }
  return mu;
}

namespace {

// True coordinate along `axis`, relative to the PU.
std::vector<double> relative_coords(const Deployment& dep, Axis axis) {
  std::vector<double> c(dep.size());
  for (std::size_t i = 0; i < dep.size(); ++i) {
    const Point2 rel = dep.true_positions[i] - dep.pu;
    c[i] = axis == Axis::x ? rel.x : rel.y;
  }
  return c;
}

void check_mu(const Deployment& dep, std::span<const double> mu) {
  if (mu.size() != dep.size()) throw Error(ErrorCode::invalid_argument, "mu size does not match deployment");
  if (dep.size() == 0) throw Error(ErrorCode::invalid_argument, "empty deployment");
}

// Lambda_ij = exp(-|Li - Lj| / x_c) applied to a vector.
Eigen::MatrixXd correlation_matrix(const Deployment& dep, double x_c) {
  if (!(x_c > 0.0)) throw Error(ErrorCode::invalid_argument, "x_c must be positive");
  return shadowing_covariance(dep.true_positions, 1.0, x_c);
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

AxisSums axis_sum_stats_iid(const Deployment& dep, std::span<const double> mu, double sigma_s,
                            double sigma_l, Axis axis) {
  check_mu(dep, mu);
  const auto x = relative_coords(dep, axis);
  const double n = static_cast<double>(dep.size());
  const double ss2 = sigma_s * sigma_s;
  const double sl2 = sigma_l * sigma_l;
  AxisSums s;
  double var_a = n * sl2 * ss2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.m_b += mu[i];
    s.m_a += mu[i] * x[i];
    var_a += sl2 * mu[i] * mu[i] + ss2 * x[i] * x[i];
  }
  s.sigma_b = std::sqrt(n * ss2);
  s.sigma_a = std::sqrt(var_a);
  return s;
}

double rho_ab_iid(const Deployment& dep, std::span<const double> mu, double sigma_s, double sigma_l,
                  Axis axis) {
  check_mu(dep, mu);
  const auto x = relative_coords(dep, axis);
  const double n = static_cast<double>(dep.size());
  const double ss2 = sigma_s * sigma_s;
  const double sl2 = sigma_l * sigma_l;
  double sum_x = 0.0;
  double inner = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum_x += x[i];
    inner += sl2 * mu[i] * mu[i] + ss2 * x[i] * x[i];
  }
  const double den = std::sqrt(n * n * sl2 * ss2 + n * inner);
  if (!(den > 0.0)) return 0.0;
  // Signed sum: Cov(a, b) = sigma_s^2 sum x_i.
  return std::clamp(sigma_s * sum_x / den, -1.0, 1.0);
}

AxisSums axis_sum_stats_correlated(const Deployment& dep, std::span<const double> mu, double sigma_s,
                                   double x_c, double sigma_l, Axis axis) {
  check_mu(dep, mu);
  const auto xs = relative_coords(dep, axis);
  const auto x = as_vector(xs);
  const auto m = as_vector(mu);
  const Eigen::MatrixXd lambda = correlation_matrix(dep, x_c);
  const double n = static_cast<double>(dep.size());
  const double ss2 = sigma_s * sigma_s;
  const double sl2 = sigma_l * sigma_l;
  AxisSums s;
  s.m_b = m.sum();
  s.m_a = m.dot(x);
  s.sigma_b = std::sqrt(ss2 * lambda.sum());
  // Off-diagonal x_i x_j sigma_s^2 lambda_ij; diagonal sigma_s^2 (x_i^2 +
  // sigma_l^2) + sigma_l^2 mu_i^2 (the last term is the random-position
  // contribution to Var(q_i x_i), matching the i.i.d. case).
  const double var_a = ss2 * (x.dot(lambda * x) + n * sl2) + sl2 * m.squaredNorm();
  s.sigma_a = std::sqrt(var_a);
  return s;
}

double rho_ab_correlated(const Deployment& dep, std::span<const double> mu, double sigma_s, double x_c,
                         double sigma_l, Axis axis) {
  check_mu(dep, mu);
  if (sigma_s == 0.0) return 0.0;
  const auto xs = relative_coords(dep, axis);
  const auto x = as_vector(xs);
  const auto m = as_vector(mu);
  const Eigen::MatrixXd lambda = correlation_matrix(dep, x_c);
  const double n = static_cast<double>(dep.size());
  const double sl2 = sigma_l * sigma_l;
  const double ss2 = sigma_s * sigma_s;
  const double num = lambda.colwise().sum().dot(x);  // 1^T Lambda x
  const double quad = x.dot(lambda * x) + n * sl2 + sl2 * m.squaredNorm() / ss2;
  const double den = std::sqrt(quad * lambda.sum());
  if (!(den > 0.0)) return 0.0;
  return std::clamp(num / den, -1.0, 1.0);
}

AxisErrorStats axis_error_stats(const ChannelParams& params, const Deployment& dep, double pmin, Axis axis,
                                RatioMethod method) {
  const auto mu = mu_constants(params, dep, pmin);
  AxisErrorStats out;
  out.method = method;
  if (params.mode == ShadowingMode::iid) {
    out.sums = axis_sum_stats_iid(dep, mu, params.sigma_s, dep.sigma_l, axis);
    out.rho_ab = rho_ab_iid(dep, mu, params.sigma_s, dep.sigma_l, axis);
  } else {
    out.sums = axis_sum_stats_correlated(dep, mu, params.sigma_s, params.x_c, dep.sigma_l, axis);
    out.rho_ab = rho_ab_correlated(dep, mu, params.sigma_s, params.x_c, dep.sigma_l, axis);
  }
  const RatioMoments mom = method == RatioMethod::hayya ? ratio_moments_hayya(out.sums, out.rho_ab)
                                                        : ratio_moments_quadrature(out.sums, out.rho_ab);
  out.m_hat = mom.mean;
  out.sigma_hat = mom.std;
  return out;
}

}  // namespace wcl
