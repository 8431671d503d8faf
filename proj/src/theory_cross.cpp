#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "wcl/error.hpp"
#include "wcl/theory.hpp"

namespace wcl {

namespace {

double std_normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }

Eigen::Matrix3d symmetric_sqrt(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  Eigen::Vector3d ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  if (ev.minCoeff() < -1e-9 * scale) throw Error(ErrorCode::not_psd, "reduced covariance is not positive semidefinite");
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

CrossAxisResult cross_axis_correlation(const Deployment& dep, const ChannelParams& params, double pmin,
                                       double sigma_l, RatioMethod method) {
  const std::size_t n = dep.size();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "empty deployment");
  const auto mu_v = mu_constants(params, dep, pmin);
  const Eigen::Map<const Eigen::VectorXd> mu(mu_v.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 rel = dep.true_positions[i] - dep.pu;
    xs[i] = rel.x;
    ys[i] = rel.y;
  }

  const double ss2 = params.sigma_s * params.sigma_s;
  Eigen::MatrixXd omega;
  if (params.mode == ShadowingMode::correlated) {
    omega = shadowing_covariance(dep.true_positions, params.sigma_s, params.x_c);
  } else {
    omega = ss2 * Eigen::MatrixXd::Identity(n, n);
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  AxisErrorStats ax, ay;
  ax.method = ay.method = method;
  if (params.mode == ShadowingMode::iid) {
    ax.sums = axis_sum_stats_iid(dep, mu_v, params.sigma_s, sigma_l, Axis::x);
    ay.sums = axis_sum_stats_iid(dep, mu_v, params.sigma_s, sigma_l, Axis::y);
    ax.rho_ab = rho_ab_iid(dep, mu_v, params.sigma_s, sigma_l, Axis::x);
    ay.rho_ab = rho_ab_iid(dep, mu_v, params.sigma_s, sigma_l, Axis::y);
  } else {
    ax.sums = axis_sum_stats_correlated(dep, mu_v, params.sigma_s, params.x_c, sigma_l, Axis::x);
    ay.sums = axis_sum_stats_correlated(dep, mu_v, params.sigma_s, params.x_c, sigma_l, Axis::y);
    ax.rho_ab = rho_ab_correlated(dep, mu_v, params.sigma_s, params.x_c, sigma_l, Axis::x);
    ay.rho_ab = rho_ab_correlated(dep, mu_v, params.sigma_s, params.x_c, sigma_l, Axis::y);
  }
  auto moments = [&](const AxisErrorStats& s) {
    return method == RatioMethod::hayya ? ratio_moments_hayya(s.sums, s.rho_ab)
                                        : ratio_moments_quadrature(s.sums, s.rho_ab);
  };
  const RatioMoments mx = moments(ax);
  const RatioMoments my = moments(ay);

  CrossAxisResult out;
  out.t_mean = {mu.dot(xs), mu.dot(ys), mu.sum()};
  Eigen::Matrix3d& w = out.omega_t;
  w(0, 0) = ax.sums.sigma_a * ax.sums.sigma_a;
  w(1, 1) = ay.sums.sigma_a * ay.sums.sigma_a;
  w(2, 2) = ones.dot(omega * ones);
  w(0, 1) = w(1, 0) = xs.dot(omega * ys);
  w(0, 2) = w(2, 0) = xs.dot(omega * ones);
  w(1, 2) = w(2, 1) = ys.dot(omega * ones);

  const Eigen::Matrix3d root = symmetric_sqrt(w);
  // t_k = m_k + omega_k^T z. Order the columns so the denominator loads on
  // the first rotated coordinate only.
  Eigen::Matrix3d a;
  a.col(0) = root.col(2);
  a.col(1) = root.col(0);
  a.col(2) = root.col(1);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
  Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 3; ++i) {
    if (r(i, i) < 0.0) r.row(i) *= -1.0;
  }
  out.r = r;
  const double r11 = r(0, 0);
  if (std::abs(r11) < 1e-12) throw Error(ErrorCode::degenerate_reduction, "degenerate reduction: r11 is zero");

  const double m1 = out.t_mean[0];
  const double m2 = out.t_mean[1];
  const double m3 = out.t_mean[2];
  const double p = r(0, 1) * r(0, 2);
  const double s = m1 * r(0, 2) + m2 * r(0, 1);
  const double t = m1 * m2 + r(1, 1) * r(1, 2);
  const double c = m3 / r11;
  out.e_xy = (t - p + s / c) / (r11 * r11 * (1.0 + c * c));

  // E[(p w^2 + s w + t) / (w + c)^2] with w standard normal, truncated away
  // from the pole.
  const double g = std::min(4.0, 0.75 * std::abs(c));
  if (g > 0.0) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double u) {
      const double d = u + c;
      return std_normal_pdf(u) * (p * u * u + s * u + t) / (d * d);
    };
    const double num = gauss_kronrod<double, 61>::integrate(f, -g, g, 15, 1e-12);
    const double mass = std::erf(g / std::numbers::sqrt2);
    out.e_xy_guarded = num / mass / (r11 * r11);
  }

  const double sxy = mx.std * my.std;
  if (sxy > 0.0) {
    out.rho_unclamped = (out.e_xy - mx.mean * my.mean) / sxy;
    out.rho_guarded = std::clamp((out.e_xy_guarded - mx.mean * my.mean) / sxy, -1.0, 1.0);
  }
  out.rho_xy = std::clamp(out.rho_unclamped, -1.0, 1.0);
  return out;
}

}  // namespace wcl
