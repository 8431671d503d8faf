#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "wcl/error.hpp"
#include "wcl/theory.hpp"

using namespace wcl;

namespace {

Deployment small_layout(Point2 pu) {
  Deployment d;
  d.true_positions = {{-30, -20}, {10, -35}, {40, 5}, {-5, 25}, {20, 30}, {-35, 10}};
  d.measured_positions = d.true_positions;
  d.pu = pu;
  d.area = Disk{60};
  return d;
}

// Brute-force a = sum q_i x_i, b = sum q_i with q_i = mu_i + s_i and noisy x.
struct McSums {
  double ma = 0, sa = 0, mb = 0, sb = 0, rho = 0;
};

McSums monte_carlo_sums(const Deployment& d, const std::vector<double>& mu, const Eigen::MatrixXd& cov,
                        double sigma_l, int draws) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const Eigen::MatrixXd L = llt.matrixL();
  Rng rng(99);
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int k = 0; k < draws; ++k) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
    const Eigen::VectorXd s = L * z;
    double a = 0, b = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = d.true_positions[i].x - d.pu.x + rng.normal(0, sigma_l);
      const double q = mu[i] + s[i];
      a += q * x;
      b += q;
    }
    sa += a; sb += b; saa += a * a; sbb += b * b; sab += a * b;
  }
  McSums r;
  r.ma = sa / draws;
  r.mb = sb / draws;
  r.sa = std::sqrt(saa / draws - r.ma * r.ma);
  r.sb = std::sqrt(sbb / draws - r.mb * r.mb);
  r.rho = (sab / draws - r.ma * r.mb) / (r.sa * r.sb);
  return r;
}

double direct_ratio_pdf(const AxisSums& s, double rho, double z) {
  // f(z) = int |t| phi2(z t, t) dt by brute quadrature.
  const double k = 1.0 - rho * rho;
  auto phi2 = [&](double a, double b) {
    const double u = (a - s.m_a) / s.sigma_a;
    const double v = (b - s.m_b) / s.sigma_b;
    return std::exp(-(u * u - 2 * rho * u * v + v * v) / (2 * k)) /
           (2 * std::numbers::pi * s.sigma_a * s.sigma_b * std::sqrt(k));
  };
  using boost::math::quadrature::gauss_kronrod;
  const double lo = s.m_b - 40 * s.sigma_b, hi = s.m_b + 40 * s.sigma_b;
  auto f = [&](double t) { return std::abs(t) * phi2(z * t, t); };
  double v = gauss_kronrod<double, 61>::integrate(f, lo, std::min(0.0, hi), 20, 1e-13);
  v += gauss_kronrod<double, 61>::integrate(f, std::max(0.0, lo), hi, 20, 1e-13);
  return v;
}

}  // namespace

TEST(Theory, IidAxisSumsMatchMonteCarlo) {
  ChannelParams p;
  p.sigma_s = 6.0;
  const auto d = small_layout({3, -4});
  const auto mu = mu_constants(p, d, -80.0);
  const double sl = 2.0;
  const auto s = axis_sum_stats_iid(d, mu, p.sigma_s, sl, Axis::x);
  const double rho = rho_ab_iid(d, mu, p.sigma_s, sl, Axis::x);
  const Eigen::MatrixXd cov = 36.0 * Eigen::MatrixXd::Identity(6, 6);
  const auto mc = monte_carlo_sums(d, mu, cov, sl, 200000);
  EXPECT_NEAR(s.m_a, mc.ma, 0.01 * std::abs(mc.ma) + 5 * mc.sa / std::sqrt(2e5));
  EXPECT_NEAR(s.m_b, mc.mb, 0.002 * mc.mb);
  EXPECT_NEAR(s.sigma_a, mc.sa, 0.01 * mc.sa);
  EXPECT_NEAR(s.sigma_b, mc.sb, 0.01 * mc.sb);
  EXPECT_NEAR(rho, mc.rho, 0.01);
}

TEST(Theory, CorrelatedAxisSumsMatchMonteCarlo) {
  ChannelParams p;
  p.sigma_s = 5.0;
  const auto d = small_layout({-2, 6});
  const auto mu = mu_constants(p, d, -80.0);
  const double xc = 30.0, sl = 1.5;
  const auto s = axis_sum_stats_correlated(d, mu, p.sigma_s, xc, sl, Axis::x);
  const double rho = rho_ab_correlated(d, mu, p.sigma_s, xc, sl, Axis::x);
  const auto cov = shadowing_covariance(d.true_positions, p.sigma_s, xc);
  const auto mc = monte_carlo_sums(d, mu, cov, sl, 200000);
  EXPECT_NEAR(s.m_b, mc.mb, 0.002 * mc.mb);
  EXPECT_NEAR(s.sigma_a, mc.sa, 0.01 * mc.sa);
  EXPECT_NEAR(s.sigma_b, mc.sb, 0.01 * mc.sb);
  EXPECT_NEAR(rho, mc.rho, 0.01);
}

TEST(Theory, CorrelatedReducesToIidAsCorrelationVanishes) {
  ChannelParams p;
  const auto d = small_layout({1, 1});
  const auto mu = mu_constants(p, d, -80.0);
  const auto a = axis_sum_stats_iid(d, mu, 4.0, 1.0, Axis::y);
  const auto b = axis_sum_stats_correlated(d, mu, 4.0, 1e-6, 1.0, Axis::y);
  EXPECT_NEAR(a.sigma_a, b.sigma_a, 1e-9 * a.sigma_a);
  EXPECT_NEAR(a.sigma_b, b.sigma_b, 1e-9 * a.sigma_b);
  EXPECT_NEAR(rho_ab_iid(d, mu, 4.0, 1.0, Axis::y), rho_ab_correlated(d, mu, 4.0, 1e-6, 1.0, Axis::y), 1e-9);
}

TEST(Theory, RatioPdfMatchesDirectIntegral) {
  const AxisSums s{30.0, 50.0, 200.0, 40.0};
  for (double rho : {-0.6, 0.0, 0.3, 0.9}) {
    for (double z : {-1.0, -0.2, 0.0, 0.15, 0.6, 2.0}) {
      const double ref = direct_ratio_pdf(s, rho, z);
      EXPECT_NEAR(ratio_pdf(s, rho, z), ref, 1e-9 * std::max(ref, 1e-6)) << rho << ' ' << z;
    }
  }
}

TEST(Theory, RatioPdfIntegratesToOne) {
  const AxisSums s{-10.0, 20.0, 100.0, 10.0};
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double z) { return ratio_pdf(s, 0.4, z); };
  const double mass = gauss_kronrod<double, 61>::integrate(f, -3.0, 3.0, 20, 1e-12);
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(Theory, RatioPdfDegenerateCases) {
  AxisSums s{10.0, 2.0, 5.0, 0.0};
  // b fixed: a/b ~ N(2, (2/5)^2).
  const double z = 2.3;
  const double sd = 0.4;
  EXPECT_NEAR(ratio_pdf(s, 0, z),
              std::exp(-0.5 * std::pow((z - 2) / sd, 2)) / (sd * std::sqrt(2 * std::numbers::pi)), 1e-12);
  s = {0.0, 0.0, 5.0, 0.0};
  EXPECT_THROW(ratio_pdf(s, 0, 1.0), Error);
}

TEST(Theory, HayyaMatchesQuadratureForTightDenominator) {
  const AxisSums s{40.0, 60.0, 2000.0, 50.0};
  const auto h = ratio_moments_hayya(s, 0.2);
  const auto q = ratio_moments_quadrature(s, 0.2);
  EXPECT_NEAR(h.mean, q.mean, 1e-4);
  EXPECT_NEAR(h.std, q.std, 1e-3 * q.std);
  EXPECT_NEAR(q.window_mass, 1.0, 1e-9);
}

TEST(Theory, QuadratureMomentsMatchMonteCarlo) {
  const AxisSums s{50.0, 80.0, 300.0, 60.0};
  const double rho = -0.3;
  const auto q = ratio_moments_quadrature(s, rho);
  Rng rng(11);
  double sum = 0, sq = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.normal(), v = rng.normal();
    const double a = s.m_a + s.sigma_a * u;
    const double b = s.m_b + s.sigma_b * (rho * u + std::sqrt(1 - rho * rho) * v);
    const double r = a / b;
    sum += r;
    sq += r * r;
  }
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(q.mean, mean, 5 * sd / std::sqrt(n));
  EXPECT_NEAR(q.std, sd, 0.02 * sd);
}

TEST(Theory, QuadratureRejectsSignIndefiniteDenominator) {
  const AxisSums s{1.0, 1.0, 2.0, 1.0};
  try {
    ratio_moments_quadrature(s, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::denominator_not_sign_definite);
  }
}

TEST(Theory, ConvolutionMatchesRice) {
  // Equal variances: the norm is Rice distributed.
  const double m1 = 1.2, m2 = -0.7, s = 0.8;
  const double nu = std::hypot(m1, m2);
  std::vector<double> grid;
  for (double r = 0.05; r < 5.0; r += 0.35) grid.push_back(r);
  const auto f = norm_pdf_convolution(m1, s, m2, s, grid);
  ASSERT_EQ(f.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double rice = r / (s * s) * std::exp(-(r * r + nu * nu) / (2 * s * s)) *
                        boost::math::cyl_bessel_i(0, r * nu / (s * s));
    EXPECT_NEAR(f[i], rice, 1e-8) << r;
  }
}

TEST(Theory, ConvolutionMatchesZeroMeanClosedForm) {
  // m = 0: f(r) = r/(s1 s2) exp(-r^2 (1/s1^2 + 1/s2^2)/4) I0(r^2 (1/s2^2 - 1/s1^2)/4).
  const double s1 = 0.5, s2 = 2.0;
  std::vector<double> grid{0.1, 0.4, 1.0, 2.5, 5.0};
  const auto f = norm_pdf_convolution(0, s1, 0, s2, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double a = 1 / (s1 * s1), b = 1 / (s2 * s2);
    const double ref = r / (s1 * s2) * std::exp(-r * r * (a + b) / 4) *
                       boost::math::cyl_bessel_i(0, r * r * (a - b) / 4);
    EXPECT_NEAR(f[i], ref, 1e-8 * std::max(1.0, ref));
  }
}

TEST(Theory, SeriesAgreesWithConvolution) {
  std::vector<double> grid;
  for (double r = 0.02; r < 8.0; r += 0.13) grid.push_back(r);
  for (auto [m1, s1, m2, s2] : {std::array<double, 4>{1.0, 0.5, 0.5, 1.0},
                                std::array<double, 4>{2.0, 1.0, -1.0, 1.5},
                                std::array<double, 4>{0.3, 0.8, 0.2, 1.1}}) {
    const auto a = norm_pdf_series(m1, s1, m2, s2, grid);
    const auto b = norm_pdf_convolution(m1, s1, m2, s2, grid);
    ASSERT_EQ(a.size(), grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-8) << grid[i];
  }
}

TEST(Theory, ErrorNormMatchesMonteCarlo) {
  ErrorCovariance2D c;
  c.m_x = 1.5;
  c.m_y = -0.5;
  c.sigma_x = 0.4;
  c.sigma_y = 1.3;
  const auto pdf = error_norm_distribution(c);
  EXPECT_NEAR(pdf.integral, 1.0, 1e-3);
  Rng rng(12);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double r = std::hypot(rng.normal(c.m_x, c.sigma_x), rng.normal(c.m_y, c.sigma_y));
    sum += r;
    sq += r * r;
  }
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(pdf.mean, mean, 5 * sd / std::sqrt(n));
  EXPECT_NEAR(pdf.std, sd, 0.01 * sd);
}

TEST(Theory, ErrorNormDeterministic) {
  ErrorCovariance2D c;
  c.m_x = 3;
  c.m_y = 4;
  const auto pdf = error_norm_distribution(c);
  EXPECT_EQ(pdf.mean, 5.0);
  EXPECT_EQ(pdf.std, 0.0);
}

TEST(Theory, DecorrelateDiagonalizes) {
  AxisErrorStats x, y;
  x.m_hat = 1.0;
  x.sigma_hat = 2.0;
  y.m_hat = -0.5;
  y.sigma_hat = 1.0;
  const auto c = decorrelate(x, y, 0.6);
  const Eigen::Matrix2d d = c.q * c.omega_L * c.q.transpose();
  EXPECT_NEAR(d(0, 1), 0.0, 1e-12);
  EXPECT_LE(c.sigma_x, c.sigma_y);
  EXPECT_NEAR(c.sigma_x * c.sigma_x + c.sigma_y * c.sigma_y, 5.0, 1e-12);
  EXPECT_NEAR(std::hypot(c.m_x, c.m_y), std::hypot(1.0, -0.5), 1e-12);
}

TEST(Theory, CrossAxisReductionIsConsistent) {
  ChannelParams p;
  p.sigma_s = 5.0;
  const auto d = small_layout({4, -3});
  const auto cr = cross_axis_correlation(d, p, -80.0, 0.0);
  // The triangular factor reproduces the reordered covariance.
  Eigen::Matrix3d perm;
  perm << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  const Eigen::Matrix3d reordered = perm * cr.omega_t * perm.transpose();
  EXPECT_NEAR((cr.r.transpose() * cr.r - reordered).norm(), 0.0, 1e-8 * reordered.norm());
  for (int i = 0; i < 3; ++i) EXPECT_GE(cr.r(i, i), 0.0);
  EXPECT_LE(std::abs(cr.rho_xy), 1.0);
}

TEST(Theory, SymmetricGridHasNoCrossCorrelation) {
  ChannelParams p;
  p.sigma_s = 4.0;
  const auto d = place_fixed_grid(100, 100);
  const double pmin = compute_pmin(p, 100, WclConfig{});
  const auto a = analyze_placement(d, p, pmin, RatioMethod::hayya);
  EXPECT_NEAR(a.cross.omega_t(0, 1), 0.0, 1e-6 * a.cross.omega_t(0, 0));
  EXPECT_NEAR(a.x.m_hat, 0.0, 1e-9);
  EXPECT_NEAR(a.x.sigma_hat, a.y.sigma_hat, 1e-9 * a.x.sigma_hat);
}

TEST(Theory, PlacementMatchesSimulation) {
  ChannelParams p;
  p.sigma_s = 4.0;
  Rng lay(13);
  auto d = place_uniform_disk(100, 100, lay);
  d.pu = {10, -5};
  const double pmin = compute_pmin(p, 100, WclConfig{});
  const auto a = analyze_placement(d, p, pmin, RatioMethod::quadrature);
  Rng rng(14);
  double sum = 0;
  const int n = 4000;
  double sq = 0;
  for (int t = 0; t < n; ++t) {
    const double e = localization_error(wcl_estimate(d, sample_rss(p, d, rng), pmin), d.pu);
    sum += e;
    sq += e * e;
  }
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(a.pdf.mean, mean, 0.05 * mean + 3 * sd / std::sqrt(n));
}

TEST(Theory, AverageOverPlacements) {
  TheoryScenario sc;
  sc.channel.sigma_s = 4.0;
  sc.deployment.n = 100;
  Rng rng(1);
  const auto fixed = average_over_placements(sc, 20, rng);
  EXPECT_EQ(fixed.placements, 1u);
  EXPECT_EQ(fixed.nodes, 96u);
  sc.deployment.kind = PlacementKind::random_grid;
  Rng r1(5), r2(5);
  const auto a = average_over_placements(sc, 5, r1);
  const auto b = average_over_placements(sc, 5, r2);
  EXPECT_EQ(a.placements, 5u);
  EXPECT_EQ(a.mean_err, b.mean_err);
  EXPECT_GT(a.mean_err, fixed.mean_err);
  EXPECT_NEAR(a.mean_err_over_d, a.mean_err / a.spacing, 1e-12);
}

TEST(Theory, MethodNames) {
  EXPECT_EQ(ratio_method_from_string("hayya"), RatioMethod::hayya);
  EXPECT_EQ(ratio_method_from_string(to_string(RatioMethod::quadrature)), RatioMethod::quadrature);
  EXPECT_THROW(ratio_method_from_string("x"), Error);
}
