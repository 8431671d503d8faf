#pragma once

// Analytical error distribution of weighted centroid localization.
//
// Along one axis the estimate is a ratio a/b of two (approximately) jointly
// Gaussian sums, a = sum q_i x_i and b = sum q_i with q_i = P_i - P_min. The
// axis moments come either from the exact ratio density or from a
// second-order (Hayya) expansion; the two axes are joined through their
// cross correlation and the pdf of the error norm is evaluated in the
// decorrelated frame.
//
// All coordinates are taken relative to the PU, so the estimate moments are
// error moments directly.

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wcl/channel.hpp"
#include "wcl/estimators.hpp"
#include "wcl/placement.hpp"

namespace wcl {

enum class Axis { x, y };
enum class RatioMethod { quadrature, hayya };

const char* to_string(RatioMethod m);
RatioMethod ratio_method_from_string(const std::string& name);

/// First and second moments of a and b for one axis.
struct AxisSums {
  double m_a = 0.0;
  double sigma_a = 0.0;
  double m_b = 0.0;
  double sigma_b = 0.0;
};

struct RatioMoments {
  double mean = 0.0;
  double std = 0.0;
  double window_mass = 1.0;  // quadrature only: density mass inside the window
};

struct AxisErrorStats {
  AxisSums sums;
  double rho_ab = 0.0;
  double m_hat = 0.0;
  double sigma_hat = 0.0;
  RatioMethod method = RatioMethod::hayya;
};

/// mu_i = P0 - 10 gamma log10(|L_i - L_p| / d0) - P_min (true positions).
std::vector<double> mu_constants(const ChannelParams& params, const Deployment& dep, double pmin);

AxisSums axis_sum_stats_iid(const Deployment& dep, std::span<const double> mu, double sigma_s,
                            double sigma_l, Axis axis);
double rho_ab_iid(const Deployment& dep, std::span<const double> mu, double sigma_s, double sigma_l,
                  Axis axis);

AxisSums axis_sum_stats_correlated(const Deployment& dep, std::span<const double> mu, double sigma_s,
                                   double x_c, double sigma_l, Axis axis);
double rho_ab_correlated(const Deployment& dep, std::span<const double> mu, double sigma_s, double x_c,
                         double sigma_l, Axis axis);

/// Exact density of a/b for jointly Gaussian (a, b), i.e. the integral
/// f(z) = int |t| phi2(z t, t) dt evaluated in closed form.
double ratio_pdf(const AxisSums& s, double rho_ab, double z);

/// Mean and std of a/b by adaptive quadrature of ratio_pdf over the Hayya
/// estimate +/- 12 sigma. Requires m_b > 3 sigma_b.
RatioMoments ratio_moments_quadrature(const AxisSums& s, double rho_ab);

/// Second-order Taylor moments of a/b.
RatioMoments ratio_moments_hayya(const AxisSums& s, double rho_ab);

/// Full one-axis pipeline; dispatches on the channel's shadowing mode.
AxisErrorStats axis_error_stats(const ChannelParams& params, const Deployment& dep, double pmin, Axis axis,
                                RatioMethod method);

struct CrossAxisResult {
  double rho_xy = 0.0;          // closed form, clamped to [-1, 1]
  double rho_unclamped = 0.0;
  double e_xy = 0.0;            // E[x_hat y_hat], closed form
  double e_xy_guarded = 0.0;    // same expectation by quadrature with a 4-sigma guard
  double rho_guarded = 0.0;
  Eigen::Vector3d t_mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d omega_t = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d r = Eigen::Matrix3d::Zero();  // QR factor with nonnegative diagonal
};

/// Correlation between the x and y errors through the reduction of
/// (x^T q, y^T q, 1^T q) to a single standard normal variable.
CrossAxisResult cross_axis_correlation(const Deployment& dep, const ChannelParams& params, double pmin,
                                       double sigma_l, RatioMethod method = RatioMethod::hayya);

struct ErrorCovariance2D {
  Eigen::Matrix2d omega_L = Eigen::Matrix2d::Zero();
  double rho_xy = 0.0;
  Eigen::Matrix2d q = Eigen::Matrix2d::Identity();  // q * omega_L * q^T diagonal
  double m_x = 0.0;
  double m_y = 0.0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
};

ErrorCovariance2D decorrelate(const AxisErrorStats& x, const AxisErrorStats& y, double rho_xy);

struct ErrorPdf {
  std::vector<double> grid;     // m
  std::vector<double> density;  // 1/m
  double mean = 0.0;
  double std = 0.0;
  double integral = 0.0;
  bool fallback = false;        // numerical convolution path was used
};

/// Density of |e| for e ~ N((m1, m2), diag(s1^2, s2^2)) on `grid` by the
/// double Bessel series. Returns empty when the series does not converge
/// within the index caps or the parameters are outside its domain.
std::vector<double> norm_pdf_series(double m1, double s1, double m2, double s2, std::span<const double> grid);

/// Same density by convolving the two noncentral chi-square(1) densities of
/// the squared components, then changing variable to the norm.
std::vector<double> norm_pdf_convolution(double m1, double s1, double m2, double s2, std::span<const double> grid);

/// Density of the 2-D localization error norm.
ErrorPdf error_2d_distribution(const AxisErrorStats& x, const AxisErrorStats& y, double rho_xy);
ErrorPdf error_norm_distribution(const ErrorCovariance2D& cov);

/// Every stage of the analysis for one fixed placement.
struct PlacementAnalysis {
  AxisErrorStats x;
  AxisErrorStats y;
  CrossAxisResult cross;
  ErrorCovariance2D cov;
  ErrorPdf pdf;
  double pmin = 0.0;
  double spacing = 0.0;  // D
};

PlacementAnalysis analyze_placement(const Deployment& dep, const ChannelParams& params, double pmin,
                                    RatioMethod method);

struct TheoryScenario {
  DeploymentSpec deployment;
  ChannelParams channel;
  WclConfig wcl;
  RatioMethod method = RatioMethod::hayya;
};

struct PlacementAverage {
  double mean_err = 0.0;          // average of per-placement m_eL
  double mean_err_over_d = 0.0;
  double std_err = 0.0;           // average of per-placement sigma_eL
  double standard_error = 0.0;    // of mean_err across placements
  std::size_t placements = 0;
  std::size_t nodes = 0;          // realized N (a clipped lattice may hold fewer than requested)
  double spacing = 0.0;
};

PlacementAverage average_over_placements(const TheoryScenario& scenario, std::size_t n_placements, Rng& rng);

/// CSV row `scenario,N,sigma_s,x_c,sigma_l,mean_err_m,mean_err_over_D,std_err_m,method`.
void write_theory_csv_header(std::ostream& os);
void write_theory_csv_row(std::ostream& os, const std::string& scenario, const TheoryScenario& sc,
                          const PlacementAverage& avg);

}  // namespace wcl
