#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "wcl/error.hpp"
#include "wcl/theory.hpp"

namespace wcl {

namespace {

constexpr std::size_t kGridPoints = 4097;
constexpr int kMaxIndex = 800;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(I_0(z) e^{-z})
double log_scaled_i0(double z) {
  if (z <= 700.0) return std::log(boost::math::cyl_bessel_i(0, z)) - z;
  const double u = 1.0 / z;
  return -0.5 * std::log(2.0 * std::numbers::pi * z) +
         std::log(1.0 + u / 8.0 + 9.0 * u * u / 128.0 + 225.0 * u * u * u / 3072.0);
}

// log(I_k(z) e^{-z}) for k = 0..kmax via backward recurrence on the ratios
// I_{k+1}/I_k, seeded with the uniform asymptotic ratio.
void log_scaled_bessel(double z, int kmax, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(kmax) + 1, kNegInf);
  if (z <= 0.0) {
    out[0] = 0.0;
    return;
  }
  // The ratio recurrence only forgets its seed once it starts well above z.
  const int top = kmax + 50 + static_cast<int>(std::ceil(2.0 * z));
  double ratio = z / (top + std::sqrt(double(top) * top + z * z));
  std::vector<double> ratios(static_cast<std::size_t>(kmax) + 1);
  for (int k = top; k >= 1; --k) {
    ratio = z / (2.0 * k + z * ratio);  // now I_k / I_{k-1}
    if (k - 1 <= kmax) ratios[static_cast<std::size_t>(k - 1)] = ratio;
  }
  out[0] = log_scaled_i0(z);
  for (int k = 1; k <= kmax; ++k) out[k] = out[k - 1] + std::log(ratios[k - 1]);
}

struct SeriesCoefficients {
  std::vector<double> log_c;  // log C_k, k = 0..kMaxIndex
};

SeriesCoefficients series_coefficients(double beta_i, double beta_l) {
  std::vector<double> lg_fact(kMaxIndex + 1), lg_half(kMaxIndex + 1);
  for (int j = 0; j <= kMaxIndex; ++j) {
    lg_fact[j] = std::lgamma(j + 1.0);
    lg_half[j] = std::lgamma(j + 0.5);
  }
  const double lbi = std::log(beta_i);
  const double lbl = beta_l > 0.0 ? std::log(beta_l) : kNegInf;
  SeriesCoefficients sc;
  sc.log_c.resize(kMaxIndex + 1);
  for (int k = 0; k <= kMaxIndex; ++k) {
    double acc = kNegInf;
    const int l_hi = beta_l > 0.0 ? k : 0;
    for (int l = 0; l <= l_hi; ++l) {
      const double term = (l > 0 ? l * lbl : 0.0) - lg_fact[l] - lg_half[l] + (k - l) * lbi - lg_fact[k - l];
      acc = log_add(acc, term);
    }
    sc.log_c[k] = lg_half[k] + acc;
  }
  return sc;
}

double std_normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }

void summarize(ErrorPdf& pdf) {
  const auto& v = pdf.grid;
  const auto& p = pdf.density;
  double mass = 0.0, first = 0.0, second = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double h = v[i] - v[i - 1];
    mass += 0.5 * h * (p[i] + p[i - 1]);
    first += 0.5 * h * (v[i] * p[i] + v[i - 1] * p[i - 1]);
    second += 0.5 * h * (v[i] * v[i] * p[i] + v[i - 1] * v[i - 1] * p[i - 1]);
  }
  pdf.integral = mass;
  if (mass > 0.0) {
    pdf.mean = first / mass;
    pdf.std = std::sqrt(std::max(second / mass - pdf.mean * pdf.mean, 0.0));
  }
}

bool integral_ok(const ErrorPdf& pdf) { return pdf.integral >= 0.999 && pdf.integral <= 1.001; }

}  // namespace

std::vector<double> norm_pdf_series(double m1, double s1, double m2, double s2, std::span<const double> grid) {
  // Orient so the first component has the smaller variance; every series
  // term is then nonnegative.
  if (s1 > s2) {
    std::swap(m1, m2);
    std::swap(s1, s2);
  }
  const double mx = std::abs(m1);
  const double my = std::abs(m2);
  const double sx = s1;
  const double sy = s2;
  if (!(sx > 0.0) || mx < 1e-6 * sx || std::abs(sy - sx) <= 1e-9 * sy) return {};

  const double sx2 = sx * sx;
  const double sy2 = sy * sy;
  const double beta_i = (sy2 - sx2) / (mx * sy2);
  const double beta_l = my * my * sx2 / (2.0 * mx * sy2 * sy2);
  const SeriesCoefficients sc = series_coefficients(beta_i, beta_l);

  std::vector<double> out(grid.size(), 0.0);
  std::vector<double> log_i;
  const double base = -std::log(sx * sy) - my * my / (2.0 * sy2);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double v = grid[g];
    if (v <= 0.0) continue;
    const double lv = std::log(v);
    const double z = v * mx / sx2;
    bool converged = false;
    double total = kNegInf;
    for (int cap = 64;; cap = std::min(2 * cap, kMaxIndex)) {
      log_scaled_bessel(z, cap, log_i);
      total = kNegInf;
      double prev = kNegInf;
      for (int k = 0; k <= cap; ++k) {
        const double term = sc.log_c[k] + k * lv + log_i[k];
        total = log_add(total, term);
        if (k > 0 && term < prev && term < total + std::log(1e-12)) {
          converged = true;
          break;
        }
        prev = term;
      }
      if (converged || cap == kMaxIndex) break;
    }
    if (!converged) return {};
    const double d = v - mx;
    out[g] = std::exp(lv + base - d * d / (2.0 * sx2) + total);
  }
  return out;
}

std::vector<double> norm_pdf_convolution(double m1, double s1, double m2, double s2, std::span<const double> grid) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw Error(ErrorCode::invalid_argument, "convolution needs positive variances");
  using boost::math::quadrature::gauss_kronrod;
  auto folded = [](double r, double m, double s) { return std_normal_pdf((r - m) / s) + std_normal_pdf((r + m) / s); };
  const double a1 = std::abs(m1);
  const double a2 = std::abs(m2);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double v = grid[g];
    if (v <= 0.0) continue;
    auto f = [&](double phi) { return folded(v * std::sin(phi), a1, s1) * folded(v * std::cos(phi), a2, s2); };
    // Split where either folded density peaks so narrow bumps are not missed.
    std::vector<double> cuts{0.0, std::numbers::pi / 2};
    if (a1 < v) cuts.push_back(std::asin(a1 / v));
    if (a2 < v) cuts.push_back(std::acos(a2 / v));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-6; }), cuts.end());
    cuts.back() = std::numbers::pi / 2;
    double acc = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      acc += gauss_kronrod<double, 31>::integrate(f, cuts[i - 1], cuts[i], 12, 1e-10);
    }
    out[g] = v / (s1 * s2) * acc;
  }
  return out;
}

ErrorCovariance2D decorrelate(const AxisErrorStats& x, const AxisErrorStats& y, double rho_xy) {
  ErrorCovariance2D c;
  c.rho_xy = rho_xy;
  const double cxy = rho_xy * x.sigma_hat * y.sigma_hat;
  c.omega_L << x.sigma_hat * x.sigma_hat, cxy, cxy, y.sigma_hat * y.sigma_hat;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c.omega_L);
  c.q = es.eigenvectors().transpose();
  const Eigen::Vector2d m = c.q * Eigen::Vector2d(x.m_hat, y.m_hat);
  c.m_x = m[0];
  c.m_y = m[1];
  c.sigma_x = std::sqrt(std::max(es.eigenvalues()[0], 0.0));
  c.sigma_y = std::sqrt(std::max(es.eigenvalues()[1], 0.0));
  return c;
}

ErrorPdf error_norm_distribution(const ErrorCovariance2D& cov) {
  ErrorPdf pdf;
  const double mnorm = std::hypot(cov.m_x, cov.m_y);
  const double smax = std::max(cov.sigma_x, cov.sigma_y);
  if (smax <= 1e-12 * std::max(1.0, mnorm)) {
    pdf.mean = mnorm;
    pdf.std = 0.0;
    pdf.integral = 1.0;
    return pdf;
  }
  // A vanishing minor variance makes both evaluators singular; keep it
  // resolvable on the grid.
  const double sx = std::max(cov.sigma_x, 1e-3 * smax);
  const double sy = std::max(cov.sigma_y, 1e-3 * smax);

  const double hi = mnorm + 12.0 * smax;
  pdf.grid.resize(kGridPoints);
  for (std::size_t i = 0; i < kGridPoints; ++i) pdf.grid[i] = hi * double(i) / double(kGridPoints - 1);

  pdf.density = norm_pdf_series(cov.m_x, sx, cov.m_y, sy, pdf.grid);
  if (!pdf.density.empty()) {
    summarize(pdf);
    if (integral_ok(pdf)) return pdf;
  }
  pdf.fallback = true;
  pdf.density = norm_pdf_convolution(cov.m_x, sx, cov.m_y, sy, pdf.grid);
  summarize(pdf);
  if (!integral_ok(pdf)) {
    throw Error(ErrorCode::quadrature_failed,
                "error-norm density integrates to " + std::to_string(pdf.integral) + ", outside [0.999, 1.001]");
  }
  return pdf;
}

ErrorPdf error_2d_distribution(const AxisErrorStats& x, const AxisErrorStats& y, double rho_xy) {
  return error_norm_distribution(decorrelate(x, y, rho_xy));
}

}  // namespace wcl
