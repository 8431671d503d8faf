#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wcl/error.hpp"
#include "wcl/theory.hpp"

namespace wcl {

namespace {

double normal_pdf(double x, double mean, double sd) {
  const double u = (x - mean) / sd;
  return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

double ratio_pdf(const AxisSums& s, double rho_ab, double z) {
  const double sa = s.sigma_a;
  const double sb = s.sigma_b;
  if (!(sa > 0.0) && !(sb > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "ratio density undefined for deterministic a and b");
  }
  if (!(sb > 0.0)) return std::abs(s.m_b) * normal_pdf(z * s.m_b, s.m_a, sa);
  if (!(sa > 0.0)) {
    if (z == 0.0) return 0.0;
    return std::abs(s.m_a) / (z * z) * normal_pdf(s.m_a / z, s.m_b, sb);
  }

  const double rho = std::clamp(rho_ab, -1.0 + 1e-12, 1.0 - 1e-12);
  const double k = 1.0 - rho * rho;
  // Exponent of phi2(z t, t) is -(A t^2 - 2 B t + C) / 2.
  const double p1 = z / sa;
  const double q1 = s.m_a / sa;
  const double p2 = 1.0 / sb;
  const double q2 = s.m_b / sb;
  const double A = (p1 * p1 - 2.0 * rho * p1 * p2 + p2 * p2) / k;
  const double B = (p1 * q1 - rho * (p1 * q2 + p2 * q1) + p2 * q2) / k;
  // C - B^2/A written without cancellation: (p1 q2 - p2 q1)^2 / (k A).
  const double cross = (z * s.m_b - s.m_a) / (sa * sb);
  const double residual = cross * cross / (k * A);

  // int |t| exp(-A (t - mu)^2 / 2) dt = sqrt(2 pi / A) E|T|, T ~ N(mu, 1/A).
  const double mu = B / A;
  const double sd = 1.0 / std::sqrt(A);
  const double abs_mean = sd * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * mu * mu / (sd * sd)) +
                          mu * std::erf(mu / (sd * std::numbers::sqrt2));
  const double integral = std::exp(-0.5 * residual) * std::sqrt(2.0 * std::numbers::pi / A) * abs_mean;
  return integral / (2.0 * std::numbers::pi * sa * sb * std::sqrt(k));
}

RatioMoments ratio_moments_hayya(const AxisSums& s, double rho_ab) {
  if (s.m_b == 0.0) throw Error(ErrorCode::invalid_argument, "Hayya moments need m_b != 0");
  const double ma = s.m_a;
  const double mb = s.m_b;
  const double sa = s.sigma_a;
  const double sb = s.sigma_b;
  RatioMoments out;
  out.mean = ma / mb + sb * sb * ma / (mb * mb * mb) - rho_ab * sa * sb / (mb * mb);
  const double var = sb * sb * ma * ma / std::pow(mb, 4) + sa * sa / (mb * mb) -
                     2.0 * rho_ab * sa * sb * ma / (mb * mb * mb);
  out.std = std::sqrt(std::max(var, 0.0));
  return out;
}

RatioMoments ratio_moments_quadrature(const AxisSums& s, double rho_ab) {
  if (!(s.m_b > 3.0 * s.sigma_b)) {
    throw Error(ErrorCode::denominator_not_sign_definite, "denominator not sign-definite (m_b <= 3 sigma_b)");
  }
  const RatioMoments guess = ratio_moments_hayya(s, rho_ab);
  if (!(guess.std > 0.0) || !(s.sigma_a > 0.0 || s.sigma_b > 0.0)) return guess;

  using boost::math::quadrature::gauss_kronrod;
  const double lo = guess.mean - 12.0 * guess.std;
  const double hi = guess.mean + 12.0 * guess.std;
  constexpr double kTol = 1e-11;
  constexpr unsigned kDepth = 20;

  auto integrate = [&](auto&& f, const char* what) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = gauss_kronrod<double, 61>::integrate(f, lo, hi, kDepth, kTol, &err, &l1);
    if (!(err <= 1e-7 * l1 + 1e-300) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "ratio quadrature (" << what << ") did not converge: achieved error " << err
          << " relative to L1 norm " << l1;
      throw Error(ErrorCode::quadrature_failed, msg.str());
    }
    return v;
  };

  const double mass = integrate([&](double z) { return ratio_pdf(s, rho_ab, z); }, "mass");
  const double first = integrate([&](double z) { return (z - guess.mean) * ratio_pdf(s, rho_ab, z); }, "mean");
  const double mean = guess.mean + first / mass;
  const double second = integrate(
      [&](double z) {
        const double d = z - mean;
        return d * d * ratio_pdf(s, rho_ab, z);
      },
      "variance");
  RatioMoments out;
  out.mean = mean;
  out.std = std::sqrt(second / mass);
  out.window_mass = mass;
  return out;
}

}  // namespace wcl
