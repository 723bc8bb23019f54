#ifndef ENTLAB_NUMERICS_BESSEL_HPP
#define ENTLAB_NUMERICS_BESSEL_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "entlab/numerics/linalg.hpp"

namespace entlab::numerics {

struct QuadratureOptions {
  double rel_tol = 1e-10; ///< successive refinements agree to this (relative to the L1 scale)
  double tail = 1e-18;    ///< integrand cutoff defining the upper limit
  int max_halvings = 20;
};

/// e^{x} K_{i nu}(x) from K_{i nu}(x) = int_0^inf e^{-x cosh t} cos(nu t) dt.
///
/// Composite trapezoid rule on [0, T] with step halving; T is where
/// e^{-x (cosh t - 1)} drops below `tail`. The integrand is analytic and decays
/// double-exponentially, so the trapezoid rule converges geometrically.
/// Accurate while K is not much smaller than e^{-x}; for nu >> x the result
/// suffers cancellation of order e^{pi nu / 2 - x}.
inline double scaled_bessel_k_imag_quadrature(double nu, double x, const QuadratureOptions& opt = {})
{
  if (!(x > 0.0) || !std::isfinite(x))
    throw InvalidInput("bessel_K_imag: argument must be positive, got " + std::to_string(x));
  if (!(nu >= 0.0) || !std::isfinite(nu))
    throw InvalidInput("bessel_K_imag: order must be non-negative, got " + std::to_string(nu));

  const double upper = std::acosh(1.0 - std::log(opt.tail) / x);
  auto integrand = [&](double t) { return std::exp(-x * (std::cosh(t) - 1.0)) * std::cos(nu * t); };
  auto magnitude = [&](double t) { return std::exp(-x * (std::cosh(t) - 1.0)); };

  // Start with a step resolving both the envelope and the oscillation.
  int panels = std::max(8, static_cast<int>(std::ceil(upper * (1.0 + nu) * 2.0)));
  double h = upper / panels;
  double sum = 0.5 * (integrand(0.0) + integrand(upper));
  double abs_sum = 0.5 * (magnitude(0.0) + magnitude(upper));
  for (int i = 1; i < panels; ++i) {
    sum += integrand(i * h);
    abs_sum += magnitude(i * h);
  }
  double estimate = h * sum;
  for (int level = 0; level < opt.max_halvings; ++level) {
    double mid = 0.0;
    double abs_mid = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double t = (i + 0.5) * h;
      mid += integrand(t);
      abs_mid += magnitude(t);
    }
    sum += mid;
    abs_sum += abs_mid;
    panels *= 2;
    h *= 0.5;
    const double refined = h * sum;
    const double scale = h * abs_sum;
    const double change = std::abs(refined - estimate);
    estimate = refined;
    if (change <= opt.rel_tol * scale && level >= 1)
      break;
  }
  return estimate;
}

inline double bessel_k_imag_quadrature(double nu, double x, const QuadratureOptions& opt = {})
{
  return std::exp(-x) * scaled_bessel_k_imag_quadrature(nu, x, opt);
}

/// arg Gamma(1 + i nu) for real nu, continuous in nu (not reduced mod 2 pi).
///
/// Shifts the argument to Re z >= 16 with the recurrence and applies the
/// Stirling series there.
inline double arg_gamma_1_plus_i(double nu)
{
  constexpr int shift = 16;
  std::complex<double> z(1.0 + shift, nu);
  // Im log Gamma(z) by Stirling, then subtract Im log(z-1)...(z-shift).
  const std::complex<double> zi = 1.0 / z;
  const std::complex<double> zi2 = zi * zi;
  std::complex<double> series = zi * (1.0 / 12.0 + zi2 * (-1.0 / 360.0 + zi2 * (1.0 / 1260.0 + zi2 * (-1.0 / 1680.0 + zi2 * (1.0 / 1188.0)))));
  std::complex<double> lg = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
  double phase = lg.imag();
  for (int k = 1; k <= shift; ++k)
    phase -= std::atan2(nu, static_cast<double>(k));
  return phase;
}

/// K_{i nu}(x) from the ascending series of I_{i nu}:
///   K_{i nu}(x) = -sqrt(pi / (nu sinh(pi nu))) Im[e^{i theta} sum_k (x^2/4)^k / (k! prod_{j<=k} (j + i nu))],
///   theta = nu ln(x/2) - arg Gamma(1 + i nu).
/// No cancellation for x below the turning point, where K is exponentially small.
/// The overall factor is returned separately to avoid underflow for large nu.
inline double bessel_k_imag_series(double nu, double x)
{
  if (!(x > 0.0) || !(nu > 0.0))
    throw InvalidInput("bessel_K_imag series: requires nu > 0 and x > 0");
  const double q = 0.25 * x * x;
  std::complex<double> term(1.0, 0.0);
  std::complex<double> sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * std::complex<double>(k, nu));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum))
      break;
  }
  const double theta = nu * std::log(0.5 * x) - arg_gamma_1_plus_i(nu);
  const double im = (std::polar(1.0, theta) * sum).imag();
  // sqrt(pi / (nu sinh(pi nu))) without overflow.
  const double pn = std::numbers::pi * nu;
  const double log_sinh = pn > 20.0 ? pn - std::log(2.0) : std::log(std::sinh(pn));
  const double prefactor = std::exp(0.5 * (std::log(std::numbers::pi / nu) - log_sinh));
  return -prefactor * im;
}

/// Real modified Bessel function of imaginary order, K_{i nu}(x), nu >= 0, x > 0.
///
/// Uses the integral representation by quadrature, except in the oscillatory
/// region (x < max(nu, 2), nu >= 0.5) where K is exponentially small relative
/// to the integrand and the ascending series is used instead.
inline double bessel_K_imag(double nu, double x)
{
  if (!(x > 0.0) || !std::isfinite(x))
    throw InvalidInput("bessel_K_imag: argument must be positive, got " + std::to_string(x));
  if (!(nu >= 0.0) || !std::isfinite(nu))
    throw InvalidInput("bessel_K_imag: order must be non-negative, got " + std::to_string(nu));
  if (nu >= 0.5 && x < std::max(nu, 2.0))
    return bessel_k_imag_series(nu, x);
  return bessel_k_imag_quadrature(nu, x);
}

} // namespace entlab::numerics

#endif // ENTLAB_NUMERICS_BESSEL_HPP
