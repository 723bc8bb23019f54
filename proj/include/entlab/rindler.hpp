#ifndef ENTLAB_RINDLER_HPP
#define ENTLAB_RINDLER_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>

#include "entlab/numerics/bessel.hpp"
#include "entlab/numerics/linalg.hpp"
#include "entlab/numerics/roots.hpp"

namespace entlab::rindler {

using numerics::InvalidInput;
using numerics::Vector;

/// Inverse temperature of the half-space density matrix with respect to the
/// angular Hamiltonian L.
inline constexpr double beta = 2.0 * std::numbers::pi;

/// Angular wave of frequency ell for a field of the given mass.
struct AngularMode {
  double ell = 0.0;
  double mass = 1.0;

  AngularMode() = default;
  AngularMode(double ell_, double mass_) : ell(ell_), mass(mass_)
  {
    if (!(ell >= 0.0) || !std::isfinite(ell))
      throw InvalidInput("AngularMode: ell must be finite and non-negative");
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw InvalidInput("AngularMode: mass must be finite and positive");
  }

  /// Field-mode normalization 1/sqrt(2 sinh(pi ell)); infinite at ell = 0.
  double normalization() const { return 1.0 / std::sqrt(2.0 * std::sinh(std::numbers::pi * ell)); }

  /// Classical turning point x* = ell / mass.
  double turning_point() const { return ell / mass; }
};

/// Real radial profile K_{i ell}(m x).
inline double angular_wave(const AngularMode& mode, double x)
{
  if (!(x > 0.0))
    throw InvalidInput("angular_wave: x must be positive (the wave length vanishes at x = 0), got " +
                       std::to_string(x));
  return numerics::bessel_K_imag(mode.ell, mode.mass * x);
}

struct TurningPointCensus {
  double turning_point = 0.0;
  bool has_oscillatory_region = false;
  std::size_t oscillatory_sign_changes = 0; ///< on (x_min, x*)
  std::size_t decay_sign_changes = 0;       ///< on (x*, x_max]
  double x_min = 0.0;
  double x_max = 0.0;
};

/// Sign-change census of the angular wave on each side of its turning point.
///
/// The oscillatory side is sampled on a logarithmic grid over (x* 1e-3, x*),
/// since the local wavelength is proportional to x there. The decay side is
/// sampled uniformly up to `x_max` (default max(3 x*, 20 / m)).
inline TurningPointCensus classify_turning_point(const AngularMode& mode, std::size_t resolution = 1000,
                                                 std::optional<double> x_max = std::nullopt)
{
  if (resolution < 1000)
    throw InvalidInput("classify_turning_point: resolution must be at least 1000 points");
  TurningPointCensus out;
  out.turning_point = mode.turning_point();
  out.has_oscillatory_region = out.turning_point > 0.0;
  out.x_min = out.has_oscillatory_region ? 1e-3 * out.turning_point : 1e-3 / mode.mass;
  out.x_max = x_max.value_or(std::max(3.0 * out.turning_point, 20.0 / mode.mass));
  if (!(out.x_max > std::max(out.turning_point, out.x_min)))
    throw InvalidInput("classify_turning_point: x_max must lie beyond the turning point");

  auto count = [&](auto&& point) {
    std::size_t changes = 0;
    double prev = angular_wave(mode, point(0));
    for (std::size_t i = 1; i <= resolution; ++i) {
      const double cur = angular_wave(mode, point(i));
      if (cur != 0.0 && prev != 0.0 && std::signbit(cur) != std::signbit(prev))
        ++changes;
      if (cur != 0.0)
        prev = cur;
    }
    return changes;
  };
  const double n = static_cast<double>(resolution);
  if (out.has_oscillatory_region) {
    const double log_lo = std::log(out.x_min);
    const double log_hi = std::log(out.turning_point);
    out.oscillatory_sign_changes =
        count([&](std::size_t i) { return std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / n); });
  }
  const double lo = out.has_oscillatory_region ? out.turning_point : out.x_min;
  out.decay_sign_changes = count([&](std::size_t i) { return lo + (out.x_max - lo) * static_cast<double>(i) / n; });
  return out;
}

/// Discrete angular frequencies selected by a Dirichlet wall at x = epsilon.
struct AngularSpectrum {
  double mass = 1.0;
  double epsilon = 0.0;
  double ell_max = 0.0;
  std::vector<double> ell_values; ///< ascending
  bool empty = true;              ///< set when no root lies in (0, ell_max]
};

/// Roots of ell -> K_{i ell}(m epsilon) on (0, ell_max], ascending.
inline AngularSpectrum discrete_spectrum(double mass, double epsilon, double ell_max,
                                         const numerics::RootOptions& opt = {})
{
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw InvalidInput("discrete_spectrum: mass must be finite and positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidInput("discrete_spectrum: epsilon must be finite and positive");
  if (!(ell_max > 0.0) || !std::isfinite(ell_max))
    throw InvalidInput("discrete_spectrum: ell_max must be finite and positive");
  AngularSpectrum out;
  out.mass = mass;
  out.epsilon = epsilon;
  out.ell_max = ell_max;
  const double x = mass * epsilon;
  out.ell_values = numerics::find_roots([x](double ell) { return numerics::bessel_K_imag(ell, x); }, 0.0, ell_max,
                                        std::nullopt, opt)
                       .roots;
  out.empty = out.ell_values.empty();
  return out;
}

/// Boltzmann occupation table of one angular mode at beta = 2 pi.
struct ModeWeights {
  double ell = 0.0;
  Vector p;                ///< p(n) for n = 0..n_max
  double tail_bound = 0.0; ///< exp(-2 pi ell (n_max + 1)), the omitted probability mass
};

inline ModeWeights mode_weights(double ell, std::size_t n_max)
{
  if (!(ell > 0.0) || !std::isfinite(ell))
    throw InvalidInput("mode_weights: ell must be finite and positive");
  ModeWeights w;
  w.ell = ell;
  const double q = std::exp(-beta * ell);
  w.p.resize(static_cast<Eigen::Index>(n_max + 1));
  w.p(0) = -std::expm1(-beta * ell);
  for (Eigen::Index n = 1; n < w.p.size(); ++n)
    w.p(n) = w.p(n - 1) * q;
  w.tail_bound = std::exp(-beta * ell * static_cast<double>(n_max + 1));
  return w;
}

/// Occupation tables for every mode of a nonempty spectrum.
inline std::vector<ModeWeights> thermal_weights(const AngularSpectrum& spectrum, std::size_t n_max)
{
  if (spectrum.ell_values.empty())
    throw InvalidInput("thermal_weights: spectrum is empty");
  std::vector<ModeWeights> out;
  out.reserve(spectrum.ell_values.size());
  for (double ell : spectrum.ell_values)
    out.push_back(mode_weights(ell, n_max));
  return out;
}

/// -sum p ln p over a tabulated distribution (zero entries contribute nothing).
inline double table_entropy(const ModeWeights& w)
{
  double s = 0.0;
  for (Eigen::Index n = 0; n < w.p.size(); ++n)
    if (w.p(n) > 0.0)
      s -= w.p(n) * std::log(w.p(n));
  return s;
}

/// Closed-form entropy of a bosonic mode of energy ell at beta = 2 pi.
inline double thermal_mode_entropy(double ell)
{
  if (!(ell > 0.0) || !std::isfinite(ell))
    throw InvalidInput("thermal_mode_entropy: ell must be finite and positive");
  const double x = beta * ell;
  return x / std::expm1(x) - std::log(-std::expm1(-x));
}

/// Entropy of exp(-2 pi L)/Z over the discrete spectrum, in nats. Zero when empty.
inline double geometric_entropy(const AngularSpectrum& spectrum)
{
  double s = 0.0;
  for (double ell : spectrum.ell_values)
    s += thermal_mode_entropy(ell);
  return s;
}

struct SchwarzschildPoint {
  double r = 0.0;
  double t = 0.0;
  double M = 1.0;
};

struct KruskalPoint {
  double u = 0.0;
  double v = 0.0;

  double Z() const { return u + v; }
  double T() const { return u - v; }
};

/// u v = 16 M^2 (r/2M - 1) exp(r/2M - 1); always positive outside the horizon.
inline double kruskal_product(double r, double M)
{
  if (!(M > 0.0) || !std::isfinite(M))
    throw InvalidInput("kruskal: mass must be finite and positive");
  if (!(r > 2.0 * M) || !std::isfinite(r))
    throw InvalidInput("kruskal: r must exceed the horizon radius 2M (exterior region only)");
  const double y = r / (2.0 * M) - 1.0;
  const double uv = 16.0 * M * M * y * std::exp(y);
  if (!std::isfinite(uv))
    throw InvalidInput("kruskal: r/2M too large, u v overflows");
  return uv;
}

inline KruskalPoint to_kruskal(const SchwarzschildPoint& p)
{
  const double root = std::sqrt(kruskal_product(p.r, p.M));
  if (!std::isfinite(p.t))
    throw InvalidInput("kruskal: t must be finite");
  const double s = p.t / (4.0 * p.M);
  return {root * std::exp(s), root * std::exp(-s)};
}

/// Inverse chart on the exterior quadrant u, v > 0, with r from the principal Lambert W branch.
inline SchwarzschildPoint from_kruskal(const KruskalPoint& k, double M)
{
  if (!(M > 0.0) || !std::isfinite(M))
    throw InvalidInput("kruskal: mass must be finite and positive");
  if (!(k.u > 0.0) || !(k.v > 0.0) || !std::isfinite(k.u) || !std::isfinite(k.v))
    throw InvalidInput("kruskal: u and v must be positive (u = 0 or v = 0 is the horizon)");
  const double w = boost::math::lambert_w0(k.u * k.v / (16.0 * M * M));
  SchwarzschildPoint p;
  p.M = M;
  p.r = 2.0 * M * (1.0 + w);
  p.t = 2.0 * M * std::log(k.u / k.v);
  return p;
}

} // namespace entlab::rindler

#endif // ENTLAB_RINDLER_HPP
