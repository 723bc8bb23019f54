#ifndef ENTLAB_HARMONIC_CHAIN_HPP
#define ENTLAB_HARMONIC_CHAIN_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "entlab/numerics/eigensolver.hpp"
#include "entlab/numerics/linalg.hpp"
#include "entlab/quantum_state.hpp"

namespace entlab {

using numerics::Matrix;
using numerics::RealSymmetricMatrix;
using numerics::Vector;

enum class Boundary {
  fixed_ends, ///< field clamped to zero one site beyond each end
  open,       ///< free ends (gradient terms only between chain sites)
};

/// Discretized free scalar field on a chain with unit spacing:
///   H = 1/2 sum_i pi_i^2 + 1/2 phi^T V phi,
///   V = (2 + mass^2) on the diagonal and -coupling on the first off-diagonals.
struct ChainSpec {
  std::size_t n_sites = 2;
  double mass = 1.0;
  Boundary boundary = Boundary::fixed_ends;
  /// Strength of the nearest-neighbour gradient coupling; 0 gives decoupled oscillators.
  double coupling = 1.0;
};

/// The matrix V of the potential energy 1/2 phi^T V phi, positive definite.
struct QuadraticPotential {
  RealSymmetricMatrix V;

  std::size_t n_sites() const { return static_cast<std::size_t>(V.order()); }
};

inline QuadraticPotential build_potential(const ChainSpec& spec)
{
  if (spec.n_sites == 0)
    throw InvalidInput("build_potential: chain must have at least one site");
  if (!(spec.mass >= 0.0) || !std::isfinite(spec.mass))
    throw InvalidInput("build_potential: mass must be a finite non-negative number");
  if (spec.boundary == Boundary::open && spec.mass == 0.0 && spec.coupling != 0.0)
    throw InvalidInput("build_potential: a massless chain with open ends has a zero mode; set mass > 0 "
                       "or use fixed ends");
  const auto n = static_cast<Eigen::Index>(spec.n_sites);
  const double m2 = spec.mass * spec.mass;
  Matrix v = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = m2 + 2.0 * spec.coupling;
    if (spec.boundary == Boundary::open)
      diag = m2 + spec.coupling * ((i > 0 ? 1.0 : 0.0) + (i + 1 < n ? 1.0 : 0.0));
    v(i, i) = diag;
    if (i + 1 < n)
      v(i, i + 1) = v(i + 1, i) = -spec.coupling;
  }
  QuadraticPotential pot{RealSymmetricMatrix(std::move(v))};
  const double lowest = numerics::sym_eig(pot.V).values(0);
  if (!(lowest > 0.0))
    throw InvalidInput("build_potential: potential is not positive definite (lowest eigenvalue " +
                       std::to_string(lowest) + "); set mass > 0");
  return pot;
}

/// Covariances of the Gaussian ground state: X = <phi phi> = V^{-1/2}/2 and
/// P = <pi pi> = V^{1/2}/2.
struct GaussianGroundState {
  Matrix X;
  Matrix P;

  std::size_t n_sites() const { return static_cast<std::size_t>(X.rows()); }
};

inline GaussianGroundState ground_state_covariance(const QuadraticPotential& pot)
{
  const auto ed = numerics::sym_eig(pot.V);
  if (!(ed.values(0) > 0.0))
    throw InvalidInput("ground_state_covariance: potential is not positive definite");
  const Vector root = ed.values.cwiseSqrt();
  Matrix x = 0.5 * ed.vectors * root.cwiseInverse().asDiagonal() * ed.vectors.transpose();
  Matrix p = 0.5 * ed.vectors * root.asDiagonal() * ed.vectors.transpose();
  return {0.5 * (x + x.transpose()), 0.5 * (p + p.transpose())};
}

/// Exact ground-state energy 1/2 Tr V^{1/2}.
inline double ground_energy(const QuadraticPotential& pot)
{
  return 0.5 * numerics::sym_eig(pot.V).values.cwiseSqrt().sum();
}

/// Contiguous block of sites [begin, end).
struct BlockRegion {
  std::size_t begin = 0;
  std::size_t end = 1;

  static BlockRegion prefix(std::size_t length) { return {0, length}; }

  std::vector<std::size_t> sites() const
  {
    std::vector<std::size_t> s;
    for (std::size_t i = begin; i < end; ++i)
      s.push_back(i);
    return s;
  }
};

namespace detail {

inline void check_sites(const GaussianGroundState& gs, std::span<const std::size_t> sites)
{
  if (sites.empty())
    throw InvalidInput("block region must contain at least one site");
  for (std::size_t s : sites)
    if (s >= gs.n_sites())
      throw InvalidInput("block region site " + std::to_string(s) + " outside chain of " +
                         std::to_string(gs.n_sites()) + " sites");
}

inline Matrix sub_block(const Matrix& m, std::span<const std::size_t> sites)
{
  const auto k = static_cast<Eigen::Index>(sites.size());
  Matrix b(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      b(i, j) = m(static_cast<Eigen::Index>(sites[static_cast<std::size_t>(i)]),
                  static_cast<Eigen::Index>(sites[static_cast<std::size_t>(j)]));
  return b;
}

// (nu + 1/2) ln(nu + 1/2) - (nu - 1/2) ln(nu - 1/2)
inline double mode_entropy(double nu)
{
  const double plus = nu + 0.5;
  const double minus = nu - 0.5;
  double s = plus * std::log(plus);
  if (minus > 0.0)
    s -= minus * std::log(minus);
  return s;
}

} // namespace detail

/// Symplectic eigenvalues of the reduced state on `sites`, ascending. They are
/// the square roots of the spectrum of sqrt(X_B) P_B sqrt(X_B), which shares its
/// spectrum with X_B P_B. Values below 1/2 by at most 1e-10 are clamped to 1/2.
inline Vector symplectic_eigenvalues(const GaussianGroundState& gs, std::span<const std::size_t> sites)
{
  detail::check_sites(gs, sites);
  const Matrix xb = detail::sub_block(gs.X, sites);
  const Matrix pb = detail::sub_block(gs.P, sites);
  const auto xed = numerics::sym_eig(RealSymmetricMatrix::symmetrized(xb));
  const Matrix sx = xed.vectors * xed.values.cwiseMax(0.0).cwiseSqrt().asDiagonal() * xed.vectors.transpose();
  const Matrix m = sx * pb * sx;
  const auto ed = numerics::sym_eig(RealSymmetricMatrix::symmetrized(m));
  Vector nu = ed.values.cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index k = 0; k < nu.size(); ++k) {
    if (nu(k) < 0.5 - 1e-10)
      throw std::runtime_error("symplectic eigenvalue " + std::to_string(nu(k)) +
                               " below 1/2: covariance does not describe a physical state");
    nu(k) = std::max(nu(k), 0.5);
  }
  return nu;
}

inline Vector symplectic_eigenvalues(const GaussianGroundState& gs, const BlockRegion& region)
{
  const auto s = region.sites();
  return symplectic_eigenvalues(gs, s);
}

/// Von Neumann entropy (nats) of the ground state reduced to `sites`.
inline double block_entropy(const GaussianGroundState& gs, std::span<const std::size_t> sites)
{
  const Vector nu = symplectic_eigenvalues(gs, sites);
  double s = 0.0;
  for (Eigen::Index k = 0; k < nu.size(); ++k)
    s += detail::mode_entropy(nu(k));
  return s;
}

inline double block_entropy(const GaussianGroundState& gs, const BlockRegion& region)
{
  if (region.end <= region.begin)
    throw InvalidInput("block_entropy: empty region");
  const auto s = region.sites();
  return block_entropy(gs, s);
}

/// Largest `n_levels` eigenvalues of the reduced density matrix on `region`,
/// descending. The reduced state is a product of thermal modes with
/// eps_k = ln((nu_k + 1/2)/(nu_k - 1/2)); its eigenvalues are
/// prod_k (1 - e^{-eps_k}) e^{-n_k eps_k} over occupations n_k >= 0.
inline std::vector<double> entanglement_spectrum(const GaussianGroundState& gs, const BlockRegion& region,
                                                 std::size_t n_levels)
{
  if (region.end <= region.begin)
    throw InvalidInput("entanglement_spectrum: empty region");
  const Vector nu = symplectic_eigenvalues(gs, region);
  std::vector<double> eps;
  double log_ground = 0.0;
  for (Eigen::Index k = 0; k < nu.size(); ++k) {
    const double minus = nu(k) - 0.5;
    if (minus <= 1e-300)
      continue; // pure mode: a single level of weight 1
    const double e = std::log((nu(k) + 0.5) / minus);
    eps.push_back(e);
    log_ground += std::log1p(-std::exp(-e));
  }
  std::sort(eps.begin(), eps.end());

  // Best-first enumeration of occupation tuples by total energy sum n_k eps_k.
  // Children of a tuple increment one mode index >= the last incremented one,
  // which visits each tuple exactly once.
  struct Node {
    double energy;
    std::vector<unsigned> occupation;
    std::size_t last;
    bool operator>(const Node& o) const { return energy > o.energy; }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<>> frontier;
  frontier.push({0.0, std::vector<unsigned>(eps.size(), 0u), 0});
  std::vector<double> levels;
  while (levels.size() < n_levels && !frontier.empty()) {
    Node node = frontier.top();
    frontier.pop();
    levels.push_back(std::exp(log_ground - node.energy));
    for (std::size_t k = node.last; k < eps.size(); ++k) {
      Node child = node;
      child.occupation[k] += 1;
      child.energy += eps[k];
      child.last = k;
      frontier.push(std::move(child));
    }
  }
  return levels;
}

/// Local harmonic-oscillator basis of frequency omega truncated to d levels.
/// phi = (a + a^+)/sqrt(2 omega); pi = i K with K = sqrt(omega/2)(a^+ - a) real
/// antisymmetric.
struct LocalOscillator {
  double omega = 1.0;
  Vector energies; ///< omega (n + 1/2)
  Matrix phi;
  Matrix pi_im;    ///< K, with pi = i K
};

inline LocalOscillator local_oscillator(double omega, Eigen::Index d)
{
  if (!(omega > 0.0))
    throw InvalidInput("local_oscillator: frequency must be positive");
  if (d < 1)
    throw InvalidInput("local_oscillator: need at least one level");
  LocalOscillator lo;
  lo.omega = omega;
  lo.energies.resize(d);
  lo.phi = Matrix::Zero(d, d);
  lo.pi_im = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    lo.energies(n) = omega * (static_cast<double>(n) + 0.5);
    if (n + 1 < d) {
      const double r = std::sqrt(static_cast<double>(n + 1));
      lo.phi(n, n + 1) = lo.phi(n + 1, n) = r / std::sqrt(2.0 * omega);
      lo.pi_im(n + 1, n) = r * std::sqrt(0.5 * omega);
      lo.pi_im(n, n + 1) = -lo.pi_im(n + 1, n);
    }
  }
  return lo;
}

struct FockGroundState {
  BipartiteState state; ///< coefficients split as (first `split` sites) x (rest)
  double energy = 0.0;
  Vector vector;        ///< full state vector, site 0 most significant
};

/// Brute-force ground state of the chain in a product basis of d local
/// oscillator levels per site (frequency sqrt(V_ii) on site i). The truncated
/// Hamiltonian is the Galerkin projection of the exact one, so the energy is
/// variational and non-increasing in d.
inline FockGroundState fock_ground_state(const QuadraticPotential& pot, Eigen::Index d, std::size_t split,
                                         Eigen::Index dense_limit = 4096, double tol = 1e-11)
{
  const std::size_t n = pot.n_sites();
  if (d < 2)
    throw InvalidInput("fock_ground_state: need d >= 2 levels per site");
  if (split == 0 || split > n)
    throw InvalidInput("fock_ground_state: split must lie in [1, n_sites]");
  double dim_d = std::pow(static_cast<double>(d), static_cast<double>(n));
  if (dim_d > static_cast<double>(dense_limit))
    throw InvalidInput("fock_ground_state: basis of " + std::to_string(static_cast<long long>(dim_d)) +
                       " states exceeds the limit of " + std::to_string(dense_limit));
  const auto dim = static_cast<Eigen::Index>(dim_d);

  std::vector<LocalOscillator> sites;
  for (std::size_t i = 0; i < n; ++i)
    sites.push_back(local_oscillator(std::sqrt(pot.V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))), d));
  std::vector<Eigen::Index> stride(n);
  for (std::size_t i = 0; i < n; ++i)
    stride[i] = static_cast<Eigen::Index>(std::pow(static_cast<double>(d), static_cast<double>(n - 1 - i)));

  Vector diagonal = Vector::Zero(dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx)
    for (std::size_t i = 0; i < n; ++i)
      diagonal(idx) += sites[i].energies((idx / stride[i]) % d);

  auto apply_site = [&](const Matrix& op, std::size_t site, const Vector& in, Vector& out) {
    out.setZero(dim);
    const Eigen::Index s = stride[site];
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
      const Eigen::Index level = (idx / s) % d;
      const Eigen::Index base = idx - level * s;
      double acc = 0.0;
      for (Eigen::Index t = 0; t < d; ++t)
        if (op(level, t) != 0.0)
          acc += op(level, t) * in(base + t * s);
      out(idx) = acc;
    }
  };

  struct Bond {
    std::size_t i;
    std::size_t j;
    double v;
  };
  std::vector<Bond> bonds;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (pot.V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0)
        bonds.push_back({i, j, pot.V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});

  std::function<void(const Vector&, Vector&)> apply = [&](const Vector& in, Vector& out) {
    out = diagonal.cwiseProduct(in);
    Vector tmp(dim), tmp2(dim);
    for (const auto& b : bonds) {
      apply_site(sites[b.j].phi, b.j, in, tmp);
      apply_site(sites[b.i].phi, b.i, tmp, tmp2);
      out += b.v * tmp2;
    }
  };

  numerics::EigensolverOptions opt;
  opt.tol = tol;
  opt.max_iterations = 20000;
  Vector guess = Vector::Zero(dim);
  guess(0) = 1.0;
  auto pair = numerics::smallest_eigenpair<double>(apply, dim, opt, guess);

  const auto rows = static_cast<Eigen::Index>(std::pow(static_cast<double>(d), static_cast<double>(split)));
  const Eigen::Index cols = dim / rows;
  Matrix coeff = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      pair.vector.data(), rows, cols);
  return {BipartiteState::from_real(coeff), pair.value, pair.vector};
}

} // namespace entlab

#endif // ENTLAB_HARMONIC_CHAIN_HPP
