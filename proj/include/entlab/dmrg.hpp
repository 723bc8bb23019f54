#ifndef ENTLAB_DMRG_HPP
#define ENTLAB_DMRG_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "entlab/harmonic_chain.hpp"
#include "entlab/numerics/eigensolver.hpp"
#include "entlab/quantum_state.hpp"

namespace entlab::dmrg {

/// Infinite-system DMRG on the fixed-end harmonic chain. The block occupies
/// sites [0, L) measured outward from the origin; the superblock is the block
/// plus its mirror image, i.e. a chain of 2L sites with fixed ends.
struct DmrgConfig {
  Eigen::Index local_dim = 8;       ///< Fock levels per site (d)
  Eigen::Index kept_states = 16;    ///< block states kept after truncation (m)
  std::size_t target_length = 20;   ///< stop once the superblock chain has this many sites (even)
  double mass = 1.0;
  double coupling = 1.0;            ///< gradient coupling; 0 decouples neighbouring sites
  double gs_tolerance = 1e-9;       ///< residual of the superblock ground state
  int max_iterations = 100;         ///< DMRG steps
  std::size_t initial_sites = 1;    ///< sites in the exactly solved starting block
  Eigen::Index dense_limit = 4096;  ///< bound on the starting block basis d^k0
  Eigen::Index superblock_limit = 1 << 20;
  int solver_max_matvecs = 20000;
  double degeneracy_tolerance = 1e-8; ///< relative gap treated as a degenerate multiplet at the cut
};

struct DmrgBlock {
  std::size_t length = 0;
  Matrix hamiltonian; ///< block Hamiltonian in the block basis
  Matrix edge_phi;    ///< field of the origin-facing site
  Matrix edge_pi;     ///< K with pi = i K on the origin-facing site (real antisymmetric)

  Eigen::Index basis_size() const { return hamiltonian.rows(); }
};

struct DmrgIterate {
  std::size_t chain_length = 0;
  double ground_energy = 0.0;
  double half_chain_entropy = 0.0; ///< nats
  double truncation_weight = 0.0;
  Eigen::Index kept = 0;
  bool multiplet_extended = false; ///< kept > m because a degenerate multiplet straddled the cut
  int solver_iterations = 0;
};

/// Failure inside a DMRG step, with the chain length at which it happened.
class DmrgError : public std::runtime_error {
public:
  DmrgError(std::size_t chain_length, const std::string& what)
      : std::runtime_error("dmrg: chain length " + std::to_string(chain_length) + ": " + what)
  {
  }
};

inline void validate(const DmrgConfig& c)
{
  if (c.local_dim < 2)
    throw InvalidInput("dmrg: local_dim must be >= 2");
  if (c.kept_states < 1)
    throw InvalidInput("dmrg: kept_states must be >= 1");
  if (c.initial_sites < 1)
    throw InvalidInput("dmrg: initial_sites must be >= 1");
  if (c.target_length % 2 != 0 || c.target_length < 2 * c.initial_sites)
    throw InvalidInput("dmrg: target_length must be even and at least twice the initial block");
  if (!(c.mass >= 0.0) || !(c.gs_tolerance > 0.0))
    throw InvalidInput("dmrg: mass must be >= 0 and gs_tolerance > 0");
  const double block = static_cast<double>(c.kept_states) * static_cast<double>(c.local_dim);
  if (block * block > static_cast<double>(c.superblock_limit))
    throw InvalidInput("dmrg: superblock dimension (m d)^2 = " + std::to_string(static_cast<long long>(block * block)) +
                       " exceeds the limit " + std::to_string(c.superblock_limit));
}

/// Site oscillator with frequency sqrt(V_ii) = sqrt(2 coupling + mass^2).
inline LocalOscillator site_oscillator(const DmrgConfig& c)
{
  return local_oscillator(std::sqrt(2.0 * c.coupling + c.mass * c.mass), c.local_dim);
}

/// Adjoin one site at the origin-facing edge: new basis (site) x (block),
/// index s * basis + b. The new site couples to the old edge by -coupling phi phi.
inline DmrgBlock enlarge(const DmrgBlock& block, const LocalOscillator& site, double coupling)
{
  const Eigen::Index d = site.energies.size();
  const Matrix id_site = Matrix::Identity(d, d);
  const Matrix id_block = Matrix::Identity(block.basis_size(), block.basis_size());
  DmrgBlock out;
  out.length = block.length + 1;
  out.hamiltonian = numerics::kron(Matrix(site.energies.asDiagonal()), id_block) + numerics::kron(id_site, block.hamiltonian) -
                    coupling * numerics::kron(site.phi, block.edge_phi);
  out.edge_phi = numerics::kron(site.phi, id_block);
  out.edge_pi = numerics::kron(site.pi_im, id_block);
  return out;
}

/// Exact truncated-Fock block of `initial_sites` sites.
inline DmrgBlock init_block(const DmrgConfig& c)
{
  if (c.local_dim < 2 || c.initial_sites < 1)
    throw InvalidInput("init_block: need local_dim >= 2 and initial_sites >= 1");
  const double dim = std::pow(static_cast<double>(c.local_dim), static_cast<double>(c.initial_sites));
  if (dim > static_cast<double>(c.dense_limit))
    throw InvalidInput("init_block: starting block basis " + std::to_string(static_cast<long long>(dim)) +
                       " exceeds the dense limit " + std::to_string(c.dense_limit));
  const auto site = site_oscillator(c);
  DmrgBlock block;
  block.length = 1;
  block.hamiltonian = site.energies.asDiagonal();
  block.edge_phi = site.phi;
  block.edge_pi = site.pi_im;
  for (std::size_t k = 1; k < c.initial_sites; ++k)
    block = enlarge(block, site, c.coupling);
  return block;
}

/// Hamiltonian of block (x) mirror acting on a superblock vector. The vector is
/// the column-major flattening of the b x b matrix Psi(block, mirror):
///   H Psi = H_B Psi + Psi H_B^T - coupling * phi Psi phi^T.
struct Superblock {
  const DmrgBlock* block;
  double coupling;

  Eigen::Index dim() const { return block->basis_size() * block->basis_size(); }

  void apply(const Vector& in, Vector& out) const
  {
    const Eigen::Index b = block->basis_size();
    Eigen::Map<const Matrix> psi(in.data(), b, b);
    out.resize(b * b);
    Eigen::Map<Matrix> res(out.data(), b, b);
    res.noalias() = block->hamiltonian * psi;
    res.noalias() += psi * block->hamiltonian.transpose();
    if (coupling != 0.0)
      res.noalias() -= coupling * (block->edge_phi * psi * block->edge_phi.transpose());
  }

  /// Dense matrix in the basis index (block) + b * (mirror); small blocks only.
  Matrix dense() const
  {
    const Eigen::Index b = block->basis_size();
    const Matrix id = Matrix::Identity(b, b);
    return numerics::kron(id, block->hamiltonian) + numerics::kron(block->hamiltonian, id) -
           coupling * numerics::kron(block->edge_phi, block->edge_phi);
  }
};

inline Superblock form_superblock(const DmrgBlock& block, double coupling = 1.0) { return {&block, coupling}; }

struct StepResult {
  DmrgBlock next;             ///< truncated then enlarged block
  DmrgIterate iterate;
  Matrix ground_state;        ///< superblock ground state as a block x mirror matrix
  Vector density_eigenvalues; ///< block density-matrix eigenvalues, descending
  Matrix kept_basis;          ///< columns spanning the kept block states
  Vector next_guess;          ///< warm start for the next superblock
  double mirror_entropy = 0.0; ///< entropy of the mirror half; equals the block entropy for a pure superblock state
};

/// Number of states to keep from a descending spectrum: m, extended to cover a
/// degenerate multiplet straddling the cut.
inline Eigen::Index kept_count(const Vector& descending, Eigen::Index m, double rel_tol, bool& extended)
{
  const Eigen::Index n = descending.size();
  extended = false;
  if (m >= n)
    return n;
  Eigen::Index keep = m;
  constexpr double floor = 1e-13;
  while (keep < n && descending(keep - 1) > floor &&
         descending(keep - 1) - descending(keep) <= rel_tol * descending(keep - 1)) {
    ++keep;
    extended = true;
  }
  return keep;
}

/// One DMRG iteration: superblock ground state, block density matrix,
/// truncation to the dominant states, and enlargement by one site at the origin.
inline StepResult dmrg_step(const DmrgBlock& block, const DmrgConfig& c, const std::optional<Vector>& guess = std::nullopt)
{
  const std::size_t chain_length = 2 * block.length;
  const Eigen::Index b = block.basis_size();
  const auto sb = form_superblock(block, c.coupling);

  numerics::EigensolverOptions opt;
  opt.tol = c.gs_tolerance;
  opt.max_iterations = c.solver_max_matvecs;
  std::function<void(const Vector&, Vector&)> apply = [&](const Vector& x, Vector& y) { sb.apply(x, y); };
  numerics::Eigenpair<double> pair;
  try {
    pair = numerics::smallest_eigenpair<double>(apply, sb.dim(), opt, guess);
  } catch (const numerics::NotConverged& e) {
    throw DmrgError(chain_length, e.what());
  }

  StepResult out;
  out.ground_state = Eigen::Map<const Matrix>(pair.vector.data(), b, b);

  // Block density matrix: trace out the mirror half of the superblock state.
  const auto state = BipartiteState::from_real(out.ground_state);
  const DensityMatrix rho_block = reduced_density_left(state);
  const DensityMatrix rho_mirror = reduced_density_right(state);
  const Matrix rho = rho_block.matrix().real();
  // Truncation acts at the 1e-12 level, so eigenvectors are paired with their values strictly.
  const auto ed = numerics::sym_eig(RealSymmetricMatrix::symmetrized(rho), 0.0);
  out.density_eigenvalues = ed.values.reverse();
  const Matrix vectors = ed.vectors.rowwise().reverse();

  bool extended = false;
  const Eigen::Index keep = kept_count(out.density_eigenvalues, c.kept_states, c.degeneracy_tolerance, extended);
  double discarded = 0.0;
  for (Eigen::Index k = keep; k < b; ++k)
    discarded += std::max(0.0, out.density_eigenvalues(k));
  out.kept_basis = vectors.leftCols(keep);

  out.iterate.chain_length = chain_length;
  out.iterate.ground_energy = pair.value;
  out.iterate.half_chain_entropy = von_neumann_entropy(rho_block);
  out.mirror_entropy = von_neumann_entropy(rho_mirror);
  out.iterate.truncation_weight = std::min(discarded, 1.0);
  out.iterate.kept = keep;
  out.iterate.multiplet_extended = extended;
  out.iterate.solver_iterations = pair.iterations;

  DmrgBlock truncated;
  truncated.length = block.length;
  const Matrix& w = out.kept_basis;
  truncated.hamiltonian = w.transpose() * block.hamiltonian * w;
  truncated.hamiltonian = 0.5 * (truncated.hamiltonian + truncated.hamiltonian.transpose()).eval();
  truncated.edge_phi = w.transpose() * block.edge_phi * w;
  truncated.edge_phi = 0.5 * (truncated.edge_phi + truncated.edge_phi.transpose()).eval();
  truncated.edge_pi = w.transpose() * block.edge_pi * w;
  out.next = enlarge(truncated, site_oscillator(c), c.coupling);

  // Warm start: ground state in the kept basis, new sites in their local vacuum.
  const Matrix reduced = w.transpose() * out.ground_state * w;
  const Eigen::Index nb = out.next.basis_size();
  Matrix next = Matrix::Zero(nb, nb);
  next.topLeftCorner(keep, keep) = reduced;
  out.next_guess = Eigen::Map<const Vector>(next.data(), nb * nb);
  if (out.next_guess.norm() > 0)
    out.next_guess.normalize();
  return out;
}

/// Grow the chain until `target_length` sites (or `max_iterations` steps).
inline std::vector<DmrgIterate> run(const DmrgConfig& c)
{
  validate(c);
  DmrgBlock block = init_block(c);
  std::vector<DmrgIterate> iterates;
  std::optional<Vector> guess;
  for (int it = 0; it < c.max_iterations; ++it) {
    auto step = dmrg_step(block, c, guess);
    iterates.push_back(step.iterate);
    if (step.iterate.chain_length >= c.target_length)
      break;
    block = std::move(step.next);
    guess = std::move(step.next_guess);
  }
  return iterates;
}

} // namespace entlab::dmrg

#endif // ENTLAB_DMRG_HPP
