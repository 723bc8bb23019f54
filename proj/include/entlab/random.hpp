#ifndef ENTLAB_RANDOM_HPP
#define ENTLAB_RANDOM_HPP

#include <cstdint>
#include <random>

#include "entlab/quantum_state.hpp"

namespace entlab {

/// The project-wide generator: 64-bit Mersenne Twister.
using Rng = std::mt19937_64;

/// Independent stream for trial `index` of a run seeded with `seed`.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t index)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Matrix of independent standard complex Gaussians (real and imaginary parts N(0, 1/2)).
inline CMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = {re, im};
    }
  return g;
}

inline BipartiteState random_state(Eigen::Index dl, Eigen::Index dr, Rng& rng)
{
  return BipartiteState(ginibre(dl, dr, rng));
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
inline CMatrix random_unitary(Eigen::Index n, Rng& rng)
{
  Eigen::HouseholderQR<CMatrix> qr(ginibre(n, n, rng));
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx d = r(k, k);
    if (std::abs(d) > 0)
      q.col(k) *= d / std::abs(d);
  }
  return q;
}

/// Random full-rank mixed state G G^H / Tr(G G^H) with G Ginibre.
inline DensityMatrix random_density(Eigen::Index n, Rng& rng)
{
  const CMatrix g = ginibre(n, n, rng);
  CMatrix rho = g * g.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(rho / rho.trace());
}

/// Orthonormal basis of a uniformly random m-dimensional subspace of C^n.
inline CMatrix random_isometry(Eigen::Index n, Eigen::Index m, Rng& rng)
{
  return random_unitary(n, rng).leftCols(m);
}

} // namespace entlab

#endif // ENTLAB_RANDOM_HPP
