#ifndef ENTLAB_QUANTUM_STATE_HPP
#define ENTLAB_QUANTUM_STATE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "entlab/numerics/linalg.hpp"

namespace entlab {

using numerics::CMatrix;
using numerics::cplx;
using numerics::InvalidInput;

/// Pure state of a bipartite system, stored as the coefficient matrix
/// psi(a, A) over the product basis |a> (x) |A>. Normalized on construction.
class BipartiteState {
public:
  explicit BipartiteState(CMatrix coeff) : coeff_(std::move(coeff))
  {
    if (coeff_.rows() == 0 || coeff_.cols() == 0)
      throw InvalidInput("BipartiteState: empty coefficient matrix");
    if (!coeff_.allFinite())
      throw InvalidInput("BipartiteState: non-finite coefficients");
    const double norm = coeff_.norm();
    if (norm == 0.0)
      throw InvalidInput("BipartiteState: zero vector cannot be normalized");
    coeff_ /= norm;
  }

  /// Real coefficients (e.g. ground states of real Hamiltonians).
  static BipartiteState from_real(const numerics::Matrix& coeff) { return BipartiteState(coeff.cast<cplx>()); }

  const CMatrix& coeff() const { return coeff_; }
  Eigen::Index left_dim() const { return coeff_.rows(); }
  Eigen::Index right_dim() const { return coeff_.cols(); }

private:
  CMatrix coeff_;
};

/// Hermitian, positive semidefinite, unit-trace matrix. Invariants are checked
/// on construction (tolerance 1e-12) and the stored matrix is made exactly
/// Hermitian.
class DensityMatrix {
public:
  static constexpr double tolerance = 1e-12;

  explicit DensityMatrix(const CMatrix& entries)
  {
    if (entries.rows() != entries.cols() || entries.rows() == 0)
      throw InvalidInput("DensityMatrix: matrix must be square and non-empty");
    if (!entries.allFinite())
      throw InvalidInput("DensityMatrix: non-finite entries");
    const double herm_defect = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > tolerance)
      throw InvalidInput("DensityMatrix: not Hermitian (defect " + std::to_string(herm_defect) + ")");
    const double trace_defect = std::abs(entries.trace() - cplx(1.0, 0.0));
    if (trace_defect > tolerance)
      throw InvalidInput("DensityMatrix: trace differs from 1 by " + std::to_string(trace_defect));
    rho_ = 0.5 * (entries + entries.adjoint());
    spectrum_ = numerics::herm_eig(rho_).values;
    if (spectrum_(0) < -tolerance)
      throw InvalidInput("DensityMatrix: negative eigenvalue " + std::to_string(spectrum_(0)));
  }

  const CMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }
  /// Eigenvalues ascending, as computed at construction.
  const numerics::Vector& eigenvalues() const { return spectrum_; }

private:
  CMatrix rho_;
  numerics::Vector spectrum_;
};

/// rho_R = psi^H psi / Tr(psi^H psi), a d_R x d_R matrix.
inline DensityMatrix reduced_density_right(const BipartiteState& state)
{
  CMatrix r = state.coeff().adjoint() * state.coeff();
  return DensityMatrix(r / r.trace());
}

/// rho_L = psi^* psi^T / Tr(psi^* psi^T), a d_L x d_L matrix.
inline DensityMatrix reduced_density_left(const BipartiteState& state)
{
  CMatrix l = state.coeff().conjugate() * state.coeff().transpose();
  return DensityMatrix(l / l.trace());
}

/// -sum_k p_k ln p_k over the eigenvalues, in nats; eigenvalues are clamped
/// to [0, 1] and 0 ln 0 = 0.
inline double entropy_of_spectrum(const numerics::Vector& p)
{
  double s = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double x = std::clamp(p(k), 0.0, 1.0);
    if (x > 0.0)
      s -= x * std::log(x);
  }
  return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho)
{
  return entropy_of_spectrum(rho.eigenvalues());
}

/// psi = sum_k c_k |l_k> (x) |r_k>. Left vectors are the columns of `left`,
/// right vectors the columns of `right` (coefficients in the |A> basis,
/// i.e. psi = left * diag(c) * right^T). For degenerate coefficients the
/// vectors are one valid choice, not a canonical one.
struct SchmidtDecomposition {
  numerics::Vector coefficients; ///< descending, nonnegative
  CMatrix left;
  CMatrix right;
};

inline SchmidtDecomposition schmidt(const BipartiteState& state)
{
  auto s = numerics::svd(state.coeff());
  return {s.sigma, s.U, s.V.conjugate()};
}

/// |<a|b>|^2 for normalized states of the same shape.
inline double fidelity(const BipartiteState& a, const BipartiteState& b)
{
  if (a.left_dim() != b.left_dim() || a.right_dim() != b.right_dim())
    throw InvalidInput("fidelity: states have different shapes");
  const cplx overlap = (a.coeff().conjugate().cwiseProduct(b.coeff())).sum();
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

struct Truncation {
  BipartiteState state;   ///< renormalized projection
  CMatrix projection;     ///< projection before renormalization
  double weight = 0.0;    ///< discarded weight sum_{k>m} c_k^2
};

/// Optimal rank-m reduction: project the left factor onto the m dominant
/// eigenstates of the left reduced density operator (the leading left Schmidt
/// vectors). The projection minimizes ||psi~ - psi||^2 over rank-m left
/// subspaces, with minimum equal to the discarded weight.
inline Truncation truncate(const BipartiteState& state, Eigen::Index m)
{
  if (m < 1 || m > state.left_dim())
    throw InvalidInput("truncate: kept dimension " + std::to_string(m) + " outside [1, " +
                       std::to_string(state.left_dim()) + "]");
  auto s = numerics::svd(state.coeff());
  const Eigen::Index k = std::min(m, s.sigma.size());
  CMatrix u = s.U.leftCols(k);
  CMatrix projection = u * (u.adjoint() * state.coeff());
  double weight = 0.0;
  for (Eigen::Index i = k; i < s.sigma.size(); ++i)
    weight += s.sigma(i) * s.sigma(i);
  return {BipartiteState(projection), projection, weight};
}

/// ||reduced - original||^2 over coefficient matrices. Pass the unnormalized
/// projection to obtain the distance minimized by `truncate`.
inline double truncation_distance(const CMatrix& original, const CMatrix& reduced)
{
  if (original.rows() != reduced.rows() || original.cols() != reduced.cols())
    throw InvalidInput("truncation_distance: shape mismatch");
  return (reduced - original).squaredNorm();
}

inline double truncation_distance(const BipartiteState& original, const BipartiteState& reduced)
{
  return truncation_distance(original.coeff(), reduced.coeff());
}

/// Partial traces of a density matrix on C^{dl} (x) C^{dr}, product index a*dr + A.
inline std::pair<CMatrix, CMatrix> partial_traces(const CMatrix& rho, Eigen::Index dl, Eigen::Index dr)
{
  CMatrix left = CMatrix::Zero(dl, dl);
  CMatrix right = CMatrix::Zero(dr, dr);
  for (Eigen::Index a = 0; a < dl; ++a)
    for (Eigen::Index b = 0; b < dl; ++b)
      for (Eigen::Index k = 0; k < dr; ++k)
        left(a, b) += rho(a * dr + k, b * dr + k);
  for (Eigen::Index x = 0; x < dr; ++x)
    for (Eigen::Index y = 0; y < dr; ++y)
      for (Eigen::Index k = 0; k < dl; ++k)
        right(x, y) += rho(k * dr + x, k * dr + y);
  return {left, right};
}

class NonUnitary : public InvalidInput {
public:
  explicit NonUnitary(double defect)
      : InvalidInput("evolve_product: operator is not unitary (||U^H U - I||_max = " + std::to_string(defect) + ")"),
        defect_(defect)
  {
  }
  double defect() const { return defect_; }

private:
  double defect_;
};

struct EvolvedMarginals {
  DensityMatrix left;
  DensityMatrix right;
};

/// Evolve rho_L (x) rho_R by a unitary on the composite space and return the
/// two marginals of U (rho_L (x) rho_R) U^H.
inline EvolvedMarginals evolve_product(const DensityMatrix& rho_left, const DensityMatrix& rho_right, const CMatrix& u)
{
  const Eigen::Index dl = rho_left.dim();
  const Eigen::Index dr = rho_right.dim();
  if (u.rows() != dl * dr || u.cols() != dl * dr)
    throw InvalidInput("evolve_product: unitary has dimension " + std::to_string(u.rows()) + "x" +
                       std::to_string(u.cols()) + ", expected " + std::to_string(dl * dr));
  const double defect = (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-10)
    throw NonUnitary(defect);
  const CMatrix joint = u * numerics::kron(rho_left.matrix(), rho_right.matrix()) * u.adjoint();
  auto [l, r] = partial_traces(joint, dl, dr);
  // Renormalize away rounding in the trace before validation.
  return {DensityMatrix(l / l.trace()), DensityMatrix(r / r.trace())};
}

} // namespace entlab

#endif // ENTLAB_QUANTUM_STATE_HPP
