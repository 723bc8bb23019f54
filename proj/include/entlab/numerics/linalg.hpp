#ifndef ENTLAB_NUMERICS_LINALG_HPP
#define ENTLAB_NUMERICS_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace entlab::numerics {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Thrown when an operation receives malformed input (non-finite entries,
/// asymmetric storage, out-of-range parameters).
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m)
{
  return m.allFinite();
}

/// Real symmetric matrix. Construction verifies exact symmetry and finiteness;
/// use `symmetrized` for matrices that are symmetric only up to rounding.
class RealSymmetricMatrix {
public:
  explicit RealSymmetricMatrix(Matrix entries) : m_(std::move(entries))
  {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw InvalidInput("RealSymmetricMatrix: matrix must be square and non-empty");
    if (!all_finite(m_))
      throw InvalidInput("RealSymmetricMatrix: non-finite entries");
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
      for (Eigen::Index i = j + 1; i < m_.rows(); ++i)
        if (m_(i, j) != m_(j, i))
          throw InvalidInput("RealSymmetricMatrix: entries (" + std::to_string(i) + "," +
                             std::to_string(j) + ") and transpose differ");
  }

  static RealSymmetricMatrix symmetrized(const Matrix& m)
  {
    if (m.rows() != m.cols())
      throw InvalidInput("RealSymmetricMatrix: matrix must be square");
    Matrix s = 0.5 * (m + m.transpose());
    return RealSymmetricMatrix(std::move(s));
  }

  Eigen::Index order() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

private:
  Matrix m_;
};

/// Eigenvalues ascending, eigenvectors as orthonormal columns.
template <typename Scalar>
struct EigenDecomposition {
  Vector values;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
};

/// Singular values descending; A = U diag(sigma) V^H.
template <typename Scalar>
struct SingularValueDecomposition {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> U;
  Vector sigma;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> V;
};

namespace detail {

// Within clusters of (numerically) equal eigenvalues, order the columns by the
// position of their dominant component so that diagonal input keeps its input
// order. A cluster spans at most `tie` from its smallest member, and the values
// themselves stay sorted. Signs/phases are fixed so that the dominant component
// is real positive.
template <typename Scalar>
void canonicalize(EigenDecomposition<Scalar>& ed, double tie)
{
  const Eigen::Index n = ed.values.size();
  auto lead = [&](Eigen::Index col) {
    Eigen::Index arg = 0;
    ed.vectors.col(col).cwiseAbs().maxCoeff(&arg);
    return arg;
  };
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index arg = lead(k);
    const Scalar c = ed.vectors(arg, k);
    if (std::abs(c) > 0)
      ed.vectors.col(k) *= std::abs(c) / c;
  }
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && ed.values(stop) - ed.values(start) <= tie)
      ++stop;
    if (stop - start > 1) {
      std::vector<Eigen::Index> leads(static_cast<std::size_t>(stop - start));
      for (std::size_t i = 0; i < leads.size(); ++i)
        leads[i] = lead(start + static_cast<Eigen::Index>(i));
      std::vector<std::size_t> perm(leads.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::stable_sort(perm.begin(), perm.end(),
                       [&](std::size_t a, std::size_t b) { return leads[a] < leads[b]; });
      auto block = ed.vectors.middleCols(start, stop - start).eval();
      for (std::size_t i = 0; i < perm.size(); ++i)
        ed.vectors.col(start + static_cast<Eigen::Index>(i)) = block.col(static_cast<Eigen::Index>(perm[i]));
    }
    start = stop;
  }
}

template <typename Scalar>
EigenDecomposition<Scalar> self_adjoint_eig(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
                                            double tie_tolerance)
{
  if (!(tie_tolerance >= 0.0))
    throw InvalidInput("eigendecomposition: tie tolerance must be non-negative");
  if (m.rows() != m.cols())
    throw InvalidInput("eigendecomposition: matrix must be square");
  if (!all_finite(m))
    throw InvalidInput("eigendecomposition: non-finite entries");
  EigenDecomposition<Scalar> ed;
  if (m.rows() == 0)
    return ed;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition: solver did not converge");
  ed.values = solver.eigenvalues();
  ed.vectors = solver.eigenvectors();
  canonicalize(ed, tie_tolerance * std::max(1.0, static_cast<double>(m.cwiseAbs().maxCoeff())));
  return ed;
}

} // namespace detail

/// Symmetric eigendecomposition. Eigenvalues closer than tie_tolerance (relative
/// to max(1, max |m_ij|)) count as degenerate: their eigenvectors are ordered by
/// dominant component instead of by rounding noise. Pass 0 to pair vectors with
/// values strictly.
inline EigenDecomposition<double> sym_eig(const RealSymmetricMatrix& m, double tie_tolerance = 1e-12)
{
  return detail::self_adjoint_eig<double>(m.matrix(), tie_tolerance);
}

/// Hermitian eigendecomposition. Only the lower triangle is read; callers are
/// responsible for Hermiticity.
inline EigenDecomposition<cplx> herm_eig(const CMatrix& m, double tie_tolerance = 1e-12)
{
  return detail::self_adjoint_eig<cplx>(m, tie_tolerance);
}

namespace detail {

inline double conj_if(double x) { return x; }
inline cplx conj_if(cplx x) { return std::conj(x); }

// One-sided (Hestenes) Jacobi for a tall or square matrix (rows >= cols).
template <typename Scalar>
SingularValueDecomposition<Scalar> jacobi_svd_tall(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a)
{
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  Mat w = a;
  Mat v = Mat::Identity(n, n);
  constexpr int max_sweeps = 80;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const Scalar gamma = w.col(p).dot(w.col(q)); // conjugates first argument
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta))
          continue;
        rotated = true;
        // Remove the phase of gamma so the 2x2 problem is real.
        const Scalar phase = gamma / g;
        w.col(q) *= conj_if(phase);
        v.col(q) *= conj_if(phase);
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < m; ++i) {
          const Scalar wp = w(i, p);
          const Scalar wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const Scalar vp = v(i, p);
          const Scalar vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated)
      break;
  }

  Vector norms(n);
  for (Eigen::Index j = 0; j < n; ++j)
    norms(j) = w.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return norms(x) > norms(y); });

  SingularValueDecomposition<Scalar> out;
  out.U = Mat::Zero(m, n);
  out.V = Mat::Zero(n, n);
  out.sigma = Vector::Zero(n);
  const double cutoff = (norms.size() > 0 ? norms.maxCoeff() : 0.0) * eps * static_cast<double>(std::max(m, n));
  Eigen::Index filled = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    out.V.col(k) = v.col(j);
    out.sigma(k) = norms(j);
    if (norms(j) > cutoff && norms(j) > 0) {
      out.U.col(k) = w.col(j) / norms(j);
      ++filled;
    }
  }
  // Complete U for (numerically) zero singular values by Gram-Schmidt against
  // the standard basis.
  Eigen::Index candidate = 0;
  for (Eigen::Index k = filled; k < n; ++k) {
    while (candidate < m) {
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Unit(m, candidate++);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j < k; ++j)
          e -= out.U.col(j) * out.U.col(j).dot(e);
      const double nrm = e.norm();
      if (nrm > 1e-8) {
        out.U.col(k) = e / nrm;
        break;
      }
    }
  }
  return out;
}

} // namespace detail

/// Thin singular value decomposition of a real or complex rectangular matrix:
/// A = U diag(sigma) V^H with k = min(rows, cols) columns in U and V.
template <typename Derived>
auto svd(const Eigen::MatrixBase<Derived>& a)
{
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat m = a;
  if (!all_finite(m))
    throw InvalidInput("svd: non-finite entries");
  if (m.rows() >= m.cols())
    return detail::jacobi_svd_tall<Scalar>(m);
  auto t = detail::jacobi_svd_tall<Scalar>(Mat(m.adjoint()));
  std::swap(t.U, t.V);
  return t;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b)
{
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b)
{
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

} // namespace entlab::numerics

#endif // ENTLAB_NUMERICS_LINALG_HPP
