#ifndef ENTLAB_NUMERICS_EIGENSOLVER_HPP
#define ENTLAB_NUMERICS_EIGENSOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "entlab/numerics/linalg.hpp"

namespace entlab::numerics {

/// Raised when the iterative eigensolver exhausts its matrix-vector budget.
class NotConverged : public std::runtime_error {
public:
  NotConverged(int iterations, double residual)
      : std::runtime_error("smallest_eigenpair: no convergence after " + std::to_string(iterations) +
                           " matrix-vector products (residual " + std::to_string(residual) + ")"),
        iterations_(iterations), residual_(residual)
  {
  }
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

private:
  int iterations_;
  double residual_;
};

struct EigensolverOptions {
  double tol = 1e-10;        ///< residual norm ||Hv - Ev|| at exit
  int max_iterations = 5000; ///< matrix-vector products
  int max_basis = 48;        ///< subspace size before a thick restart
  int keep_on_restart = 6;
  std::uint64_t seed = 0x5eedULL; ///< start vector when no guess is supplied
};

template <typename Scalar>
struct Eigenpair {
  double value = 0.0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;
  double residual = 0.0;
  int iterations = 0;
};

/// Lowest eigenpair of a self-adjoint linear map given only through its action.
///
/// Thick-restart Krylov iteration (Lanczos/Davidson with the identity
/// preconditioner): the subspace is expanded with the orthogonalized residual of
/// the current Ritz vector, projected by Rayleigh-Ritz, and shrunk to the
/// lowest `keep_on_restart` Ritz vectors when it reaches `max_basis`.
/// Orthogonalization is done twice per expansion (full reorthogonalization).
template <typename Scalar>
Eigenpair<Scalar> smallest_eigenpair(
    const std::function<void(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>& apply,
    Eigen::Index dim, const EigensolverOptions& opt = {},
    const std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& guess = std::nullopt)
{
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (dim < 1)
    throw InvalidInput("smallest_eigenpair: dimension must be positive");

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  auto random_vector = [&]() {
    Vec r(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if constexpr (std::is_same_v<Scalar, double>)
        r(i) = normal(rng);
      else
        r(i) = Scalar(normal(rng), normal(rng));
    }
    return r;
  };

  const Eigen::Index cap = std::min<Eigen::Index>(std::max(opt.max_basis, 2), dim);
  const Eigen::Index keep = std::clamp<Eigen::Index>(opt.keep_on_restart, 1, std::max<Eigen::Index>(cap - 1, 1));

  Mat basis(dim, cap);
  Mat images(dim, cap);
  Eigen::Index size = 0;
  int matvecs = 0;

  // Orthogonalize v against the current basis and append it; false if v lies
  // (numerically) in the span already.
  auto append = [&](Vec v) {
    const double original = v.norm();
    if (original == 0.0 || !v.allFinite())
      return false;
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < size; ++j)
        v -= basis.col(j) * basis.col(j).dot(v);
    const double nrm = v.norm();
    if (nrm <= 1e-12 * original)
      return false;
    basis.col(size) = v / nrm;
    Vec hv(dim);
    apply(basis.col(size), hv);
    ++matvecs;
    images.col(size) = hv;
    ++size;
    return true;
  };

  Vec start = guess && guess->size() == dim ? *guess : random_vector();
  if (!append(start))
    append(random_vector());

  Eigenpair<Scalar> best;
  double last_residual = std::numeric_limits<double>::infinity();
  while (true) {
    Mat projected = basis.leftCols(size).adjoint() * images.leftCols(size);
    projected = 0.5 * (projected + projected.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> ritz(projected);
    const Vec y = ritz.eigenvectors().col(0);
    const double theta = ritz.eigenvalues()(0);
    Vec x = basis.leftCols(size) * y;
    Vec hx = images.leftCols(size) * y;
    Vec r = hx - theta * x;
    last_residual = r.norm();
    // Exhausting the space yields the exact answer up to rounding.
    if (last_residual <= opt.tol || size == dim) {
      best.value = theta;
      best.vector = x / x.norm();
      best.residual = last_residual;
      best.iterations = matvecs;
      return best;
    }
    if (matvecs >= opt.max_iterations)
      throw NotConverged(matvecs, last_residual);

    if (size == cap) {
      const Eigen::Index k = std::min<Eigen::Index>(keep, size);
      Mat y_keep = ritz.eigenvectors().leftCols(k);
      Mat new_basis = basis.leftCols(size) * y_keep;
      Mat new_images = images.leftCols(size) * y_keep;
      basis.leftCols(k) = new_basis;
      images.leftCols(k) = new_images;
      size = k;
    }
    if (!append(r)) {
      // Residual already in span (loss of orthogonality); inject fresh direction.
      if (!append(random_vector()))
        throw NotConverged(matvecs, last_residual);
    }
  }
}

} // namespace entlab::numerics

#endif // ENTLAB_NUMERICS_EIGENSOLVER_HPP
