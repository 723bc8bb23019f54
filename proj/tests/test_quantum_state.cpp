#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "entlab/quantum_state.hpp"
#include "entlab/random.hpp"

using namespace entlab;

namespace {

BipartiteState product00(Eigen::Index dl = 2, Eigen::Index dr = 2)
{
  CMatrix c = CMatrix::Zero(dl, dr);
  c(0, 0) = 1.0;
  return BipartiteState(c);
}

BipartiteState bell()
{
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = c(1, 1) = 1.0;
  return BipartiteState(c);
}

numerics::Vector nonzero_sorted(const numerics::Vector& v, double floor = 1e-13)
{
  std::vector<double> keep;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) > floor)
      keep.push_back(v(i));
  std::sort(keep.begin(), keep.end());
  return Eigen::Map<numerics::Vector>(keep.data(), static_cast<Eigen::Index>(keep.size()));
}

} // namespace

TEST(BipartiteState, NormalizesAndRejectsZero)
{
  CMatrix c = CMatrix::Constant(2, 3, cplx(2.0, 1.0));
  BipartiteState s(c);
  EXPECT_NEAR(s.coeff().squaredNorm(), 1.0, 1e-12);
  EXPECT_THROW(BipartiteState(CMatrix::Zero(2, 2)), InvalidInput);
}

TEST(DensityMatrix, RejectsInvalid)
{
  CMatrix bad = CMatrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix{bad}, InvalidInput); // trace 2
  CMatrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityMatrix{neg}, InvalidInput);
  CMatrix nonherm(2, 2);
  nonherm << 0.5, 0.1, 0.0, 0.5;
  EXPECT_THROW(DensityMatrix{nonherm}, InvalidInput);
}

TEST(ReducedDensity, ProductStateIsPure)
{
  for (const auto& rho : {reduced_density_right(product00()), reduced_density_left(product00())}) {
    EXPECT_NEAR(std::abs(rho.matrix()(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(von_neumann_entropy(rho), 0.0, 1e-14);
  }
}

TEST(ReducedDensity, BellStateIsMaximallyMixed)
{
  for (const auto& rho : {reduced_density_right(bell()), reduced_density_left(bell())}) {
    EXPECT_TRUE(rho.matrix().isApprox(0.5 * CMatrix::Identity(2, 2), 1e-14));
    EXPECT_NEAR(von_neumann_entropy(rho), std::log(2.0), 1e-14);
  }
}

TEST(ReducedDensity, DiagonalCoefficients)
{
  CMatrix c = CMatrix::Zero(3, 3);
  c(0, 0) = std::sqrt(0.5);
  c(1, 1) = std::sqrt(0.3);
  c(2, 2) = std::sqrt(0.2);
  auto rho = reduced_density_right(BipartiteState(c));
  EXPECT_NEAR(rho.eigenvalues()(0), 0.2, 1e-14);
  EXPECT_NEAR(rho.eigenvalues()(1), 0.3, 1e-14);
  EXPECT_NEAR(rho.eigenvalues()(2), 0.5, 1e-14);
  const double direct = -(0.5 * std::log(0.5) + 0.3 * std::log(0.3) + 0.2 * std::log(0.2));
  EXPECT_NEAR(von_neumann_entropy(rho), direct, 1e-14);
}

TEST(ReducedDensity, SymmetryTheoremOnRandomStates)
{
  Rng rng(2024);
  std::uniform_int_distribution<int> dim(1, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto state = random_state(dim(rng), dim(rng), rng);
    const auto left = reduced_density_left(state);
    const auto right = reduced_density_right(state);
    EXPECT_NEAR(von_neumann_entropy(left), von_neumann_entropy(right), 1e-9);
    // Nonzero spectra coincide with each other and with the squared Schmidt coefficients.
    const numerics::Vector l = nonzero_sorted(left.eigenvalues());
    const numerics::Vector r = nonzero_sorted(right.eigenvalues());
    auto sigma = numerics::svd(state.coeff()).sigma;
    const numerics::Vector c2 = nonzero_sorted(sigma.cwiseAbs2());
    ASSERT_EQ(l.size(), r.size());
    ASSERT_EQ(l.size(), c2.size());
    EXPECT_LE((l - r).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((l - c2).cwiseAbs().maxCoeff(), 1e-10);
    // Entropy range for reduced states of pure states.
    const double s = von_neumann_entropy(left);
    EXPECT_GE(s, -1e-10);
    EXPECT_LE(s, std::log(static_cast<double>(std::min(state.left_dim(), state.right_dim()))) + 1e-10);
  }
}

TEST(Schmidt, ProductAndBell)
{
  auto p = schmidt(product00(3, 2));
  EXPECT_NEAR(p.coefficients(0), 1.0, 1e-14);
  EXPECT_NEAR(p.coefficients(1), 0.0, 1e-14);
  auto b = schmidt(bell());
  EXPECT_NEAR(b.coefficients(0), 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(b.coefficients(1), 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(Schmidt, RandomReconstructsAndMatchesLeftSpectrum)
{
  Rng rng(5);
  const auto state = random_state(4, 6, rng);
  auto sd = schmidt(state);
  EXPECT_NEAR(sd.coefficients.squaredNorm(), 1.0, 1e-12);
  CMatrix rebuilt = sd.left * sd.coefficients.asDiagonal() * sd.right.transpose();
  EXPECT_LE((rebuilt - state.coeff()).norm(), 1e-10);
  EXPECT_LE((sd.left.adjoint() * sd.left - CMatrix::Identity(4, 4)).norm(), 1e-12);
  EXPECT_LE((sd.right.adjoint() * sd.right - CMatrix::Identity(4, 4)).norm(), 1e-12);
  const auto eig = reduced_density_left(state).eigenvalues();
  for (int k = 0; k < 4; ++k)
    EXPECT_NEAR(sd.coefficients(k) * sd.coefficients(k), eig(3 - k), 1e-10);
}

TEST(Fidelity, BasicCases)
{
  Rng rng(9);
  const auto a = random_state(3, 4, rng);
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-12);
  CMatrix e1 = CMatrix::Zero(2, 2);
  e1(0, 1) = 1.0;
  EXPECT_NEAR(fidelity(product00(), BipartiteState(e1)), 0.0, 1e-15);
  const auto b = random_state(3, 4, rng);
  EXPECT_DOUBLE_EQ(fidelity(a, b), fidelity(b, a));
  EXPECT_THROW(fidelity(a, random_state(4, 3, rng)), InvalidInput);
}

TEST(Fidelity, TruncationFidelityIsOneMinusTail)
{
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_state(5, 7, rng);
    for (Eigen::Index m = 1; m <= 5; ++m) {
      const auto t = truncate(a, m);
      EXPECT_NEAR(fidelity(a, t.state), 1.0 - t.weight, 1e-12);
    }
  }
}

TEST(Truncate, KeepAllIsIdentity)
{
  Rng rng(3);
  const auto a = random_state(4, 5, rng);
  const auto t = truncate(a, 4);
  EXPECT_NEAR(t.weight, 0.0, 1e-15);
  EXPECT_LE((t.state.coeff() - a.coeff()).norm(), 1e-12);
}

TEST(Truncate, BellToProduct)
{
  const auto t = truncate(bell(), 1);
  EXPECT_NEAR(t.weight, 0.5, 1e-14);
  auto sd = schmidt(t.state);
  EXPECT_NEAR(sd.coefficients(0), 1.0, 1e-14);
  EXPECT_NEAR(von_neumann_entropy(reduced_density_left(t.state)), 0.0, 1e-12);
}

TEST(Truncate, RejectsOutOfRange)
{
  EXPECT_THROW(truncate(bell(), 0), InvalidInput);
  EXPECT_THROW(truncate(bell(), 3), InvalidInput);
}

TEST(Truncate, DistanceEqualsSchmidtTailAndBeatsRandomProjections)
{
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_state(6, 6, rng);
    const auto t = truncate(a, 3);
    const auto c = schmidt(a).coefficients;
    const double tail = c.tail(3).squaredNorm();
    const double best = truncation_distance(a.coeff(), t.projection);
    EXPECT_NEAR(best, tail, 1e-10);
    EXPECT_NEAR(t.weight, tail, 1e-12);
    for (int r = 0; r < 200; ++r) {
      const CMatrix q = random_isometry(6, 3, rng);
      const double other = truncation_distance(a.coeff(), q * (q.adjoint() * a.coeff()));
      EXPECT_LE(best, other + 1e-12);
    }
  }
}

TEST(TruncationDistance, Basics)
{
  EXPECT_EQ(truncation_distance(bell(), bell()), 0.0);
  CMatrix e1 = CMatrix::Zero(2, 2);
  e1(1, 0) = 1.0;
  EXPECT_NEAR(truncation_distance(product00(), BipartiteState(e1)), 2.0, 1e-15);
  EXPECT_THROW(truncation_distance(CMatrix::Zero(2, 2), CMatrix::Zero(2, 3)), InvalidInput);
}

TEST(EvolveProduct, IdentityKeepsEntropies)
{
  Rng rng(1);
  const auto l = random_density(3, rng);
  const auto r = random_density(2, rng);
  const auto out = evolve_product(l, r, CMatrix::Identity(6, 6));
  EXPECT_NEAR(von_neumann_entropy(out.left), von_neumann_entropy(l), 1e-12);
  EXPECT_NEAR(von_neumann_entropy(out.right), von_neumann_entropy(r), 1e-12);
}

TEST(EvolveProduct, PureInputsStayPureGlobally)
{
  Rng rng(2);
  CMatrix p0 = CMatrix::Zero(3, 3);
  p0(0, 0) = 1.0;
  const DensityMatrix pure(p0);
  EXPECT_EQ(von_neumann_entropy(pure), 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto out = evolve_product(pure, pure, random_unitary(9, rng));
    EXPECT_NEAR(von_neumann_entropy(out.left), von_neumann_entropy(out.right), 1e-9);
  }
}

TEST(EvolveProduct, EntropyGrowthInequality)
{
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto l = random_density(3, rng);
    const auto r = random_density(3, rng);
    const auto out = evolve_product(l, r, random_unitary(9, rng));
    const double before = von_neumann_entropy(l) + von_neumann_entropy(r);
    const double after = von_neumann_entropy(out.left) + von_neumann_entropy(out.right);
    EXPECT_GE(after - before, -1e-9);
  }
}

TEST(EvolveProduct, RejectsNonUnitary)
{
  Rng rng(4);
  const auto l = random_density(2, rng);
  CMatrix u = CMatrix::Identity(4, 4);
  u(0, 0) = 1.1;
  try {
    evolve_product(l, l, u);
    FAIL();
  } catch (const NonUnitary& e) {
    EXPECT_NEAR(e.defect(), 0.21, 1e-12);
  }
  EXPECT_THROW(evolve_product(l, l, CMatrix::Identity(3, 3)), InvalidInput);
}

TEST(PartialTraces, OfProductState)
{
  Rng rng(6);
  const auto l = random_density(2, rng);
  const auto r = random_density(3, rng);
  auto [pl, pr] = partial_traces(numerics::kron(l.matrix(), r.matrix()), 2, 3);
  EXPECT_LE((pl - l.matrix()).norm(), 1e-14);
  EXPECT_LE((pr - r.matrix()).norm(), 1e-14);
}
