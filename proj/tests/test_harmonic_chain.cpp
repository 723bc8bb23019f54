#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "entlab/harmonic_chain.hpp"

using namespace entlab;

namespace {

QuadraticPotential potential_of(const Matrix& v) { return {RealSymmetricMatrix(v)}; }

ChainSpec chain(std::size_t n, double mass, Boundary b = Boundary::fixed_ends)
{
  ChainSpec spec;
  spec.n_sites = n;
  spec.mass = mass;
  spec.boundary = b;
  return spec;
}

} // namespace

TEST(BuildPotential, SingleSiteFixedEnds)
{
  auto pot = build_potential(chain(1, 1.0));
  EXPECT_EQ(pot.V.order(), 1);
  EXPECT_DOUBLE_EQ(pot.V(0, 0), 3.0);
}

TEST(BuildPotential, MasslessThreeSiteSpectrum)
{
  auto pot = build_potential(chain(3, 0.0));
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(pot.V(i, i), 2.0);
    if (i < 2) {
      EXPECT_DOUBLE_EQ(pot.V(i, i + 1), -1.0);
    }
  }
  EXPECT_DOUBLE_EQ(pot.V(0, 2), 0.0);
  auto ev = numerics::sym_eig(pot.V).values;
  EXPECT_NEAR(ev(0), 2.0 - std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(ev(1), 2.0, 1e-14);
  EXPECT_NEAR(ev(2), 2.0 + std::sqrt(2.0), 1e-14);
}

TEST(BuildPotential, UncoupledIsDiagonal)
{
  auto spec = chain(4, 0.5);
  spec.coupling = 0.0;
  auto pot = build_potential(spec);
  EXPECT_TRUE(pot.V.matrix().isDiagonal());
}

TEST(BuildPotential, OpenBoundary)
{
  auto pot = build_potential(chain(3, 1.0, Boundary::open));
  EXPECT_DOUBLE_EQ(pot.V(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(pot.V(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(pot.V(2, 2), 2.0);
  EXPECT_THROW(build_potential(chain(3, 0.0, Boundary::open)), InvalidInput);
  EXPECT_THROW(build_potential(chain(0, 1.0)), InvalidInput);
}

TEST(GroundStateCovariance, IdentityPotential)
{
  auto gs = ground_state_covariance(potential_of(Matrix::Identity(3, 3)));
  EXPECT_TRUE(gs.X.isApprox(0.5 * Matrix::Identity(3, 3), 1e-14));
  EXPECT_TRUE(gs.P.isApprox(0.5 * Matrix::Identity(3, 3), 1e-14));
}

TEST(GroundStateCovariance, SingleSite)
{
  auto gs = ground_state_covariance(potential_of(Matrix::Constant(1, 1, 4.0)));
  EXPECT_NEAR(gs.X(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(gs.P(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(gs.X(0, 0) * gs.P(0, 0), 0.25, 1e-15);
}

TEST(GroundStateCovariance, PurityOfCoupledChain)
{
  auto gs = ground_state_covariance(build_potential(chain(4, 0.3)));
  EXPECT_LE(((2.0 * gs.X) * (2.0 * gs.P) - Matrix::Identity(4, 4)).norm(), 1e-10);
  EXPECT_GT(numerics::sym_eig(RealSymmetricMatrix::symmetrized(gs.X)).values(0), 0.0);
  EXPECT_GT(numerics::sym_eig(RealSymmetricMatrix::symmetrized(gs.P)).values(0), 0.0);
}

TEST(GroundStateCovariance, RejectsIndefinite)
{
  Matrix v(2, 2);
  v << 1, 2, 2, 1;
  EXPECT_THROW(ground_state_covariance(potential_of(v)), InvalidInput);
}

TEST(BlockEntropy, UncoupledIsZero)
{
  auto spec = chain(5, 1.0);
  spec.coupling = 0.0;
  auto gs = ground_state_covariance(build_potential(spec));
  EXPECT_NEAR(block_entropy(gs, BlockRegion{0, 2}), 0.0, 1e-12);
  EXPECT_NEAR(block_entropy(gs, BlockRegion{1, 4}), 0.0, 1e-12);
}

TEST(BlockEntropy, FullChainIsPure)
{
  auto gs = ground_state_covariance(build_potential(chain(6, 0.2)));
  auto nu = symplectic_eigenvalues(gs, BlockRegion{0, 6});
  for (Eigen::Index k = 0; k < nu.size(); ++k)
    EXPECT_NEAR(nu(k), 0.5, 1e-10);
  EXPECT_NEAR(block_entropy(gs, BlockRegion{0, 6}), 0.0, 1e-8);
}

TEST(BlockEntropy, RejectsEmptyAndOutOfRange)
{
  auto gs = ground_state_covariance(build_potential(chain(3, 1.0)));
  EXPECT_THROW(block_entropy(gs, BlockRegion{1, 1}), InvalidInput);
  EXPECT_THROW(block_entropy(gs, BlockRegion{2, 5}), InvalidInput);
}

TEST(BlockEntropy, ComplementSymmetryAndPhysicalNu)
{
  for (double mass : {0.01, 0.5, 2.0}) {
    const std::size_t n = 12;
    auto gs = ground_state_covariance(build_potential(chain(n, mass)));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b <= n; ++b) {
        if (a == 0 && b == n)
          continue;
        const BlockRegion region{a, b};
        std::vector<std::size_t> complement;
        for (std::size_t i = 0; i < n; ++i)
          if (i < a || i >= b)
            complement.push_back(i);
        EXPECT_NEAR(block_entropy(gs, region), block_entropy(gs, complement), 1e-9);
        auto nu = symplectic_eigenvalues(gs, region);
        EXPECT_GE(nu.minCoeff(), 0.5);
      }
  }
}

TEST(BlockEntropy, GrowsNearCriticalityAndSaturatesWhenMassive)
{
  const std::size_t n = 64;
  auto critical = ground_state_covariance(build_potential(chain(n, 0.01)));
  double prev = 0.0;
  for (std::size_t len = 1; len <= n / 2; ++len) {
    const double s = block_entropy(critical, BlockRegion::prefix(len));
    EXPECT_GT(s, prev) << "L=" << len;
    prev = s;
  }
  auto massive = ground_state_covariance(build_potential(chain(n, 1.0)));
  const double plateau = block_entropy(massive, BlockRegion::prefix(n / 2));
  for (std::size_t len = 8; len <= n / 2; ++len)
    EXPECT_NEAR(block_entropy(massive, BlockRegion::prefix(len)), plateau, 1e-6 * plateau) << "L=" << len;
  EXPECT_LT(block_entropy(massive, BlockRegion::prefix(1)), plateau);
}

TEST(EntanglementSpectrum, UncoupledHasSingleLevel)
{
  auto spec = chain(4, 1.0);
  spec.coupling = 0.0;
  auto gs = ground_state_covariance(build_potential(spec));
  auto levels = entanglement_spectrum(gs, BlockRegion{0, 2}, 5);
  ASSERT_EQ(levels.size(), 1u);
  EXPECT_NEAR(levels[0], 1.0, 1e-12);
}

TEST(EntanglementSpectrum, SingleModeGeometricSeries)
{
  // nu = 3/2 gives eps = ln 2.
  GaussianGroundState gs{Matrix::Constant(1, 1, 1.5), Matrix::Constant(1, 1, 1.5)};
  auto levels = entanglement_spectrum(gs, BlockRegion{0, 1}, 6);
  ASSERT_EQ(levels.size(), 6u);
  for (std::size_t k = 0; k < levels.size(); ++k)
    EXPECT_NEAR(levels[k], std::pow(0.5, static_cast<double>(k + 1)), 1e-14);
}

TEST(EntanglementSpectrum, MultiModeMatchesBruteForceEnumeration)
{
  auto gs = ground_state_covariance(build_potential(chain(10, 0.1)));
  const BlockRegion region{0, 4};
  auto levels = entanglement_spectrum(gs, region, 40);
  // Oracle: enumerate all occupations with n_k <= 12 directly.
  auto nu = symplectic_eigenvalues(gs, region);
  std::vector<double> eps;
  for (Eigen::Index k = 0; k < nu.size(); ++k)
    eps.push_back(std::log((nu(k) + 0.5) / (nu(k) - 0.5)));
  std::vector<double> all{1.0};
  for (double e : eps) {
    std::vector<double> next;
    for (double w : all)
      for (int n = 0; n <= 12; ++n)
        next.push_back(w * (1.0 - std::exp(-e)) * std::exp(-n * e));
    std::sort(next.rbegin(), next.rend());
    next.resize(std::min<std::size_t>(next.size(), 400));
    all = next;
  }
  for (std::size_t k = 0; k < levels.size(); ++k)
    EXPECT_NEAR(levels[k], all[k], 1e-12 * all[0]);
  for (std::size_t k = 1; k < levels.size(); ++k)
    EXPECT_LE(levels[k], levels[k - 1]);
  // The full set sums to one.
  auto many = entanglement_spectrum(gs, region, 20000);
  EXPECT_NEAR(std::accumulate(many.begin(), many.end(), 0.0), 1.0, 1e-6);
}

TEST(LocalOscillator, OperatorStructure)
{
  auto lo = local_oscillator(std::sqrt(3.0), 6);
  EXPECT_TRUE(lo.phi.isApprox(lo.phi.transpose()));
  EXPECT_TRUE(lo.pi_im.isApprox(-lo.pi_im.transpose()));
  // [phi, pi] = i on all but the top level: phi K - K phi = identity there.
  Matrix comm = lo.phi * lo.pi_im - lo.pi_im * lo.phi;
  for (int n = 0; n < 5; ++n)
    EXPECT_NEAR(comm(n, n), 1.0, 1e-14);
  // 1/2 pi^2 + 1/2 omega^2 phi^2 reproduces omega (n + 1/2) below the top level.
  Matrix h = -0.5 * lo.pi_im * lo.pi_im + 0.5 * 3.0 * lo.phi * lo.phi;
  for (int n = 0; n < 5; ++n)
    EXPECT_NEAR(h(n, n), lo.energies(n), 1e-13);
}

TEST(FockGroundState, UncoupledProduct)
{
  auto spec = chain(2, 1.0);
  spec.coupling = 0.0;
  auto pot = build_potential(spec);
  auto fock = fock_ground_state(pot, 6, 1);
  EXPECT_NEAR(fock.energy, std::sqrt(pot.V(0, 0)), 1e-12); // 2 x omega/2
  EXPECT_NEAR(schmidt(fock.state).coefficients(0), 1.0, 1e-12);
}

TEST(FockGroundState, EnergyMatchesNormalModesAndDecreasesWithCutoff)
{
  auto pot = build_potential(chain(2, 1.0));
  const double exact = ground_energy(pot);
  double prev = std::numeric_limits<double>::infinity();
  for (Eigen::Index d : {2, 4, 8, 12, 20}) {
    const double e = fock_ground_state(pot, d, 1).energy;
    EXPECT_LE(e, prev + 1e-12) << "d=" << d;
    EXPECT_GE(e, exact - 1e-10) << "d=" << d;
    prev = e;
  }
  EXPECT_NEAR(prev, exact, 1e-6);
}

TEST(FockGroundState, SiteEntropyMatchesCovarianceOracle)
{
  auto pot = build_potential(chain(2, 1.0));
  auto gs = ground_state_covariance(pot);
  const double gaussian = block_entropy(gs, BlockRegion{0, 1});
  const double s20 = von_neumann_entropy(reduced_density_left(fock_ground_state(pot, 20, 1).state));
  const double s40 = von_neumann_entropy(reduced_density_left(fock_ground_state(pot, 40, 1).state));
  ASSERT_LT(std::abs(s20 - s40), 1e-4); // cutoff converged before comparing
  EXPECT_NEAR(s20, gaussian, 1e-4);
  EXPECT_GT(gaussian, 0.0);
}

TEST(FockGroundState, SpectrumMatchesThermalProduct)
{
  auto pot = build_potential(chain(2, 1.0));
  auto gs = ground_state_covariance(pot);
  auto predicted = entanglement_spectrum(gs, BlockRegion{0, 1}, 10);
  auto fock = reduced_density_left(fock_ground_state(pot, 20, 1).state).eigenvalues();
  for (std::size_t k = 0; k < predicted.size(); ++k)
    EXPECT_NEAR(fock(fock.size() - 1 - static_cast<Eigen::Index>(k)), predicted[k], 1e-3);
}

TEST(FockGroundState, ThreeSiteChainAgainstCovariance)
{
  auto pot = build_potential(chain(3, 0.7));
  auto gs = ground_state_covariance(pot);
  auto fock = fock_ground_state(pot, 14, 1);
  EXPECT_NEAR(fock.energy, ground_energy(pot), 1e-6);
  EXPECT_NEAR(von_neumann_entropy(reduced_density_left(fock.state)), block_entropy(gs, BlockRegion{0, 1}), 1e-4);
}

TEST(FockGroundState, RejectsOversizedBasis)
{
  auto pot = build_potential(chain(5, 1.0));
  EXPECT_THROW(fock_ground_state(pot, 6, 2), InvalidInput); // 7776 > 4096
  EXPECT_THROW(fock_ground_state(pot, 1, 2), InvalidInput);
  EXPECT_THROW(fock_ground_state(pot, 4, 0), InvalidInput);
}
