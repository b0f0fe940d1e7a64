#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "adasel/gfk.hpp"
#include "fixtures.hpp"

namespace adasel {
namespace {

using testing::random_subspace;
using testing::relative_frobenius;

SubspaceBasis line(double alpha) {
  Matrix b(2, 1);
  b << std::cos(alpha), std::sin(alpha);
  return SubspaceBasis::from_orthonormal(b);
}

// ∫₀¹ cos², −cos·sin, sin² of (yθ) dy, evaluated with 40-digit quadrature.
struct LambdaOracle {
  double theta, l1, l2, l3;
};
constexpr LambdaOracle kLambdaOracle[] = {
    {1e-6, 0.99999999999966666667, -4.9999999999983333333e-7, 3.3333333333326666667e-13},
    {1e-3, 0.99999966666673333333, -0.00049999983333335555555, 3.3333326666667301587e-7},
    {0.0099, 0.99996733064039136238, -0.0049498382856132964274, 0.000032669359608637619194},
    {0.0101, 0.99996599736039593356, -0.0050498282855022275378, 0.000034002639604066438951},
    {0.5, 0.92073549240394825333, -0.2298488470659301413, 0.079264507596051746674},
    {1.2, 0.64072149594815644303, -0.36195702407109281242, 0.35927850405184355697},
    {std::numbers::pi / 2, 0.5, -0.31830988618379067154, 0.5},
};

TEST(LambdaEntry, MatchesQuadratureOracle) {
  for (const auto& o : kLambdaOracle) {
    const LambdaEntry e = lambda_entry(o.theta);
    EXPECT_NEAR(e.l1, o.l1, 1e-15) << o.theta;
    EXPECT_NEAR(e.l2 / o.l2, 1.0, 1e-13) << o.theta;
    EXPECT_NEAR(e.l3, o.l3, 1e-15) << o.theta;
  }
}

TEST(LambdaEntry, ZeroAngleIsProjection) {
  const LambdaEntry e = lambda_entry(0.0);
  EXPECT_EQ(e.l1, 1.0);
  EXPECT_EQ(e.l2, 0.0);
  EXPECT_EQ(e.l3, 0.0);
}

TEST(LambdaEntry, RejectsOutOfRangeAngles) {
  EXPECT_THROW(lambda_entry(-0.1), Error);
  EXPECT_THROW(lambda_entry(2.0), Error);
  EXPECT_THROW(lambda_entry(std::nan("")), Error);
}

TEST(GeodesicFlow, EndpointsAreTheTwoSubspaces) {
  std::mt19937_64 rng(11);
  const SubspaceBasis x = random_subspace(rng, 10, 3);
  const SubspaceBasis z = random_subspace(rng, 10, 3);
  const PrincipalDecomposition d = principal_angles(x, z);
  const GeodesicFlow flow(d, x);
  EXPECT_LT((flow.at(0.0).matrix - x.basis() * d.left_rotation).norm(), 1e-12);
  EXPECT_LT((flow.at(1.0).matrix - z.basis() * d.right_rotation).norm(), 1e-12);
  for (double y : {0.25, 0.5, 0.8}) {
    EXPECT_LT(orthonormality_error(flow.at(y).matrix), 1e-12);
  }
  EXPECT_THROW(flow.at(-0.01), Error);
  EXPECT_THROW(flow.at(1.01), Error);
}

TEST(GeodesicFlow, PlanarFlowRotatesTheLine) {
  const double alpha = 0.7;
  const PrincipalDecomposition d = principal_angles(line(0.0), line(alpha));
  for (double y : {0.0, 0.3, 1.0}) {
    const Matrix p = geodesic_flow(d, line(0.0), y).matrix;
    EXPECT_NEAR(std::abs(p(0, 0)), std::cos(y * alpha), 1e-14);
    EXPECT_NEAR(std::abs(p(1, 0)), std::sin(y * alpha), 1e-14);
  }
}

TEST(GfkKernel, PlanarCaseMatchesAnalyticIntegral) {
  for (double alpha : {0.1, 0.7, std::numbers::pi / 2}) {
    const PrincipalDecomposition d = principal_angles(line(0.0), line(alpha));
    const Matrix w = gfk_kernel(d, line(0.0)).matrix();
    const double s = std::sin(2 * alpha) / (4 * alpha);
    const double off = (1 - std::cos(2 * alpha)) / (4 * alpha);
    EXPECT_NEAR(w(0, 0), 0.5 + s, 1e-12);
    EXPECT_NEAR(w(1, 1), 0.5 - s, 1e-12);
    EXPECT_NEAR(w(0, 1), off, 1e-12);
    EXPECT_NEAR(w(1, 0), off, 1e-12);
  }
}

TEST(GfkKernel, IdenticalSubspacesGiveProjection) {
  std::mt19937_64 rng(12);
  const SubspaceBasis x = random_subspace(rng, 9, 3);
  const Matrix w = gfk_kernel(principal_angles(x, x), x).matrix();
  EXPECT_LT((w - x.basis() * x.basis().transpose()).norm(), 1e-12);
}

TEST(GfkKernel, MatchesTrapezoidOracle) {
  std::mt19937_64 rng(13);
  const SubspaceBasis x = random_subspace(rng, 12, 3);
  const SubspaceBasis z = random_subspace(rng, 12, 3);
  const PrincipalDecomposition d = principal_angles(x, z);
  const Matrix w = gfk_kernel(d, x).matrix();
  EXPECT_LT(relative_frobenius(w, kernel_integral_oracle(d, x, 2000)), 1e-6);
  // Halving the step should cut the oracle error by about four.
  const double e1 = relative_frobenius(w, kernel_integral_oracle(d, x, 100));
  const double e2 = relative_frobenius(w, kernel_integral_oracle(d, x, 200));
  EXPECT_NEAR(e1 / e2, 4.0, 0.1);
  EXPECT_THROW(kernel_integral_oracle(d, x, 5), Error);
}

TEST(GfkKernel, SymmetricPsdAndTraceIsB) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const SubspaceBasis x = random_subspace(rng, 8, 3);
    const SubspaceBasis z = random_subspace(rng, 8, 3);
    const Matrix w = gfk_kernel(principal_angles(x, z), x).matrix();
    EXPECT_LT((w - w.transpose()).norm(), 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(w);
    EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-12);
    // Each θ(y) has b orthonormal columns, so trace θθᵀ = b for every y.
    EXPECT_NEAR(w.trace(), 3.0, 1e-12);
  }
}

TEST(GfkKernel, DirectionSymmetry) {
  std::mt19937_64 rng(15);
  const SubspaceBasis x = random_subspace(rng, 10, 4);
  const SubspaceBasis z = random_subspace(rng, 10, 4);
  const Matrix wxz = gfk_kernel(principal_angles(x, z), x).matrix();
  const Matrix wzx = gfk_kernel(principal_angles(z, x), z).matrix();
  EXPECT_LT((wxz - wzx).norm(), 1e-10);
}

TEST(GfkKernel, FactorReproducesDenseMatrix) {
  std::mt19937_64 rng(16);
  const SubspaceBasis x = random_subspace(rng, 10, 2);
  const SubspaceBasis z = random_subspace(rng, 10, 2);
  const GeodesicKernel k = gfk_kernel(principal_angles(x, z), x);
  EXPECT_EQ(k.factor().cols(), 4);
  EXPECT_TRUE(k.source_decomposition().has_value());
  EXPECT_EQ(k.lambda1().size(), 2);
}

TEST(KernelDistance, ZeroForEqualFeaturesAndPositiveOtherwise) {
  std::mt19937_64 rng(17);
  const SubspaceBasis x = random_subspace(rng, 6, 2);
  const GeodesicKernel k = gfk_kernel(principal_angles(x, x), x);
  const Vector t = testing::gaussian(rng, 6, 1).col(0);
  EXPECT_EQ(kernel_distance(t, t, k), 0.0);
  const Vector r = t + x.basis().col(0);
  EXPECT_NEAR(kernel_distance(t, r, k), 1.0, 1e-12);
}

TEST(KernelDistance, DimensionChecksAndPsdGuard) {
  const GeodesicKernel neg = GeodesicKernel::from_matrix(-Matrix::Identity(3, 3));
  const Vector t = Vector::Ones(3);
  try {
    kernel_distance(t, Vector::Zero(3), neg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveSemidefinite);
  }
  const GeodesicKernel id = GeodesicKernel::from_matrix(Matrix::Identity(3, 3));
  EXPECT_THROW(kernel_distance(Vector::Ones(2), Vector::Ones(3), id), Error);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.5;
  EXPECT_THROW(GeodesicKernel::from_matrix(asym), Error);
  EXPECT_THROW(GeodesicKernel::from_matrix(Matrix::Identity(2, 3)), Error);
}

TEST(Similarity, RangeAndDomain) {
  EXPECT_EQ(similarity(0.0), 1.0);
  EXPECT_NEAR(similarity(1.0), std::exp(-1.0), 1e-16);
  EXPECT_GT(similarity(700.0), 0.0);
  EXPECT_THROW(similarity(-1e-3), Error);
  EXPECT_THROW(similarity(std::nan("")), Error);
}

}  // namespace
}  // namespace adasel
