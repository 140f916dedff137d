#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lmc/errors.hpp"
#include "lmc/linalg.hpp"
#include "lmc/random.hpp"
#include "oracle.hpp"

using namespace lmc;

namespace {

DenseMatrix cols(std::size_t m, std::vector<Vector> c) {
  return DenseMatrix::from_columns(m, c);
}

Vector e(std::size_t m, std::size_t i) {
  Vector v(m, 0.0);
  v[i] = 1.0;
  return v;
}

// Column j of `a` equals +/- `v` within tol.
bool same_up_to_sign(const DenseMatrix& a, std::size_t j, const Vector& v,
                     double tol = 1e-12) {
  const Vector c = a.column(j);
  double plus = 0.0, minus = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    plus = std::max(plus, std::abs(c[i] - v[i]));
    minus = std::max(minus, std::abs(c[i] + v[i]));
  }
  return std::min(plus, minus) <= tol;
}

}  // namespace

TEST(Matrix, RejectsNonFiniteAndBadShape) {
  EXPECT_THROW(DenseMatrix(2, 2, {1, 2, 3}), DimensionMismatch);
  EXPECT_THROW(DenseMatrix(1, 2, {1, NAN}), NonFiniteValue);
  DenseMatrix a(2, 2);
  EXPECT_THROW(a.set(0, 0, INFINITY), NonFiniteValue);
}

TEST(Matrix, RestrictRowsKeepsDuplicates) {
  const DenseMatrix a(3, 1, {1, 2, 3});
  const std::vector<std::size_t> rows{2, 0, 2};
  const DenseMatrix r = a.restrict_rows(rows);
  EXPECT_EQ(r, DenseMatrix(3, 1, {3, 1, 3}));
}

TEST(Orthonormalize, StandardBasisUnchanged) {
  const DenseMatrix q = orthonormalize(cols(3, {e(3, 0), e(3, 1)}));
  ASSERT_EQ(q.cols(), 2u);
  EXPECT_TRUE(same_up_to_sign(q, 0, e(3, 0)));
  EXPECT_TRUE(same_up_to_sign(q, 1, e(3, 1)));
}

TEST(Orthonormalize, CollinearPairCollapses) {
  const Vector u{3.0, -1.0, 2.0, 0.5};
  Vector u2 = u;
  for (double& x : u2) x *= 2.0;
  const DenseMatrix q = orthonormalize(cols(4, {u, u2}));
  ASSERT_EQ(q.cols(), 1u);
  Vector unit = u;
  const double n = norm2(u);
  for (double& x : unit) x /= n;
  EXPECT_TRUE(same_up_to_sign(q, 0, unit));
}

TEST(Orthonormalize, HandGramSchmidt) {
  const double s = 1.0 / std::sqrt(2.0);
  const DenseMatrix q = orthonormalize(cols(2, {{1, 1}, {1, 0}}));
  ASSERT_EQ(q.cols(), 2u);
  EXPECT_TRUE(same_up_to_sign(q, 0, {s, s}));
  EXPECT_TRUE(same_up_to_sign(q, 1, {s, -s}));
}

TEST(Orthonormalize, AllZeroGivesEmptyBasis) {
  const DenseMatrix q = orthonormalize(DenseMatrix(5, 3));
  EXPECT_EQ(q.rows(), 5u);
  EXPECT_EQ(q.cols(), 0u);
}

TEST(Orthonormalize, OrthonormalAndSpanPreservingOnRandomInput) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 5 + trial % 30;
    const std::size_t r = 1 + trial % std::min<std::size_t>(m, 8);
    // rank-r product with extra dependent columns
    const DenseMatrix a =
        multiply(gaussian_matrix(m, r, rng), gaussian_matrix(r, r + 3, rng));
    const DenseMatrix q = orthonormalize(a);
    EXPECT_EQ(q.cols(), r);
    EXPECT_LE(orthonormality_defect(q), 1e-10);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Vector c = a.column(j);
      EXPECT_LE(project_residual(c, q), 1e-8 * norm2(c));
    }
  }
}

TEST(ProjectResidual, InSpanIsZero) {
  Rng rng(3);
  const DenseMatrix b = gaussian_matrix(10, 3, rng);
  const Vector v = multiply(b, Vector{1.0, -2.0, 0.5});
  EXPECT_LE(project_residual(v, b), 1e-12 * norm2(v));
}

TEST(ProjectResidual, EmptyBasis) {
  EXPECT_DOUBLE_EQ(project_residual(Vector{3, 4}, DenseMatrix(2, 0)), 5.0);
}

TEST(ProjectResidual, MatchesNormalEquations) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 6 + trial % 20;
    const std::size_t k = 1 + trial % 5;
    const DenseMatrix b = gaussian_matrix(m, k, rng);
    const Vector v = gaussian_vector(m, rng);
    EXPECT_NEAR(project_residual(v, b), oracle::normal_residual(b, v), 1e-10);
  }
}

TEST(ProjectResidual, Pythagoras) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 4 + trial % 25;
    const DenseMatrix q = orthonormalize(gaussian_matrix(m, 1 + trial % 4, rng));
    const Vector v = gaussian_vector(m, rng);
    const double res = project_residual(v, q);
    const Vector coeff = multiply(q.transpose(), v);
    const double proj = norm2(coeff);
    const double total = norm2(v);
    EXPECT_NEAR(res * res + proj * proj, total * total, 1e-8 * total * total);
  }
}

TEST(SubsampledComplete, ConstantColumn) {
  const DenseMatrix full(4, 1, {1, 1, 1, 1});
  const std::vector<std::size_t> omega{0, 1};
  const Vector out = subsampled_complete(full, full.restrict_rows(omega), Vector{2, 2});
  ASSERT_EQ(out.size(), 4u);
  for (double x : out) EXPECT_NEAR(x, 2.0, 1e-14);
}

TEST(SubsampledComplete, ConsistentSystemIsExact) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 30;
    const DenseMatrix u = orthonormalize(gaussian_matrix(m, 4, rng));
    const Vector col = multiply(u, gaussian_vector(4, rng));
    const IndexSet omega = sample_without_replacement(m, 12, rng);
    const Vector out = subsampled_complete(u, u.restrict_rows(omega.indices),
                                           gather(col, omega.indices));
    Vector diff = out;
    for (std::size_t i = 0; i < m; ++i) diff[i] -= col[i];
    EXPECT_LE(norm2(diff), 1e-10 * norm2(col));
  }
}

TEST(SubsampledComplete, MatchesPseudoinverseOracle) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 25;
    const DenseMatrix b = gaussian_matrix(m, 3, rng);
    const IndexSet omega = sample_with_replacement(m, 9, rng);
    const DenseMatrix rows = b.restrict_rows(omega.indices);
    const Vector v = gaussian_vector(omega.size(), rng);
    const Vector got = subsampled_complete(b, rows, v);
    const Eigen::VectorXd want = oracle::to_eigen(b) * oracle::pinv_solve(rows, v);
    for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(got[i], want(i), 1e-9);
  }
}

TEST(SubsampledComplete, RankDeficientNamesDimension) {
  const DenseMatrix full = cols(4, {{1, 0, 0, 0}, {0, 1, 0, 0}});
  const std::vector<std::size_t> omega{0, 2};
  try {
    subsampled_complete(full, full.restrict_rows(omega), Vector{1, 0});
    FAIL() << "expected RankDeficient";
  } catch (const RankDeficient& err) {
    EXPECT_EQ(err.rows(), 2u);
    EXPECT_EQ(err.cols(), 2u);
    EXPECT_EQ(err.rank(), 1u);
  }
}

TEST(PrincipalAngle, Examples) {
  const DenseMatrix u = cols(2, {e(2, 0)});
  EXPECT_NEAR(principal_angle(u, u), 0.0, 1e-12);
  EXPECT_NEAR(principal_angle(u, cols(2, {e(2, 1)})), std::numbers::pi / 2, 1e-12);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(principal_angle(u, cols(2, {{s, s}})), std::numbers::pi / 4, 1e-12);
}

TEST(PrincipalAngle, DimensionMismatchThrows) {
  EXPECT_THROW(principal_angle(cols(2, {e(2, 0)}), cols(3, {e(3, 0)})),
               DimensionMismatch);
}

TEST(PrincipalAngle, SubspaceInclusionAndAsymmetry) {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const DenseMatrix v = orthonormalize(gaussian_matrix(20, 5, rng));
    const DenseMatrix u = orthonormalize(multiply(v, gaussian_matrix(5, 2, rng)));
    EXPECT_NEAR(principal_angle(u, v), 0.0, 1e-7);
    EXPECT_NEAR(principal_angle(v, u), std::numbers::pi / 2, 1e-12);
  }
}

TEST(PrincipalAngle, AgreesWithVectorAngleForLines) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector a = random_unit_vector(6, rng);
    const Vector b = random_unit_vector(6, rng);
    EXPECT_NEAR(principal_angle(cols(6, {a}), cols(6, {b})), vector_angle(a, b),
                1e-7);
  }
}

TEST(Incoherence, CoordinateSubspaceIsMaximal) {
  const std::size_t m = 12, r = 3;
  DenseMatrix u(m, r);
  for (std::size_t j = 0; j < r; ++j) u.set(j, j, 1.0);
  EXPECT_DOUBLE_EQ(incoherence(u), double(m) / double(r));
}

TEST(Incoherence, RejectsNonOrthonormal) {
  EXPECT_THROW(incoherence(cols(2, {{2.0, 0.0}})), NotOrthonormal);
}

TEST(Incoherence, RangeOnRandomBases) {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 10 + trial % 40;
    const std::size_t r = 1 + trial % 7;
    const double mu = incoherence(orthonormalize(gaussian_matrix(m, r, rng)));
    EXPECT_GE(mu, 1.0 - 1e-12);
    EXPECT_LE(mu, double(m) / double(r) + 1e-12);
  }
}

TEST(NumericalRank, Examples) {
  EXPECT_EQ(numerical_rank(DenseMatrix::identity(3)), 3u);
  EXPECT_EQ(numerical_rank(DenseMatrix(4, 3)), 0u);
  const DenseMatrix uv = multiply(cols(3, {{1, 2, 3}}), DenseMatrix(1, 4, {1, -1, 2, 5}));
  EXPECT_EQ(numerical_rank(uv), 1u);
}

TEST(NumericalRank, OrthonormalizationPreservesSubsampledRank) {
  // Rank of the sampled rows is unchanged by orthonormalizing first.
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 20 + trial % 30;
    const std::size_t r = 1 + trial % 6;
    const DenseMatrix a = gaussian_matrix(m, r, rng);
    const IndexSet omega = sample_without_replacement(m, 1 + trial % m, rng);
    const std::size_t lhs = numerical_rank(a.restrict_rows(omega.indices));
    EXPECT_EQ(lhs, numerical_rank(orthonormalize(a).restrict_rows(omega.indices)));
    EXPECT_EQ(lhs, oracle::rank(a.restrict_rows(omega.indices)));
  }
}

TEST(LeastSquares, SolveMatchesNormalEquations) {
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const DenseMatrix a = gaussian_matrix(15, 4, rng);
    const Vector v = gaussian_vector(15, rng);
    const LeastSquares ls(a);
    ASSERT_TRUE(ls.full_column_rank());
    const Vector x = ls.solve(v);
    const Eigen::VectorXd want = oracle::normal_solve(a, v);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(x[j], want(j), 1e-9);
  }
}

TEST(OrthoBasis, PopRestoresPreviousSpan) {
  Rng rng(17);
  OrthoBasis b(8);
  const Vector a = gaussian_vector(8, rng);
  const Vector c = gaussian_vector(8, rng);
  ASSERT_GT(b.append(a, 1e-12), 0.0);
  const double before = b.residual(c);
  ASSERT_GT(b.append(c, 1e-12), 0.0);
  EXPECT_NEAR(b.residual(c), 0.0, 1e-12);
  b.pop_back();
  EXPECT_EQ(b.size(), 1u);
  EXPECT_NEAR(b.residual(c), before, 1e-14);
}

TEST(Random, DeriveSeedIsPureAndPathSensitive) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
}

TEST(Random, WithoutReplacementIsDistinct) {
  Rng rng(18);
  for (int trial = 0; trial < 100; ++trial) {
    IndexSet s = sample_without_replacement(30, 1 + trial % 30, rng);
    EXPECT_NO_THROW(s.validate(30));
    std::sort(s.indices.begin(), s.indices.end());
    EXPECT_EQ(std::adjacent_find(s.indices.begin(), s.indices.end()), s.indices.end());
  }
}

TEST(VectorAngle, SmallAnglesKeepPrecision) {
  for (double phi : {1e-10, 1e-6, 1e-3, 0.5, 1.5}) {
    const Vector a{1.0, 0.0, 0.0};
    const Vector b{std::cos(phi), std::sin(phi), 0.0};
    EXPECT_NEAR(vector_angle(a, b), phi, 1e-15 + 1e-13 * phi);
    const Vector neg{-b[0], -b[1], -b[2]};
    EXPECT_NEAR(vector_angle(a, neg), phi, 1e-15 + 1e-13 * phi);
  }
}
