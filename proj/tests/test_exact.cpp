#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lmc/datagen.hpp"
#include "lmc/errors.hpp"
#include "lmc/exact.hpp"
#include "lmc/linalg.hpp"
#include "lmc/random.hpp"
#include "oracle.hpp"

using namespace lmc;

namespace {

ExactConfig config(std::size_t d, std::uint64_t seed,
                   std::optional<std::size_t> tau = std::nullopt) {
  ExactConfig cfg;
  cfg.d = d;
  cfg.seed = seed;
  cfg.tau = tau;
  return cfg;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

Dictionary dictionary_of(const DenseMatrix& cols) {
  Dictionary d(cols.rows());
  for (std::size_t j = 0; j < cols.cols(); ++j) d.append(cols.column(j));
  return d;
}

}  // namespace

TEST(ExactConfig, Validation) {
  EXPECT_THROW(config(0, 0).validate(5), ConfigError);
  EXPECT_THROW(config(6, 0).validate(5), ConfigError);
  EXPECT_THROW(config(3, 0, 4).validate(5), ConfigError);
  EXPECT_THROW(config(3, 0, 0).validate(5), ConfigError);
  ExactConfig bad = config(3, 0);
  bad.zero_tol = 0.0;
  EXPECT_THROW(bad.validate(5), ConfigError);
  EXPECT_NO_THROW(config(3, 0, 3).validate(5));
}

TEST(Dictionary, CountersStartAtZeroAndCacheSpansColumns) {
  Rng rng(1);
  const DenseMatrix cols = gaussian_matrix(10, 4, rng);
  Dictionary dict = dictionary_of(cols);
  ASSERT_EQ(dict.counter().size(), 4u);
  for (std::size_t c : dict.counter()) EXPECT_EQ(c, 0u);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_LE(dict.orth_cache().residual(cols.column(j)), 1e-8 * norm2(cols.column(j)));
  }
  EXPECT_EQ(dict.raw_columns(), cols);
}

TEST(ExactTest, EmptyDictionaryRejectsNonzero) {
  const Dictionary dict(6);
  const std::vector<std::size_t> omega{0, 2, 4};
  EXPECT_FALSE(exact_test(dict, omega, Vector{1.0, 0.0, 0.0}, config(3, 0)));
}

TEST(ExactTest, LinearCombinationAccepted) {
  Rng rng(2);
  const DenseMatrix cols = gaussian_matrix(12, 3, rng);
  const Dictionary dict = dictionary_of(cols);
  const Vector v = multiply(cols, Vector{0.7, -1.3, 0.0});
  const IndexSet omega = sample_without_replacement(12, 6, rng);
  EXPECT_TRUE(exact_test(dict, omega.indices, gather(v, omega.indices), config(6, 0)));
}

TEST(ExactTest, FreshGaussianColumnIsNeverInSpan) {
  Rng rng(3);
  const std::size_t m = 30, d = 12;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t s = trial % (d - 1);  // s < d - 1
    const DenseMatrix cols = gaussian_matrix(m, s, rng);
    const Dictionary dict = dictionary_of(cols);
    const IndexSet omega = sample_without_replacement(m, d, rng);
    const Vector v = gather(gaussian_vector(m, rng), omega.indices);
    EXPECT_FALSE(exact_test(dict, omega.indices, v, config(d, 0)));
    const double res = s == 0 ? norm2(v)
                              : project_residual(v, cols.restrict_rows(omega.indices));
    EXPECT_GT(res, 1e-6 * norm2(v));
  }
}

TEST(RecordSupport, ZeroAndUnitCoefficients) {
  Rng rng(4);
  Dictionary dict = dictionary_of(gaussian_matrix(5, 3, rng));
  record_support(dict, Vector{0.0, 0.0, 0.0}, 1e-8);
  EXPECT_EQ(std::vector<std::size_t>(dict.counter().begin(), dict.counter().end()),
            (std::vector<std::size_t>{0, 0, 0}));
  record_support(dict, Vector{0.0, 1.0, 0.0}, 1e-8);
  EXPECT_EQ(std::vector<std::size_t>(dict.counter().begin(), dict.counter().end()),
            (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_THROW(record_support(dict, Vector{1.0}, 1e-8), DimensionMismatch);
}

TEST(RecordSupport, NoiseColumnsGetZeroCoefficients) {
  // Clean column against a dictionary of r clean and s noise columns with
  // s <= d - r - 1: the noise coefficients vanish.
  Rng rng(5);
  const std::size_t m = 40, r = 3, s = 4, d = 10;
  for (int trial = 0; trial < 200; ++trial) {
    const DenseMatrix u = gaussian_matrix(m, r, rng);
    DenseMatrix dict_cols = multiply(u, gaussian_matrix(r, r, rng));
    for (std::size_t j = 0; j < s; ++j) dict_cols.append_column(gaussian_vector(m, rng));
    Dictionary dict = dictionary_of(dict_cols);
    const Vector v = multiply(u, gaussian_vector(r, rng));
    const IndexSet omega = sample_without_replacement(m, d, rng);
    const Vector coeffs = subsampled_coefficients(dict.restricted(omega.indices),
                                                  gather(v, omega.indices));
    record_support(dict, coeffs, 1e-8);
    for (std::size_t j = 0; j < r + s; ++j) {
      EXPECT_EQ(dict.counter()[j], j < r ? 1u : 0u) << "trial " << trial;
    }
  }
}

TEST(SparseRepresent, ScaledSingleAtom) {
  Rng rng(6);
  const DenseMatrix dict = gaussian_matrix(8, 5, rng);
  Vector v = dict.column(3);
  for (double& x : v) x *= 2.0;
  const auto fit = sparse_represent(dict, v, 1, 1e-8);
  ASSERT_TRUE(fit);
  EXPECT_EQ(fit->support, std::vector<std::size_t>{3});
  EXPECT_NEAR(fit->coefficients[0], 2.0, 1e-12);
}

TEST(SparseRepresent, NeedsMoreThanTauAtoms) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t tau = 1 + trial % 3;
    const DenseMatrix dict = gaussian_matrix(12, 6, rng);
    Vector v(12, 0.0);
    for (std::size_t j = 0; j <= tau; ++j) {
      const double w = 0.5 + static_cast<double>(j);
      for (std::size_t i = 0; i < 12; ++i) v[i] += w * dict(i, j);
    }
    EXPECT_FALSE(sparse_represent(dict, v, tau, 1e-8));
    EXPECT_FALSE(oracle::brute_force_sparse(dict, v, tau, 1e-8));
    EXPECT_TRUE(sparse_represent(dict, v, tau + 1, 1e-8));
  }
}

TEST(SparseRepresent, MatchesBruteForceOnDependentDictionaries) {
  // Dictionaries with repeated directions force the enumeration path.
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 6 + trial % 5;
    const std::size_t rank = 2 + trial % 3;
    const std::size_t ncols = rank + 2 + trial % 4;
    const DenseMatrix dict =
        multiply(gaussian_matrix(rows, rank, rng), gaussian_matrix(rank, ncols, rng));
    const std::size_t atoms = 1 + trial % 3;
    Vector coeff(ncols, 0.0);
    IndexSet pick = sample_without_replacement(ncols, atoms, rng);
    for (std::size_t j : pick.indices) coeff[j] = 1.0 + rng() % 3;
    const Vector v = multiply(dict, coeff);
    for (std::size_t tau = 1; tau <= 3; ++tau) {
      const auto got = sparse_represent(dict, v, tau, 1e-8);
      const auto want = oracle::brute_force_sparse(dict, v, tau, 1e-8);
      ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial << " tau " << tau;
      if (!got) continue;
      EXPECT_EQ(got->support, want->support);
      Vector recon(rows, 0.0);
      for (std::size_t s = 0; s < got->support.size(); ++s)
        for (std::size_t i = 0; i < rows; ++i)
          recon[i] += got->coefficients[s] * dict(i, got->support[s]);
      for (std::size_t i = 0; i < rows; ++i) recon[i] -= v[i];
      EXPECT_LE(norm2(recon), 1e-8 * norm2(v));
    }
  }
}

TEST(SparseRepresent, MatchesBruteForceOnGenericDictionaries) {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 5 + trial % 6;
    const std::size_t ncols = 1 + trial % 5;
    const DenseMatrix dict = gaussian_matrix(rows, ncols, rng);
    Vector coeff(ncols, 0.0);
    for (std::size_t j = 0; j < ncols; ++j) coeff[j] = (rng() % 2) ? 1.5 : 0.0;
    Vector v = multiply(dict, coeff);
    if (trial % 4 == 0) v = gaussian_vector(rows, rng);
    for (std::size_t tau = 1; tau <= 3; ++tau) {
      const auto got = sparse_represent(dict, v, tau, 1e-8);
      const auto want = oracle::brute_force_sparse(dict, v, tau, 1e-8);
      ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial;
      if (got) EXPECT_EQ(got->support, want->support);
    }
  }
}

TEST(SparseRepresent, FullTauReducesToExactTest) {
  Rng rng(10);
  const std::size_t m = 20, d = 8;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 6;
    const DenseMatrix cols = gaussian_matrix(m, k, rng);
    const Dictionary dict = dictionary_of(cols);
    const IndexSet omega = sample_without_replacement(m, d, rng);
    const Vector full = trial % 2 ? multiply(cols, gaussian_vector(k, rng))
                                  : gaussian_vector(m, rng);
    const Vector v = gather(full, omega.indices);
    const bool test = exact_test(dict, omega.indices, v, config(d, 0));
    EXPECT_EQ(sparse_represent(dict.restricted(omega.indices), v, k, 1e-8).has_value(),
              test);
  }
}

TEST(SparseRepresent, CombinationCap) {
  Rng rng(11);
  const DenseMatrix dict = gaussian_matrix(10, 30, rng);
  const Vector v = gaussian_vector(10, rng);
  EXPECT_THROW(sparse_represent(dict, v, 5, 1e-8, 1000), CombinatorialBudgetExceeded);
}

TEST(RunExact, NoiselessRecovery) {
  for (int s = 0; s < 10; ++s) {
    const Instance inst = gen_gaussian_lowrank(50, 500, 5, 40 + s);
    const Truth truth{&inst.L, {}};
    const ExactOutcome out = run_exact(inst.M, config(20, s), &truth);
    EXPECT_LE(*out.report.frob_abs_error, 1e-6);
    EXPECT_EQ(out.result.recovered_rank, 5u);
    EXPECT_TRUE(out.result.outlier_indices.empty());
    EXPECT_EQ(out.report.K, 5u);
    EXPECT_EQ(*out.report.support_exact, true);
  }
}

TEST(RunExact, AllNoiseInput) {
  Rng rng(12);
  const std::size_t m = 20, n = 10, d = 15;
  DenseMatrix noise(m, n);
  for (std::size_t t = 0; t < n; ++t) noise.set_column(t, random_unit_vector(m, rng));
  const ExactOutcome out = run_exact(noise, config(d, 1));
  EXPECT_EQ(out.report.K, n);
  for (std::size_t c : out.result.counter) EXPECT_EQ(c, 0u);
  EXPECT_EQ(out.result.outlier_indices, iota(n));
  EXPECT_TRUE(out.result.basis_indices.empty());
  EXPECT_EQ(out.result.recovered_rank, 0u);
  EXPECT_EQ(out.result.basis.cols(), 0u);
}

TEST(RunExact, OutlierRemovalOverSeeds) {
  // Clean basis counters end >= 1, noise counters stay 0, support exact.
  const std::size_t m = 30, n = 200, r = 3, d = 12;
  for (int s = 0; s < 100; ++s) {
    const Instance base = gen_gaussian_lowrank(m, n, r, 500 + s);
    const Instance inst =
        apply_noise(base, NoiseSpec::sparse_columns(d - r - 1), 600 + s);
    const Truth truth{&inst.L, inst.noise_support};
    const ExactOutcome out = run_exact(inst.M, config(d, 700 + s), &truth);
    const auto& res = out.result;
    std::vector<std::size_t> absorbed = res.basis_indices;
    absorbed.insert(absorbed.end(), res.outlier_indices.begin(), res.outlier_indices.end());
    std::sort(absorbed.begin(), absorbed.end());
    std::size_t dict_pos = 0;
    for (std::size_t t : absorbed) {
      const bool noisy = std::binary_search(inst.noise_support.begin(),
                                            inst.noise_support.end(), t);
      if (noisy) {
        EXPECT_EQ(res.counter[dict_pos], 0u) << "seed " << s;
      } else {
        EXPECT_GE(res.counter[dict_pos], 1u) << "seed " << s;
      }
      ++dict_pos;
    }
    EXPECT_TRUE(*out.report.support_exact) << "seed " << s;
    EXPECT_LE(*out.report.frob_abs_error, 1e-6) << "seed " << s;
    EXPECT_EQ(res.recovered_rank, r);
  }
}

TEST(RunExact, SparseModeWithLargeTauMatchesFullTest) {
  const std::size_t m = 30, n = 150, r = 4, d = 12;
  for (int s = 0; s < 30; ++s) {
    const Instance base = gen_gaussian_lowrank(m, n, r, 800 + s);
    const Instance inst =
        apply_noise(base, NoiseSpec::sparse_columns(d - r - 1), 900 + s);
    const ExactOutcome full = run_exact(inst.M, config(d, s));
    const ExactOutcome sparse = run_exact(inst.M, config(d, s, d));
    ASSERT_EQ(full.report.columns.size(), sparse.report.columns.size());
    for (std::size_t t = 0; t < n; ++t) {
      EXPECT_EQ(full.report.columns[t].decision, sparse.report.columns[t].decision)
          << "seed " << s << " column " << t;
    }
    EXPECT_EQ(full.result.outlier_indices, sparse.result.outlier_indices);
    EXPECT_LE(frobenius_norm(subtract(full.result.recovered, sparse.result.recovered)),
              1e-8);
  }
}

TEST(RunExact, MixtureRecoveredWithSmallSamples) {
  int good = 0;
  for (int s = 0; s < 20; ++s) {
    const Instance inst = gen_mixture(40, 10, 3, 3, 50 + s);
    const Truth truth{&inst.L, {}};
    const ExactOutcome out = run_exact(inst.M, config(6, s, 3), &truth);
    if (*out.report.frob_abs_error <= 1e-6 && out.result.recovered_rank == 9) ++good;
  }
  EXPECT_GE(good, 18);
}

TEST(RunExact, EntriesSampledAccounting) {
  const Instance inst = gen_gaussian_lowrank(25, 80, 3, 5);
  const ExactOutcome out = run_exact(inst.M, config(9, 1));
  EXPECT_EQ(out.report.entries_sampled, 9u * 80u + (25u - 9u) * out.report.K);
}

TEST(MuTau, FullSubsetMatchesIncoherence) {
  Rng rng(13);
  const DenseMatrix cols = gaussian_matrix(15, 4, rng);
  EXPECT_NEAR(mu_tau(cols, 4), incoherence(orthonormalize(cols)), 1e-12);
  double best = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    const std::vector<std::size_t> one{j};
    best = std::max(best, incoherence(orthonormalize(cols.select_columns(one))));
  }
  EXPECT_NEAR(mu_tau(cols, 1), best, 1e-12);
}
