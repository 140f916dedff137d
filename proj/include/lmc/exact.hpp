#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lmc/linalg.hpp"
#include "lmc/matrix.hpp"
#include "lmc/report.hpp"

namespace lmc {

inline constexpr double kDefaultZeroTol = 1e-8;
inline constexpr std::size_t kDefaultCombinationCap = 2'000'000;

/// Fully measured columns in arrival order (kept raw, not orthonormalized),
/// the usage counter C, and an orthonormal basis of their span.
class Dictionary {
 public:
  explicit Dictionary(std::size_t rows) : rows_(rows), orth_(rows) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return counter_.size(); }
  bool empty() const noexcept { return counter_.empty(); }

  std::span<const double> column(std::size_t j) const {
    return {raw_.data() + j * rows_, rows_};
  }
  DenseMatrix raw_columns() const;
  /// Rows of the raw columns at the given indices (the B_Omega block).
  DenseMatrix restricted(std::span<const std::size_t> rows) const;
  std::span<const std::size_t> counter() const noexcept { return counter_; }
  const OrthoBasis& orth_cache() const noexcept { return orth_; }

  /// Adds a column with counter 0.
  void append(std::span<const double> column);
  void increment(std::size_t j);

 private:
  std::size_t rows_;
  std::vector<double> raw_;  // column-major
  std::vector<std::size_t> counter_;
  OrthoBasis orth_;
};

struct ExactConfig {
  std::size_t d = 1;
  double zero_tol = kDefaultZeroTol;
  std::optional<std::size_t> tau;  // present: tau-sparse (mixture) mode
  std::uint64_t seed = 0;
  std::size_t combination_cap = kDefaultCombinationCap;

  void validate(std::size_t m) const;
};

/// True when the sampled column lies in the span of the dictionary rows at
/// omega, i.e. its projection residual is at most zero_tol * ||v||.
bool exact_test(const Dictionary& dict, std::span<const std::size_t> omega,
                std::span<const double> sampled, const ExactConfig& cfg);

/// Increments counter[j] for every |coeffs[j]| > zero_tol * ||coeffs||_inf.
void record_support(Dictionary& dict, std::span<const double> coeffs,
                    double zero_tol);

struct SparseFit {
  std::vector<std::size_t> support;  // ascending dictionary indices
  Vector coefficients;               // aligned with support
  std::size_t combinations = 0;      // supports evaluated
};

/// First support of size <= tau (by size, then lexicographic) whose
/// least-squares residual is at most zero_tol * ||v||. std::nullopt when no
/// such support exists. Throws CombinatorialBudgetExceeded past `cap`.
std::optional<SparseFit> sparse_represent(
    const DenseMatrix& dict_rows, std::span<const double> sampled,
    std::size_t tau, double zero_tol,
    std::size_t cap = kDefaultCombinationCap);

struct RecoveryResult {
  DenseMatrix recovered;                  // M-hat
  DenseMatrix basis;                      // retained dictionary columns
  std::vector<std::size_t> basis_indices;    // stream positions kept
  std::vector<std::size_t> outlier_indices;  // stream positions removed
  std::vector<std::size_t> counter;          // final C, dictionary order
  std::size_t recovered_rank = 0;
};

struct ExactOutcome {
  RecoveryResult result;
  RunReport report;
};

/// Streams the columns of `observed`; tau absent runs the full-dictionary
/// test, tau present runs the tau-sparse test. Columns whose counter is
/// still 0 at the end are reported as outliers.
ExactOutcome run_exact(const DenseMatrix& observed, const ExactConfig& cfg,
                       const Truth* truth = nullptr);

/// Largest incoherence over the column spaces of all tau-subsets of
/// `columns`. Enumerates, so only meant for small diagnostic instances.
double mu_tau(const DenseMatrix& columns, std::size_t tau,
              std::size_t cap = 200'000);

}  // namespace lmc
