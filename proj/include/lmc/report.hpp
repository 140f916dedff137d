#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmc/errors.hpp"
#include "lmc/matrix.hpp"

namespace lmc {

enum class Decision { Absorbed, Represented };

const char* to_string(Decision d) noexcept;

/// What happened to one streamed column.
struct ColumnRecord {
  Decision decision = Decision::Represented;
  double residual = 0.0;
  double threshold = 0.0;
  std::size_t basis_size = 0;  // k when the column arrived
};

/// Outcome of one streaming pass. Error fields are filled only when the
/// clean matrix was supplied.
struct RunReport {
  std::vector<ColumnRecord> columns;
  std::vector<double> per_column_error;
  std::optional<double> frob_abs_error;
  std::optional<double> frob_rel_error;
  std::size_t recovered_rank = 0;
  std::size_t K = 0;
  std::size_t fully_measured = 0;
  std::optional<bool> support_exact;
  std::uint64_t entries_sampled = 0;
  double wall_time = 0.0;
};

/// Ground truth handed to a run for error accounting. Columns listed in
/// noise_support are corrupted in the observation and are excluded from the
/// Frobenius comparison.
struct Truth {
  const DenseMatrix* clean = nullptr;
  std::vector<std::size_t> noise_support;
};

struct FrobeniusErrors {
  double abs = 0.0;
  double rel = 0.0;
};

/// l2 distance per column between estimate and truth.
std::vector<double> column_errors(const DenseMatrix& estimate,
                                  const DenseMatrix& truth);
/// ||(estimate - truth)_{:,C}||_F and its ratio to ||truth_{:,C}||_F, with C
/// the columns not listed in `excluded`.
FrobeniusErrors frobenius_errors(const DenseMatrix& estimate,
                                 const DenseMatrix& truth,
                                 std::span<const std::size_t> excluded = {});

/// Raised when a stream aborts mid-way; carries the report accumulated up
/// to the failing column.
class StreamError : public Error {
 public:
  StreamError(std::size_t column, const std::string& cause, RunReport partial)
      : Error("column " + std::to_string(column) + ": " + cause),
        column_(column),
        partial_(std::move(partial)) {}
  std::size_t column() const noexcept { return column_; }
  const RunReport& partial() const noexcept { return partial_; }

 private:
  std::size_t column_;
  RunReport partial_;
};

}  // namespace lmc
