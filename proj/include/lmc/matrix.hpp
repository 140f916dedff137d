#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lmc {

using Vector = std::vector<double>;

/// Dense real matrix stored row-major. Every stored entry is finite; the
/// mutating members reject NaN and Inf.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  /// Builds an m x columns.size() matrix; every column must have length m.
  static DenseMatrix from_columns(std::size_t rows,
                                  const std::vector<Vector>& columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> values() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);
  void append_column(std::span<const double> values);

  /// Rows picked in the given order; repeated indices give repeated rows.
  DenseMatrix restrict_rows(std::span<const std::size_t> rows) const;
  DenseMatrix select_columns(std::span<const std::size_t> cols) const;
  DenseMatrix transpose() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Row subset Omega of [0, m). Duplicates are only legal when
/// with_replacement is set.
struct IndexSet {
  std::vector<std::size_t> indices;
  bool with_replacement = false;

  std::size_t size() const noexcept { return indices.size(); }
  /// Throws DimensionMismatch / Error when the invariants do not hold for m.
  void validate(std::size_t m) const;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
Vector gather(std::span<const double> v, std::span<const std::size_t> idx);

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
Vector multiply(const DenseMatrix& a, std::span<const double> x);
/// Computes a^T b.
DenseMatrix transpose_multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_norm(const DenseMatrix& a);
double column_norm(const DenseMatrix& a, std::size_t j);
/// Largest absolute entry of a^T a - I.
double orthonormality_defect(const DenseMatrix& a);

}  // namespace lmc
