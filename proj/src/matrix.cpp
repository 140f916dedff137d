#include "lmc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lmc/errors.hpp"

namespace lmc {

namespace {

void require_finite(double v) {
  if (!std::isfinite(v)) {
    throw NonFiniteValue("non-finite value in matrix entry");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionMismatch("matrix data length " +
                            std::to_string(data_.size()) + " != " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::for_each(data_.begin(), data_.end(), require_finite);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out.data_[i * n + i] = 1.0;
  return out;
}

DenseMatrix DenseMatrix::from_columns(std::size_t rows,
                                      const std::vector<Vector>& columns) {
  DenseMatrix out(rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.set_column(j, columns[j]);
  }
  return out;
}

void DenseMatrix::set(std::size_t i, std::size_t j, double value) {
  require_finite(value);
  data_[i * cols_ + j] = value;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = data_[i * cols_ + j];
  return out;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> values) {
  if (values.size() != rows_) {
    throw DimensionMismatch("column length " + std::to_string(values.size()) +
                            " != rows " + std::to_string(rows_));
  }
  std::for_each(values.begin(), values.end(), require_finite);
  for (std::size_t i = 0; i < rows_; ++i) data_[i * cols_ + j] = values[i];
}

void DenseMatrix::append_column(std::span<const double> values) {
  if (cols_ == 0 && rows_ == 0) rows_ = values.size();
  if (values.size() != rows_) {
    throw DimensionMismatch("column length " + std::to_string(values.size()) +
                            " != rows " + std::to_string(rows_));
  }
  std::for_each(values.begin(), values.end(), require_finite);
  std::vector<double> grown(rows_ * (cols_ + 1));
  for (std::size_t i = 0; i < rows_; ++i) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_), cols_,
                grown.begin() + static_cast<std::ptrdiff_t>(i * (cols_ + 1)));
    grown[i * (cols_ + 1) + cols_] = values[i];
  }
  data_ = std::move(grown);
  ++cols_;
}

DenseMatrix DenseMatrix::restrict_rows(
    std::span<const std::size_t> rows) const {
  DenseMatrix out(rows.size(), cols_);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= rows_) throw DimensionMismatch("row index out of range");
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(rows[r] * cols_),
                cols_,
                out.data_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
  }
  return out;
}

DenseMatrix DenseMatrix::select_columns(
    std::span<const std::size_t> cols) const {
  DenseMatrix out(rows_, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] >= cols_) throw DimensionMismatch("column index out of range");
    for (std::size_t i = 0; i < rows_; ++i) {
      out.data_[i * cols.size() + c] = data_[i * cols_ + cols[c]];
    }
  }
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      out.data_[j * rows_ + i] = data_[i * cols_ + j];
    }
  }
  return out;
}

void IndexSet::validate(std::size_t m) const {
  for (std::size_t idx : indices) {
    if (idx >= m) {
      throw DimensionMismatch("index " + std::to_string(idx) +
                              " outside [0, " + std::to_string(m) + ")");
    }
  }
  if (!with_replacement) {
    std::vector<std::size_t> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error("duplicate index in a without-replacement index set");
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) {
  // Scaled accumulation avoids overflow for large entries.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) {
    const double y = x / scale;
    s += y * y;
  }
  return scale * std::sqrt(s);
}

Vector gather(std::span<const double> v, std::span<const std::size_t> idx) {
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("multiply: inner dims");
  std::vector<double> out(a.rows() * b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out[i * b.cols() + j] += aik * brow[j];
      }
    }
  }
  return DenseMatrix(a.rows(), b.cols(), std::move(out));
}

Vector multiply(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: inner dims");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

DenseMatrix transpose_multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionMismatch("transpose_multiply: row counts differ");
  }
  std::vector<double> out(a.cols() * b.cols(), 0.0);
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto arow = a.row(k);
    const auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out[i * b.cols() + j] += arow[i] * brow[j];
      }
    }
  }
  return DenseMatrix(a.cols(), b.cols(), std::move(out));
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("subtract: shapes differ");
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return DenseMatrix(a.rows(), a.cols(), std::move(out));
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.values()); }

double column_norm(const DenseMatrix& a, std::size_t j) {
  return norm2(a.column(j));
}

double orthonormality_defect(const DenseMatrix& a) {
  const DenseMatrix g = transpose_multiply(a, a);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace lmc
