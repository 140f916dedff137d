#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lmc/matrix.hpp"

namespace lmc {

/// Relative threshold (against the largest column norm) below which a new
/// direction is treated as numerically dependent.
inline constexpr double kRankTolerance = 1e-10;

/// Orthonormal column set grown one vector at a time by modified
/// Gram-Schmidt with a single reorthogonalization pass.
class OrthoBasis {
 public:
  explicit OrthoBasis(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return cols_; }
  bool empty() const noexcept { return cols_ == 0; }
  std::span<const double> column(std::size_t j) const {
    return {q_.data() + j * dim_, dim_};
  }

  /// Returns v minus its projection onto the basis. When `coeffs` is
  /// non-empty (length size()) it receives the projection coefficients.
  Vector orthogonal_part(std::span<const double> v,
                         std::span<double> coeffs = {}) const;

  /// Appends the normalized orthogonal part of v when its norm exceeds
  /// `abs_tol`. Returns the orthogonal norm; 0 signals "not appended".
  double append(std::span<const double> v, double abs_tol,
                std::span<double> coeffs = {});
  void pop_back();

  double residual(std::span<const double> v) const;
  DenseMatrix matrix() const;

 private:
  std::size_t dim_;
  std::size_t cols_ = 0;
  std::vector<double> q_;  // column-major, dim_ x cols_
};

/// Thin QR factorization of a (possibly rank-deficient) matrix, used for
/// projection residuals and least-squares coefficient solves without ever
/// forming an explicit inverse.
class LeastSquares {
 public:
  explicit LeastSquares(const DenseMatrix& a, double rel_tol = kRankTolerance);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t rank() const noexcept { return q_.size(); }
  bool full_column_rank() const noexcept { return rank() == cols_; }

  /// || v - P v ||_2 with P the orthogonal projector onto range(a).
  double residual(std::span<const double> v) const;
  /// pinv(a) v for full-column-rank a; throws RankDeficient otherwise.
  Vector solve(std::span<const double> v) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  OrthoBasis q_;
  std::vector<double> r_;  // cols_ x cols_ upper triangle, row-major
};

/// Orthonormal basis for the column space of `cols`, new directions kept in
/// order of first occurrence. Numerically dependent columns are dropped, so
/// an all-zero input yields an m x 0 matrix.
DenseMatrix orthonormalize(const DenseMatrix& cols);

/// || v - P_{basis_rows} v ||_2. A basis with zero columns gives ||v||_2.
double project_residual(std::span<const double> v,
                        const DenseMatrix& basis_rows);

/// pinv(basis_rows) v.
Vector subsampled_coefficients(const DenseMatrix& basis_rows,
                               std::span<const double> v);

/// basis_full * pinv(basis_rows) * v, the completed column.
Vector subsampled_complete(const DenseMatrix& basis_full,
                           const DenseMatrix& basis_rows,
                           std::span<const double> v);

/// Angle in [0, pi/2] between the lines spanned by two nonzero vectors.
double vector_angle(std::span<const double> a, std::span<const double> b);

/// theta(U, V) = max over u in span(U) of min over v in span(V) of the angle
/// between u and v. Not symmetric: it is pi/2 whenever dim U > dim V.
double principal_angle(const DenseMatrix& u, const DenseMatrix& v);

/// (m / r) max_i ||U_{i:}||^2 for orthonormal U.
double incoherence(const DenseMatrix& u);

Vector singular_values(const DenseMatrix& a);
/// Number of singular values strictly above tol * sigma_max.
std::size_t numerical_rank(const DenseMatrix& a, double tol = kRankTolerance);

}  // namespace lmc
