#include "lmc/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "lmc/errors.hpp"

namespace lmc {

namespace {

constexpr double kOrthonormalCheck = 1e-8;

void require_orthonormal(const DenseMatrix& u, const char* who) {
  const double defect = orthonormality_defect(u);
  if (defect > kOrthonormalCheck) {
    throw NotOrthonormal(std::string(who) +
                         ": input columns are not orthonormal (defect " +
                         std::to_string(defect) + ")");
  }
}

double max_column_norm(const DenseMatrix& a) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    worst = std::max(worst, column_norm(a, j));
  }
  return worst;
}

}  // namespace

Vector OrthoBasis::orthogonal_part(std::span<const double> v,
                                   std::span<double> coeffs) const {
  if (v.size() != dim_) throw DimensionMismatch("OrthoBasis: vector length");
  Vector w(v.begin(), v.end());
  if (!coeffs.empty()) std::fill(coeffs.begin(), coeffs.end(), 0.0);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < cols_; ++j) {
      const auto q = column(j);
      const double h = dot(q, w);
      for (std::size_t i = 0; i < dim_; ++i) w[i] -= h * q[i];
      if (!coeffs.empty()) coeffs[j] += h;
    }
  }
  return w;
}

double OrthoBasis::append(std::span<const double> v, double abs_tol,
                          std::span<double> coeffs) {
  Vector w = orthogonal_part(v, coeffs);
  const double nrm = norm2(w);
  if (!(nrm > abs_tol) || nrm == 0.0) return 0.0;
  for (double& x : w) x /= nrm;
  q_.insert(q_.end(), w.begin(), w.end());
  ++cols_;
  return nrm;
}

void OrthoBasis::pop_back() {
  if (cols_ == 0) return;
  --cols_;
  q_.resize(cols_ * dim_);
}

double OrthoBasis::residual(std::span<const double> v) const {
  return norm2(orthogonal_part(v));
}

DenseMatrix OrthoBasis::matrix() const {
  DenseMatrix out(dim_, cols_);
  for (std::size_t j = 0; j < cols_; ++j) out.set_column(j, column(j));
  return out;
}

LeastSquares::LeastSquares(const DenseMatrix& a, double rel_tol)
    : rows_(a.rows()), cols_(a.cols()), q_(a.rows()), r_(cols_ * cols_, 0.0) {
  const double abs_tol = rel_tol * max_column_norm(a);
  std::vector<double> h(cols_);
  for (std::size_t j = 0; j < cols_; ++j) {
    const Vector col = a.column(j);
    const std::size_t before = q_.size();
    const double diag = q_.append(col, abs_tol, std::span(h.data(), before));
    if (diag == 0.0) continue;
    // Only full-rank factors are ever solved, so column j of R lives in
    // row slots 0..j exactly when every earlier column was independent.
    for (std::size_t i = 0; i < before; ++i) r_[i * cols_ + j] = h[i];
    r_[before * cols_ + j] = diag;
  }
}

double LeastSquares::residual(std::span<const double> v) const {
  if (v.size() != rows_) throw DimensionMismatch("LeastSquares: rhs length");
  return q_.residual(v);
}

Vector LeastSquares::solve(std::span<const double> v) const {
  if (v.size() != rows_) throw DimensionMismatch("LeastSquares: rhs length");
  if (!full_column_rank()) throw RankDeficient(rows_, cols_, rank());
  Vector c(cols_);
  for (std::size_t j = 0; j < cols_; ++j) c[j] = dot(q_.column(j), v);
  for (std::size_t jj = cols_; jj-- > 0;) {
    double s = c[jj];
    for (std::size_t k = jj + 1; k < cols_; ++k) s -= r_[jj * cols_ + k] * c[k];
    c[jj] = s / r_[jj * cols_ + jj];
  }
  return c;
}

DenseMatrix orthonormalize(const DenseMatrix& cols) {
  OrthoBasis basis(cols.rows());
  const double abs_tol = kRankTolerance * max_column_norm(cols);
  for (std::size_t j = 0; j < cols.cols(); ++j) {
    basis.append(cols.column(j), abs_tol);
  }
  return basis.matrix();
}

double project_residual(std::span<const double> v,
                        const DenseMatrix& basis_rows) {
  if (basis_rows.cols() == 0) return norm2(v);
  if (basis_rows.rows() != v.size()) {
    throw DimensionMismatch("project_residual: basis rows != vector length");
  }
  return LeastSquares(basis_rows).residual(v);
}

Vector subsampled_coefficients(const DenseMatrix& basis_rows,
                               std::span<const double> v) {
  if (basis_rows.rows() != v.size()) {
    throw DimensionMismatch("subsampled_coefficients: rows != vector length");
  }
  return LeastSquares(basis_rows).solve(v);
}

Vector subsampled_complete(const DenseMatrix& basis_full,
                           const DenseMatrix& basis_rows,
                           std::span<const double> v) {
  if (basis_full.cols() != basis_rows.cols()) {
    throw DimensionMismatch("subsampled_complete: column counts differ");
  }
  if (basis_full.cols() == 0) return Vector(basis_full.rows(), 0.0);
  return multiply(basis_full, subsampled_coefficients(basis_rows, v));
}

double vector_angle(std::span<const double> a, std::span<const double> b) {
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) throw Error("vector_angle: zero vector");
  if (a.size() != b.size()) throw DimensionMismatch("vector_angle: lengths differ");
  // 2 atan(|a/|a| - b/|b|| / |a/|a| + b/|b||) keeps full precision for
  // small angles, where acos of the cosine does not.
  const double sign = dot(a, b) < 0.0 ? -1.0 : 1.0;
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] / na;
    const double y = sign * b[i] / nb;
    diff += (x - y) * (x - y);
    sum += (x + y) * (x + y);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

double principal_angle(const DenseMatrix& u, const DenseMatrix& v) {
  if (u.rows() != v.rows()) {
    throw DimensionMismatch("principal_angle: row counts differ");
  }
  if (u.cols() == 0 || v.cols() == 0) {
    throw DimensionMismatch("principal_angle: empty basis");
  }
  require_orthonormal(u, "principal_angle");
  require_orthonormal(v, "principal_angle");
  if (u.cols() > v.cols()) return std::numbers::pi / 2;
  const Vector s = singular_values(transpose_multiply(u, v));
  const double smallest = s.empty() ? 0.0 : s.back();
  return std::acos(std::clamp(smallest, 0.0, 1.0));
}

double incoherence(const DenseMatrix& u) {
  if (u.cols() == 0) throw DimensionMismatch("incoherence: empty basis");
  require_orthonormal(u, "incoherence");
  double worst = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) {
    const auto row = u.row(i);
    worst = std::max(worst, dot(row, row));
  }
  return static_cast<double>(u.rows()) / static_cast<double>(u.cols()) * worst;
}

Vector singular_values(const DenseMatrix& a) {
  if (a.empty()) return {};
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> view(a.values().data(),
                                        static_cast<Eigen::Index>(a.rows()),
                                        static_cast<Eigen::Index>(a.cols()));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(view);
  const auto& s = svd.singularValues();
  return Vector(s.data(), s.data() + s.size());
}

std::size_t numerical_rank(const DenseMatrix& a, double tol) {
  const Vector s = singular_values(a);
  if (s.empty() || s.front() == 0.0) return 0;
  const double cutoff = tol * s.front();
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [&](double x) { return x > cutoff; }));
}

}  // namespace lmc
