// Independent dense reference computations built directly on Eigen, used to
// cross-check the library's incremental Gram-Schmidt code paths.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lmc/matrix.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const lmc::DenseMatrix& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  return out;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// x minimizing ||A x - v|| from the normal equations A^T A x = A^T v.
inline Eigen::VectorXd normal_solve(const lmc::DenseMatrix& a,
                                    std::span<const double> v) {
  const Eigen::MatrixXd A = to_eigen(a);
  return (A.transpose() * A).ldlt().solve(A.transpose() * to_eigen(v));
}

inline double normal_residual(const lmc::DenseMatrix& a,
                              std::span<const double> v) {
  if (a.cols() == 0) return to_eigen(v).norm();
  return (to_eigen(a) * normal_solve(a, v) - to_eigen(v)).norm();
}

// Minimum-norm least squares, robust to rank deficiency.
inline Eigen::VectorXd pinv_solve(const lmc::DenseMatrix& a,
                                  std::span<const double> v) {
  return to_eigen(a).completeOrthogonalDecomposition().solve(to_eigen(v));
}

inline std::size_t rank(const lmc::DenseMatrix& a, double tol = 1e-10) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(to_eigen(a));
  qr.setThreshold(tol);
  return static_cast<std::size_t>(qr.rank());
}

struct Fit {
  std::vector<std::size_t> support;
  std::vector<double> coefficients;
};

// Plain enumeration of every support of size 1..tau in size-then-lex order.
inline std::optional<Fit> brute_force_sparse(const lmc::DenseMatrix& dict,
                                             std::span<const double> v,
                                             std::size_t tau, double tol) {
  const double vn = to_eigen(v).norm();
  if (vn <= 0.0) return Fit{};
  const std::size_t n = dict.cols();
  for (std::size_t size = 1; size <= std::min(tau, n); ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      const lmc::DenseMatrix sub = dict.select_columns(idx);
      const Eigen::VectorXd c = pinv_solve(sub, v);
      const double res = (to_eigen(sub) * c - to_eigen(v)).norm();
      if (res <= tol * vn) {
        return Fit{idx, std::vector<double>(c.data(), c.data() + c.size())};
      }
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace oracle
