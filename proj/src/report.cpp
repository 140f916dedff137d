#include "lmc/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lmc {

const char* to_string(Decision d) noexcept {
  return d == Decision::Absorbed ? "absorbed" : "represented";
}

std::vector<double> column_errors(const DenseMatrix& estimate,
                                  const DenseMatrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw DimensionMismatch("column_errors: shapes differ");
  }
  std::vector<double> out(estimate.cols());
  Vector diff(estimate.rows());
  for (std::size_t j = 0; j < estimate.cols(); ++j) {
    for (std::size_t i = 0; i < estimate.rows(); ++i) {
      diff[i] = estimate(i, j) - truth(i, j);
    }
    out[j] = norm2(diff);
  }
  return out;
}

FrobeniusErrors frobenius_errors(const DenseMatrix& estimate,
                                 const DenseMatrix& truth,
                                 std::span<const std::size_t> excluded) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw DimensionMismatch("frobenius_errors: shapes differ");
  }
  std::vector<bool> skip(truth.cols(), false);
  for (std::size_t j : excluded) {
    if (j < skip.size()) skip[j] = true;
  }
  double diff2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t i = 0; i < truth.rows(); ++i) {
    for (std::size_t j = 0; j < truth.cols(); ++j) {
      if (skip[j]) continue;
      const double d = estimate(i, j) - truth(i, j);
      diff2 += d * d;
      ref2 += truth(i, j) * truth(i, j);
    }
  }
  FrobeniusErrors out;
  out.abs = std::sqrt(diff2);
  if (ref2 > 0.0) {
    out.rel = out.abs / std::sqrt(ref2);
  } else {
    out.rel = diff2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return out;
}

}  // namespace lmc
