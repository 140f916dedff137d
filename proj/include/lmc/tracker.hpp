#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lmc/linalg.hpp"
#include "lmc/matrix.hpp"
#include "lmc/random.hpp"
#include "lmc/report.hpp"

namespace lmc {

enum class Normalization { Strict, Lenient };

/// Settings for streaming completion under bounded deterministic noise.
struct TrackerConfig {
  std::size_t d = 1;          // entries sampled per column
  double eta_constant = 1.0;  // C in the residual threshold
  double eps_noise = 0.0;     // per-column l2 noise bound
  // Floor on the residual test relative to ||M_Omega||, so that round-off
  // alone never triggers a full measurement when eps_noise is 0.
  double zero_tol = 1e-8;
  std::uint64_t seed = 0;
  bool with_replacement = true;
  bool dedup = false;  // collapse repeated sample indices
  Normalization normalization = Normalization::Strict;

  /// Throws ConfigError unless 1 <= d <= m and the reals are >= 0.
  void validate(std::size_t m) const;
};

/// Entry access for the column being processed; every call is one request.
using ColumnOracle = std::function<double(std::size_t)>;

struct Completion {
  Vector estimate;
  Decision decision = Decision::Represented;
  double residual = 0.0;
  double threshold = 0.0;
};

/// Mutable single-owner state of one stream: orthonormal basis, the current
/// sample set and the per-column log.
class TrackerState {
 public:
  TrackerState(std::size_t m, const TrackerConfig& cfg);

  std::size_t rows() const noexcept { return m_; }
  std::size_t k() const noexcept { return basis_.size(); }
  const OrthoBasis& basis() const noexcept { return basis_; }
  const IndexSet& omega() const noexcept { return omega_; }
  const std::vector<ColumnRecord>& column_log() const noexcept { return log_; }
  std::uint64_t entries_requested() const noexcept { return entries_; }
  std::size_t absorbed() const noexcept { return absorbed_; }
  std::size_t resamples() const noexcept { return resamples_; }

 private:
  friend Completion process_column(TrackerState&, const ColumnOracle&,
                                   const TrackerConfig&);
  void resample(const TrackerConfig& cfg);

  std::size_t m_;
  Rng rng_;
  OrthoBasis basis_;
  IndexSet omega_;
  std::optional<LeastSquares> restricted_;  // factor of basis rows at omega
  std::vector<ColumnRecord> log_;
  std::uint64_t entries_ = 0;
  std::size_t absorbed_ = 0;
  std::size_t resamples_ = 0;
};

/// eta_k = C sqrt(d k eps / m).
double threshold(std::size_t k, const TrackerConfig& cfg, std::size_t m);

/// Samples the column at omega, then either absorbs it (residual above
/// eta_k: full measurement, basis grows, omega is redrawn) or completes it
/// from the current basis.
Completion process_column(TrackerState& state, const ColumnOracle& column,
                          const TrackerConfig& cfg);

struct TrackerResult {
  DenseMatrix estimate;
  DenseMatrix basis;
  RunReport report;
};

/// Streams the columns of `observed` left to right. Throws StreamError with
/// the partial report on the first failing column.
TrackerResult run_stream(const DenseMatrix& observed, const TrackerConfig& cfg,
                         const DenseMatrix* truth = nullptr);

/// 9 (m/d) sqrt(k eps), the per-column error guarantee for represented
/// columns.
double error_bound(std::size_t k, std::size_t m, std::size_t d, double eps);

}  // namespace lmc
