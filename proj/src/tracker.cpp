#include "lmc/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "lmc/errors.hpp"

namespace lmc {

namespace {

constexpr double kUnitColumnTolerance = 1e-6;

}  // namespace

void TrackerConfig::validate(std::size_t m) const {
  if (d < 1 || d > m) {
    throw ConfigError("tracker: sample count d=" + std::to_string(d) +
                      " must lie in [1, " + std::to_string(m) + "]");
  }
  if (!(eps_noise >= 0.0) || !(eta_constant >= 0.0) || !(zero_tol >= 0.0)) {
    throw ConfigError("tracker: eps_noise, eta_constant, zero_tol must be >= 0");
  }
}

TrackerState::TrackerState(std::size_t m, const TrackerConfig& cfg)
    : m_(m), rng_(cfg.seed), basis_(m) {
  cfg.validate(m);
  resample(cfg);
}

void TrackerState::resample(const TrackerConfig& cfg) {
  omega_ = cfg.with_replacement ? sample_with_replacement(m_, cfg.d, rng_)
                                : sample_without_replacement(m_, cfg.d, rng_);
  if (cfg.dedup && omega_.with_replacement) {
    auto& idx = omega_.indices;
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  }
  ++resamples_;
  if (basis_.empty()) {
    restricted_.reset();
  } else {
    restricted_.emplace(basis_.matrix().restrict_rows(omega_.indices));
  }
}

double threshold(std::size_t k, const TrackerConfig& cfg, std::size_t m) {
  return cfg.eta_constant *
         std::sqrt(static_cast<double>(cfg.d) * static_cast<double>(k) *
                   cfg.eps_noise / static_cast<double>(m));
}

double error_bound(std::size_t k, std::size_t m, std::size_t d, double eps) {
  return 9.0 * (static_cast<double>(m) / static_cast<double>(d)) *
         std::sqrt(static_cast<double>(k) * eps);
}

Completion process_column(TrackerState& state, const ColumnOracle& column,
                          const TrackerConfig& cfg) {
  const auto& omega = state.omega_.indices;
  Vector sampled(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) sampled[i] = column(omega[i]);
  state.entries_ += omega.size();

  const std::size_t k = state.k();
  Completion out;
  out.residual = state.restricted_ ? state.restricted_->residual(sampled)
                                   : norm2(sampled);
  out.threshold =
      std::max(threshold(k, cfg, state.m_), cfg.zero_tol * norm2(sampled));

  if (out.residual > out.threshold) {
    std::vector<bool> seen(state.m_, false);
    Vector full(state.m_, 0.0);
    for (std::size_t i = 0; i < omega.size(); ++i) {
      full[omega[i]] = sampled[i];
      seen[omega[i]] = true;
    }
    for (std::size_t i = 0; i < state.m_; ++i) {
      if (!seen[i]) full[i] = column(i);
    }
    // Charged as the m - |omega| entries not covered by the sample.
    state.entries_ += state.m_ - omega.size();
    state.basis_.append(full, kRankTolerance * std::max(1.0, norm2(full)));
    ++state.absorbed_;
    state.resample(cfg);
    out.estimate = std::move(full);
    out.decision = Decision::Absorbed;
  } else {
    out.decision = Decision::Represented;
    out.estimate.assign(state.m_, 0.0);
    if (state.restricted_) {
      const Vector coeffs = state.restricted_->solve(sampled);
      for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const auto q = state.basis_.column(j);
        for (std::size_t i = 0; i < state.m_; ++i) {
          out.estimate[i] += coeffs[j] * q[i];
        }
      }
    }
  }
  state.log_.push_back({out.decision, out.residual, out.threshold, k});
  return out;
}

TrackerResult run_stream(const DenseMatrix& observed, const TrackerConfig& cfg,
                         const DenseMatrix* truth) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = observed.rows();
  const std::size_t n = observed.cols();
  if (n == 0 || m == 0) throw ConfigError("run_stream: empty input matrix");
  if (truth && (truth->rows() != m || truth->cols() != n)) {
    throw DimensionMismatch("run_stream: truth shape differs from input");
  }

  TrackerState state(m, cfg);
  TrackerResult result{DenseMatrix(m, n), DenseMatrix(), {}};
  auto snapshot = [&](std::size_t processed) {
    RunReport r;
    r.columns = state.column_log();
    r.K = state.k();
    r.recovered_rank = state.k();
    r.fully_measured = state.absorbed();
    r.entries_sampled = state.entries_requested();
    if (truth) {
      r.per_column_error.reserve(processed);
      Vector diff(m);
      for (std::size_t t = 0; t < processed; ++t) {
        for (std::size_t i = 0; i < m; ++i) {
          diff[i] = result.estimate(i, t) - (*truth)(i, t);
        }
        r.per_column_error.push_back(norm2(diff));
      }
    }
    return r;
  };

  const double slack = cfg.eps_noise + kUnitColumnTolerance;
  for (std::size_t t = 0; t < n; ++t) {
    Vector col = observed.column(t);
    const double nrm = norm2(col);
    if (std::abs(nrm - 1.0) > slack) {
      if (cfg.normalization == Normalization::Strict || nrm == 0.0) {
        throw StreamError(t,
                          "column norm " + std::to_string(nrm) +
                              " outside the unit band of half-width " +
                              std::to_string(slack),
                          snapshot(t));
      }
      for (double& x : col) x /= nrm;
    }
    ColumnOracle oracle = [&col](std::size_t i) { return col[i]; };
    try {
      Completion c = process_column(state, oracle, cfg);
      result.estimate.set_column(t, c.estimate);
    } catch (const StreamError&) {
      throw;
    } catch (const Error& e) {
      throw StreamError(t, e.what(), snapshot(t));
    }
  }

  result.basis = state.basis().matrix();
  result.report = snapshot(n);
  if (truth) {
    const FrobeniusErrors fe = frobenius_errors(result.estimate, *truth);
    result.report.frob_abs_error = fe.abs;
    result.report.frob_rel_error = fe.rel;
  }
  result.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace lmc
