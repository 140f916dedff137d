#include "lmc/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "lmc/errors.hpp"
#include "lmc/random.hpp"

namespace lmc {

DenseMatrix Dictionary::raw_columns() const {
  DenseMatrix out(rows_, size());
  for (std::size_t j = 0; j < size(); ++j) out.set_column(j, column(j));
  return out;
}

DenseMatrix Dictionary::restricted(std::span<const std::size_t> rows) const {
  DenseMatrix out(rows.size(), size());
  for (std::size_t j = 0; j < size(); ++j) {
    const auto col = column(j);
    for (std::size_t i = 0; i < rows.size(); ++i) out.set(i, j, col[rows[i]]);
  }
  return out;
}

void Dictionary::append(std::span<const double> column) {
  if (column.size() != rows_) {
    throw DimensionMismatch("Dictionary::append: column length");
  }
  raw_.insert(raw_.end(), column.begin(), column.end());
  counter_.push_back(0);
  orth_.append(column, kRankTolerance * std::max(1.0, norm2(column)));
}

void Dictionary::increment(std::size_t j) { ++counter_.at(j); }

void ExactConfig::validate(std::size_t m) const {
  if (d < 1 || d > m) {
    throw ConfigError("exact: sample count d=" + std::to_string(d) +
                      " must lie in [1, " + std::to_string(m) + "]");
  }
  if (!(zero_tol > 0.0)) throw ConfigError("exact: zero_tol must be > 0");
  if (tau && (*tau < 1 || *tau > d)) {
    throw ConfigError("exact: tau must lie in [1, d]");
  }
}

namespace {

bool within_span(double residual, std::span<const double> v, double zero_tol) {
  return residual <= zero_tol * norm2(v);
}

/// Depth-first enumeration of supports of one fixed size, in lexicographic
/// order, keeping an orthonormal basis of the chosen prefix. A prefix whose
/// newest column is dependent on the rest is skipped: any support containing
/// it that fits would have a strictly smaller fitting subset, which the
/// size-ascending outer loop reaches first.
class SupportSearch {
 public:
  SupportSearch(const DenseMatrix& rows, std::span<const double> v,
                double tol_abs, std::size_t cap)
      : v_(v), tol_abs_(tol_abs), cap_(cap), basis_(rows.rows()) {
    double scale = 0.0;
    cols_.reserve(rows.cols());
    for (std::size_t j = 0; j < rows.cols(); ++j) {
      cols_.push_back(rows.column(j));
      scale = std::max(scale, norm2(cols_.back()));
    }
    dep_tol_ = kRankTolerance * scale;
  }

  std::optional<std::vector<std::size_t>> run(std::size_t size) {
    residuals_.assign(1, Vector(v_.begin(), v_.end()));
    chosen_.clear();
    if (descend(0, size)) return chosen_;
    return std::nullopt;
  }

  std::size_t evaluated() const noexcept { return evaluated_; }

 private:
  bool descend(std::size_t start, std::size_t remaining) {
    if (remaining == 0) {
      if (++evaluated_ > cap_) throw CombinatorialBudgetExceeded(cap_);
      return norm2(residuals_.back()) <= tol_abs_;
    }
    const std::size_t k = cols_.size();
    for (std::size_t j = start; j + remaining <= k; ++j) {
      if (basis_.append(cols_[j], dep_tol_) == 0.0) continue;
      const auto q = basis_.column(basis_.size() - 1);
      Vector next = residuals_.back();
      const double h = dot(q, next);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] -= h * q[i];
      residuals_.push_back(std::move(next));
      chosen_.push_back(j);
      const bool hit = descend(j + 1, remaining - 1);
      if (hit) return true;
      chosen_.pop_back();
      residuals_.pop_back();
      basis_.pop_back();
    }
    return false;
  }

  std::span<const double> v_;
  double tol_abs_;
  std::size_t cap_;
  double dep_tol_ = 0.0;
  std::vector<Vector> cols_;
  OrthoBasis basis_;
  std::vector<Vector> residuals_;
  std::vector<std::size_t> chosen_;
  std::size_t evaluated_ = 0;
};

SparseFit fit_on_support(const DenseMatrix& rows,
                         std::vector<std::size_t> support,
                         std::span<const double> v) {
  SparseFit fit;
  fit.coefficients = support.empty()
                         ? Vector{}
                         : LeastSquares(rows.select_columns(support)).solve(v);
  fit.support = std::move(support);
  return fit;
}

std::vector<std::size_t> coefficient_support(std::span<const double> coeffs,
                                             double zero_tol) {
  double peak = 0.0;
  for (double c : coeffs) peak = std::max(peak, std::abs(c));
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (std::abs(coeffs[j]) > zero_tol * peak) out.push_back(j);
  }
  return out;
}

/// sparse_represent with a caller-held factorization of the whole block.
std::optional<SparseFit> search_support(const LeastSquares& whole,
                                        const DenseMatrix& rows,
                                        std::span<const double> v,
                                        std::size_t tau, double zero_tol,
                                        std::size_t cap) {
  const double tol_abs = zero_tol * norm2(v);
  // No subset can fit better than the whole dictionary.
  if (whole.residual(v) > tol_abs) return std::nullopt;

  if (whole.full_column_rank() && rows.cols() > 0) {
    // The representation is unique, so every fitting support contains
    // supp(c) and the first one in enumeration order is supp(c) itself.
    const Vector c = whole.solve(v);
    std::vector<std::size_t> support = coefficient_support(c, zero_tol);
    if (support.size() > tau) return std::nullopt;
    SparseFit fit = fit_on_support(rows, std::move(support), v);
    Vector resid(v.begin(), v.end());
    for (std::size_t s = 0; s < fit.support.size(); ++s) {
      for (std::size_t i = 0; i < resid.size(); ++i) {
        resid[i] -= fit.coefficients[s] * rows(i, fit.support[s]);
      }
    }
    if (norm2(resid) <= tol_abs) {
      fit.combinations = 1;
      return fit;
    }
  }

  SupportSearch search(rows, v, tol_abs, cap);
  const std::size_t largest = std::min(tau, rows.cols());
  for (std::size_t size = 0; size <= largest; ++size) {
    if (auto support = search.run(size)) {
      SparseFit fit = fit_on_support(rows, std::move(*support), v);
      fit.combinations = search.evaluated();
      return fit;
    }
  }
  return std::nullopt;
}

}  // namespace

bool exact_test(const Dictionary& dict, std::span<const std::size_t> omega,
                std::span<const double> sampled, const ExactConfig& cfg) {
  if (sampled.size() != omega.size()) {
    throw DimensionMismatch("exact_test: sample length != |omega|");
  }
  const double residual =
      dict.empty() ? norm2(sampled)
                   : LeastSquares(dict.restricted(omega)).residual(sampled);
  return within_span(residual, sampled, cfg.zero_tol);
}

void record_support(Dictionary& dict, std::span<const double> coeffs,
                    double zero_tol) {
  if (coeffs.size() != dict.size()) {
    throw DimensionMismatch("record_support: coefficient length");
  }
  for (std::size_t j : coefficient_support(coeffs, zero_tol)) {
    dict.increment(j);
  }
}

std::optional<SparseFit> sparse_represent(const DenseMatrix& dict_rows,
                                          std::span<const double> sampled,
                                          std::size_t tau, double zero_tol,
                                          std::size_t cap) {
  if (dict_rows.rows() != sampled.size()) {
    throw DimensionMismatch("sparse_represent: rows != sample length");
  }
  const LeastSquares whole(dict_rows);
  return search_support(whole, dict_rows, sampled, tau, zero_tol, cap);
}

ExactOutcome run_exact(const DenseMatrix& observed, const ExactConfig& cfg,
                       const Truth* truth) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = observed.rows();
  const std::size_t n = observed.cols();
  if (m == 0 || n == 0) throw ConfigError("run_exact: empty input matrix");
  cfg.validate(m);
  if (truth && truth->clean &&
      (truth->clean->rows() != m || truth->clean->cols() != n)) {
    throw DimensionMismatch("run_exact: truth shape differs from input");
  }

  Rng rng(cfg.seed);
  Dictionary dict(m);
  IndexSet omega = sample_without_replacement(m, cfg.d, rng);
  DenseMatrix rows;                      // dictionary rows at omega
  std::optional<LeastSquares> factor;    // factorization of `rows`
  std::vector<std::size_t> absorbed_at;  // stream position per dictionary col

  ExactOutcome out;
  out.result.recovered = DenseMatrix(m, n);
  RunReport& report = out.report;

  for (std::size_t t = 0; t < n; ++t) {
    const Vector col = observed.column(t);
    const Vector sampled = gather(col, omega.indices);
    report.entries_sampled += omega.size();
    const std::size_t k = dict.size();
    ColumnRecord rec;
    rec.basis_size = k;
    rec.threshold = cfg.zero_tol * norm2(sampled);
    try {
      rec.residual = factor ? factor->residual(sampled) : norm2(sampled);
      Vector estimate(m, 0.0);
      bool represented = false;
      if (cfg.tau) {
        std::optional<SparseFit> fit;
        if (factor) {
          fit = search_support(*factor, rows, sampled, *cfg.tau, cfg.zero_tol,
                               cfg.combination_cap);
        } else if (rec.residual <= rec.threshold) {
          fit = SparseFit{};
        }
        if (fit) {
          represented = true;
          Vector coeffs(k, 0.0);
          for (std::size_t s = 0; s < fit->support.size(); ++s) {
            coeffs[fit->support[s]] = fit->coefficients[s];
          }
          if (k > 0) record_support(dict, coeffs, cfg.zero_tol);
          for (std::size_t s = 0; s < fit->support.size(); ++s) {
            const auto b = dict.column(fit->support[s]);
            for (std::size_t i = 0; i < m; ++i) {
              estimate[i] += fit->coefficients[s] * b[i];
            }
          }
        }
      } else if (rec.residual <= rec.threshold) {
        represented = true;
        if (factor) {
          const Vector coeffs = factor->solve(sampled);
          record_support(dict, coeffs, cfg.zero_tol);
          for (std::size_t j = 0; j < k; ++j) {
            const auto b = dict.column(j);
            for (std::size_t i = 0; i < m; ++i) estimate[i] += coeffs[j] * b[i];
          }
        }
      }

      if (represented) {
        rec.decision = Decision::Represented;
        out.result.recovered.set_column(t, estimate);
      } else {
        rec.decision = Decision::Absorbed;
        report.entries_sampled += m - omega.size();
        dict.append(col);
        absorbed_at.push_back(t);
        omega = sample_without_replacement(m, cfg.d, rng);
        rows = dict.restricted(omega.indices);
        factor.emplace(rows);
        out.result.recovered.set_column(t, col);
      }
    } catch (const Error& e) {
      report.K = dict.size();
      report.fully_measured = dict.size();
      throw StreamError(t, e.what(), report);
    }
    report.columns.push_back(rec);
  }

  // Outlier removal: dictionary columns that never took part in a
  // representation.
  RecoveryResult& res = out.result;
  res.counter.assign(dict.counter().begin(), dict.counter().end());
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (res.counter[j] == 0) {
      res.outlier_indices.push_back(absorbed_at[j]);
    } else {
      res.basis_indices.push_back(absorbed_at[j]);
      kept.push_back(j);
    }
  }
  res.basis = dict.raw_columns().select_columns(kept);
  res.recovered_rank = kept.empty() ? 0 : numerical_rank(res.basis);

  report.K = dict.size();
  report.fully_measured = dict.size();
  report.recovered_rank = res.recovered_rank;
  if (truth) {
    std::vector<std::size_t> expected = truth->noise_support;
    std::sort(expected.begin(), expected.end());
    report.support_exact = expected == res.outlier_indices;
    if (truth->clean) {
      report.per_column_error = column_errors(res.recovered, *truth->clean);
      const FrobeniusErrors fe =
          frobenius_errors(res.recovered, *truth->clean, expected);
      report.frob_abs_error = fe.abs;
      report.frob_rel_error = fe.rel;
    }
  }
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

double mu_tau(const DenseMatrix& columns, std::size_t tau, std::size_t cap) {
  const std::size_t k = columns.cols();
  if (tau == 0 || tau > k) throw ConfigError("mu_tau: need 1 <= tau <= cols");
  std::vector<std::size_t> pick(tau);
  for (std::size_t i = 0; i < tau; ++i) pick[i] = i;
  double worst = 0.0;
  std::size_t visited = 0;
  for (;;) {
    if (++visited > cap) throw CombinatorialBudgetExceeded(cap);
    const DenseMatrix q = orthonormalize(columns.select_columns(pick));
    if (q.cols() > 0) worst = std::max(worst, incoherence(q));
    // Next combination in lexicographic order.
    std::size_t i = tau;
    while (i > 0 && pick[i - 1] == k - tau + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < tau; ++j) pick[j] = pick[j - 1] + 1;
  }
  return worst;
}

}  // namespace lmc
