#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lmc/datagen.hpp"
#include "lmc/exact.hpp"
#include "lmc/report.hpp"
#include "lmc/tracker.hpp"

namespace lmc {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr double kSuccessFrobTolerance = 1e-6;

enum class Algorithm { Tracker, Exact, Mixture };

const char* to_string(Algorithm a) noexcept;

struct GeneratorSpec {
  std::string name = "gaussian";  // gaussian | cumulative | mixture | lower_bound | file
  std::size_t m = 50;
  std::size_t n = 500;
  std::size_t r = 5;
  std::size_t per_subspace = 20;
  std::size_t h = 5;
  std::size_t tau = 4;
  double mu0 = 1.0;
  std::vector<double> b_values;
  std::string matrix_file;
  std::string truth_file;
};

/// How the per-column sample count is chosen for a trial.
struct SampleSpec {
  enum class Mode { Fixed, Ratio, Auto };
  Mode mode = Mode::Fixed;
  std::size_t d = 1;
  double ratio = 1.0;
  double delta = 0.01;  // Auto: d = ceil(8 mu0 r log(r / delta)), capped at m
};

struct NoiseConfig {
  enum class Kind { None, Bounded, Sparse };
  Kind kind = Kind::None;
  double eps = 0.0;
  std::optional<std::size_t> s0;  // absent: max(0, d - r - 1)
  std::vector<std::size_t> positions;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::Exact;
  GeneratorSpec generator;
  NoiseConfig noise;
  SampleSpec sample;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string output;
  std::string columns_out;  // tracker per-column log

  // Algorithm knobs.
  double eta_constant = 1.0;
  std::optional<double> eps_noise;  // tracker; defaults to noise eps
  double zero_tol = kDefaultZeroTol;
  bool with_replacement = true;
  bool dedup = false;
  Normalization normalization = Normalization::Strict;
  std::optional<std::size_t> tau;  // mixture mode; defaults to generator tau
  std::size_t combination_cap = kDefaultCombinationCap;

  // Sweep grid.
  std::vector<double> rank_ratios;
  std::vector<double> sample_ratios;
  std::size_t trials_per_cell = 10;

  // Mixture comparison d range; d_max = 0 means m.
  std::size_t d_min = 1;
  std::size_t d_max = 0;
  std::size_t d_step = 1;

  void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical key=value listing of the effective configuration.
std::vector<std::string> describe(const RunConfig& cfg);

struct TrialOutcome {
  std::uint64_t seed = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t d = 0;
  std::size_t s0 = 0;
  double mu0 = 0.0;
  RunReport report;
  bool success = false;
  std::optional<std::string> error;
};

/// Success: Frobenius error on clean columns <= 1e-6, recovered rank r and
/// an exact outlier support (when the run reports one).
bool metric_success(const RunReport& report, std::size_t r);

/// d = ceil(8 mu0 r log(r / delta)) clamped to [1, m].
std::size_t auto_sample_count(double mu0, std::size_t r, double delta,
                              std::size_t m);

/// Builds the clean instance described by the generator section.
Instance generate(const GeneratorSpec& spec, std::uint64_t seed);

struct PreparedTrial {
  Instance instance;  // M carries the configured corruption
  std::size_t d = 0;
  std::size_t s0 = 0;
  double mu0 = 0.0;
};

/// Instance, resolved d and corruption exactly as run_trial sees them.
PreparedTrial prepare_trial(const RunConfig& cfg, std::uint64_t seed);

/// One full trial: generate, pick d, corrupt, run, score. Algorithm errors
/// are captured in the outcome instead of thrown.
TrialOutcome run_trial(const RunConfig& cfg, std::uint64_t seed);

struct RunSummary {
  std::vector<TrialOutcome> trials;
  double success_fraction = 0.0;
  std::string csv;
  std::string columns_csv;  // tracker only, when requested
};

/// Trials with seeds seed, seed+1, ..., seed+trials-1.
RunSummary cmd_run(const RunConfig& cfg);

struct SweepCell {
  double rank_ratio = 0.0;
  double sample_ratio = 0.0;
  std::size_t r = 0;
  std::size_t d = 0;
  std::size_t s0 = 0;
  std::uint64_t cell_seed = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t errors = 0;
  double success_fraction() const {
    return trials ? static_cast<double>(successes) / static_cast<double>(trials)
                  : 0.0;
  }
};

struct SweepResult {
  std::vector<SweepCell> cells;  // rank-ratio major, sample ratio minor
  std::string csv;
};

/// Seed of a sweep cell; its trials use cell_seed + t, so a single run with
/// this seed and the cell's r and d reproduces the cell.
std::uint64_t sweep_cell_seed(std::uint64_t base, std::size_t rank_index,
                              std::size_t sample_index);
/// The RunConfig that a sweep evaluates for one cell.
RunConfig sweep_cell_config(const RunConfig& cfg, std::size_t rank_index,
                            std::size_t sample_index);
SweepResult cmd_sweep(const RunConfig& cfg);

struct ComparePoint {
  std::size_t d = 0;
  Algorithm algorithm = Algorithm::Exact;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t errors = 0;
  double success_fraction() const {
    return trials ? static_cast<double>(successes) / static_cast<double>(trials)
                  : 0.0;
  }
};

struct CompareResult {
  std::vector<ComparePoint> points;  // d major, Exact before Mixture
  std::string csv;
};

/// Single-subspace vs tau-sparse recovery on identical instances and sample
/// seeds, for every d in [d_min, d_max].
CompareResult cmd_compare_mixture(const RunConfig& cfg);

/// Thread count: LIFELONG_MC_THREADS when set, else hardware concurrency.
std::size_t worker_count();
/// Runs body(i) for i in [0, count) on up to worker_count() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Parses "a,b,c" or "start:stop:step" (inclusive) lists.
std::vector<double> parse_real_list(const std::string& text);

std::string format_real(double x);

}  // namespace lmc
