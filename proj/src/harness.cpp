#include "lmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lmc/errors.hpp"
#include "lmc/linalg.hpp"
#include "lmc/random.hpp"

namespace lmc {

namespace {

enum TrialStream : std::uint64_t { kInstance = 1, kCorruption = 2, kSampling = 3 };

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an unsigned 64-bit integer, got '" + v + "'");
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() ||
      !std::isfinite(out)) {
    throw ConfigError(key + ": expected a real number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<std::size_t> to_size_list(const std::string& key,
                                      const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& item : split(v, ',')) out.push_back(to_size(key, item));
  return out;
}

std::string join_reals(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_real(xs[i]);
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string opt_real(const std::optional<double>& x) {
  return x ? format_real(*x) : std::string();
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string preamble(const char* command, const RunConfig& cfg) {
  std::string out = "# lifelong_mc ";
  out += command;
  out += '\n';
  for (const auto& line : describe(cfg)) out += "# " + line + "\n";
  return out;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
  std::nth_element(xs.begin(), mid, xs.end());
  if (xs.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(xs.begin(), mid);
  return 0.5 * (lo + hi);
}

std::size_t floor_ratio(double ratio, std::size_t m) {
  return static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(m) + 1e-9));
}

std::size_t instance_rows(const GeneratorSpec& g) { return g.m; }

}  // namespace

const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Tracker: return "tracker";
    case Algorithm::Exact: return "exact";
    case Algorithm::Mixture: return "mixture";
  }
  return "?";
}

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_real_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) {
      throw ConfigError("range must be start:stop:step, got '" + t + "'");
    }
    const double start = to_real("range", parts[0]);
    const double stop = to_real("range", parts[1]);
    const double step = to_real("range", parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw ConfigError("range needs step > 0 and stop >= start");
    }
    const auto count =
        static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double v = start + static_cast<double>(i) * step;
      out[i] = std::round(v * 1e12) / 1e12;
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(t, ',')) out.push_back(to_real("list", item));
  return out;
}

void RunConfig::validate() const {
  const auto& g = generator;
  static const char* kGenerators[] = {"gaussian", "cumulative", "mixture",
                                      "lower_bound", "file"};
  if (std::find(std::begin(kGenerators), std::end(kGenerators), g.name) ==
      std::end(kGenerators)) {
    throw ConfigError("unknown generator '" + g.name + "'");
  }
  if (g.name == "file" && g.matrix_file.empty()) {
    throw ConfigError("generator=file needs matrix_file");
  }
  if (g.name != "file" && g.m < 1) throw ConfigError("m must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (trials_per_cell < 1) throw ConfigError("trials_per_cell must be >= 1");
  if (sample.mode == SampleSpec::Mode::Fixed && sample.d < 1) {
    throw ConfigError("d must be >= 1");
  }
  if (sample.mode == SampleSpec::Mode::Ratio &&
      !(sample.ratio > 0.0 && sample.ratio <= 1.0)) {
    throw ConfigError("d_ratio must lie in (0, 1]");
  }
  if (sample.mode == SampleSpec::Mode::Auto &&
      !(sample.delta > 0.0 && sample.delta < 1.0)) {
    throw ConfigError("delta must lie in (0, 1)");
  }
  if (noise.kind == NoiseConfig::Kind::Bounded && !(noise.eps >= 0.0)) {
    throw ConfigError("noise_eps must be >= 0");
  }
  if (!(zero_tol > 0.0)) throw ConfigError("zero_tol must be > 0");
  if (!(eta_constant >= 0.0)) throw ConfigError("eta_constant must be >= 0");
  for (double x : rank_ratios) {
    if (!(x > 0.0 && x <= 1.0)) throw ConfigError("rank ratios must lie in (0, 1]");
    if (floor_ratio(x, g.m) < 1) throw ConfigError("rank ratio gives r = 0");
  }
  for (double x : sample_ratios) {
    if (!(x > 0.0 && x <= 1.0)) throw ConfigError("sample ratios must lie in (0, 1]");
    if (floor_ratio(x, g.m) < 1) throw ConfigError("sample ratio gives d = 0");
  }
  if (d_step < 1) throw ConfigError("d_step must be >= 1");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    auto& g = cfg.generator;
    if (key == "algorithm") {
      if (v == "tracker") cfg.algorithm = Algorithm::Tracker;
      else if (v == "exact") cfg.algorithm = Algorithm::Exact;
      else if (v == "mixture") cfg.algorithm = Algorithm::Mixture;
      else throw ConfigError("unknown algorithm '" + v + "'");
    } else if (key == "generator") {
      g.name = v;
    } else if (key == "m") {
      g.m = to_size(key, v);
    } else if (key == "n") {
      g.n = to_size(key, v);
    } else if (key == "r") {
      g.r = to_size(key, v);
    } else if (key == "per_subspace") {
      g.per_subspace = to_size(key, v);
    } else if (key == "h") {
      g.h = to_size(key, v);
    } else if (key == "tau") {
      g.tau = to_size(key, v);
    } else if (key == "mu0") {
      g.mu0 = to_real(key, v);
    } else if (key == "b_values") {
      g.b_values = parse_real_list(v);
    } else if (key == "matrix_file") {
      g.matrix_file = v;
    } else if (key == "truth_file") {
      g.truth_file = v;
    } else if (key == "noise") {
      if (v == "none") cfg.noise.kind = NoiseConfig::Kind::None;
      else if (v == "bounded") cfg.noise.kind = NoiseConfig::Kind::Bounded;
      else if (v == "sparse") cfg.noise.kind = NoiseConfig::Kind::Sparse;
      else throw ConfigError("unknown noise '" + v + "'");
    } else if (key == "noise_eps") {
      cfg.noise.eps = to_real(key, v);
    } else if (key == "noise_s0") {
      if (v == "auto") cfg.noise.s0.reset();
      else cfg.noise.s0 = to_size(key, v);
    } else if (key == "noise_positions") {
      cfg.noise.positions = to_size_list(key, v);
    } else if (key == "d") {
      if (v == "auto") {
        cfg.sample.mode = SampleSpec::Mode::Auto;
      } else {
        cfg.sample.mode = SampleSpec::Mode::Fixed;
        cfg.sample.d = to_size(key, v);
      }
    } else if (key == "d_ratio") {
      cfg.sample.mode = SampleSpec::Mode::Ratio;
      cfg.sample.ratio = to_real(key, v);
    } else if (key == "delta") {
      cfg.sample.delta = to_real(key, v);
    } else if (key == "eta_constant") {
      cfg.eta_constant = to_real(key, v);
    } else if (key == "eps_noise") {
      cfg.eps_noise = to_real(key, v);
    } else if (key == "zero_tol") {
      cfg.zero_tol = to_real(key, v);
    } else if (key == "with_replacement") {
      cfg.with_replacement = to_bool(key, v);
    } else if (key == "dedup") {
      cfg.dedup = to_bool(key, v);
    } else if (key == "normalization") {
      if (v == "strict") cfg.normalization = Normalization::Strict;
      else if (v == "lenient") cfg.normalization = Normalization::Lenient;
      else throw ConfigError("normalization must be strict or lenient");
    } else if (key == "sparse_tau") {
      cfg.tau = to_size(key, v);
    } else if (key == "combination_cap") {
      cfg.combination_cap = to_size(key, v);
    } else if (key == "trials") {
      cfg.trials = to_size(key, v);
    } else if (key == "seed") {
      cfg.seed = to_u64(key, v);
    } else if (key == "output") {
      cfg.output = v;
    } else if (key == "columns_out") {
      cfg.columns_out = v;
    } else if (key == "rank_ratios") {
      cfg.rank_ratios = parse_real_list(v);
    } else if (key == "sample_ratios") {
      cfg.sample_ratios = parse_real_list(v);
    } else if (key == "trials_per_cell") {
      cfg.trials_per_cell = to_size(key, v);
    } else if (key == "d_min") {
      cfg.d_min = to_size(key, v);
    } else if (key == "d_max") {
      cfg.d_max = to_size(key, v);
    } else if (key == "d_step") {
      cfg.d_step = to_size(key, v);
    } else {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<std::string> describe(const RunConfig& cfg) {
  const auto& g = cfg.generator;
  std::vector<std::string> out;
  out.push_back("schema_version=" + std::to_string(kCsvSchemaVersion));
  out.push_back(std::string("algorithm=") + to_string(cfg.algorithm));
  out.push_back("generator=" + g.name);
  out.push_back("m=" + std::to_string(g.m));
  out.push_back("n=" + std::to_string(g.n));
  out.push_back("r=" + std::to_string(g.r));
  out.push_back("per_subspace=" + std::to_string(g.per_subspace));
  out.push_back("h=" + std::to_string(g.h));
  out.push_back("tau=" + std::to_string(g.tau));
  out.push_back("mu0=" + format_real(g.mu0));
  out.push_back("b_values=" + join_reals(g.b_values));
  out.push_back("matrix_file=" + g.matrix_file);
  out.push_back("truth_file=" + g.truth_file);
  static const char* kNoise[] = {"none", "bounded", "sparse"};
  out.push_back(std::string("noise=") + kNoise[static_cast<int>(cfg.noise.kind)]);
  out.push_back("noise_eps=" + format_real(cfg.noise.eps));
  out.push_back("noise_s0=" +
                (cfg.noise.s0 ? std::to_string(*cfg.noise.s0) : "auto"));
  out.push_back("noise_positions=" + join_sizes(cfg.noise.positions));
  switch (cfg.sample.mode) {
    case SampleSpec::Mode::Fixed:
      out.push_back("d=" + std::to_string(cfg.sample.d));
      break;
    case SampleSpec::Mode::Ratio:
      out.push_back("d_ratio=" + format_real(cfg.sample.ratio));
      break;
    case SampleSpec::Mode::Auto:
      out.push_back("d=auto");
      break;
  }
  out.push_back("delta=" + format_real(cfg.sample.delta));
  out.push_back("eta_constant=" + format_real(cfg.eta_constant));
  out.push_back("eps_noise=" + (cfg.eps_noise ? format_real(*cfg.eps_noise)
                                              : std::string("from_noise")));
  out.push_back("zero_tol=" + format_real(cfg.zero_tol));
  out.push_back(std::string("with_replacement=") +
                (cfg.with_replacement ? "true" : "false"));
  out.push_back(std::string("dedup=") + (cfg.dedup ? "true" : "false"));
  out.push_back(std::string("normalization=") +
                (cfg.normalization == Normalization::Strict ? "strict"
                                                             : "lenient"));
  out.push_back("sparse_tau=" +
                (cfg.tau ? std::to_string(*cfg.tau) : std::string("from_generator")));
  out.push_back("combination_cap=" + std::to_string(cfg.combination_cap));
  out.push_back("trials=" + std::to_string(cfg.trials));
  out.push_back("seed=" + std::to_string(cfg.seed));
  out.push_back("rank_ratios=" + join_reals(cfg.rank_ratios));
  out.push_back("sample_ratios=" + join_reals(cfg.sample_ratios));
  out.push_back("trials_per_cell=" + std::to_string(cfg.trials_per_cell));
  out.push_back("d_min=" + std::to_string(cfg.d_min));
  out.push_back("d_max=" + std::to_string(cfg.d_max));
  out.push_back("d_step=" + std::to_string(cfg.d_step));
  return out;
}

bool metric_success(const RunReport& report, std::size_t r) {
  return report.frob_abs_error &&
         *report.frob_abs_error <= kSuccessFrobTolerance &&
         report.recovered_rank == r && report.support_exact.value_or(true);
}

std::size_t auto_sample_count(double mu0, std::size_t r, double delta,
                              std::size_t m) {
  const double rr = static_cast<double>(r);
  const double raw = 8.0 * mu0 * rr * std::log(rr / delta);
  const double d = std::ceil(raw);
  if (!(d >= 1.0)) return 1;
  return d >= static_cast<double>(m) ? m : static_cast<std::size_t>(d);
}

Instance generate(const GeneratorSpec& g, std::uint64_t seed) {
  if (g.name == "gaussian") return gen_gaussian_lowrank(g.m, g.n, g.r, seed);
  if (g.name == "cumulative") return gen_cumulative(g.m, seed);
  if (g.name == "mixture") {
    return gen_mixture(g.m, g.per_subspace, g.h, g.tau, seed);
  }
  if (g.name == "lower_bound") {
    std::vector<double> b = g.b_values;
    if (b.empty()) b.assign(g.r, 1.0);
    return gen_lower_bound(g.m, g.mu0, g.r, b, seed);
  }
  if (g.name == "file") {
    Instance inst;
    inst.M = load_matrix(g.matrix_file);
    inst.L = g.truth_file.empty() ? inst.M : load_matrix(g.truth_file);
    if (inst.L.rows() != inst.M.rows() || inst.L.cols() != inst.M.cols()) {
      throw ConfigError("truth_file shape differs from matrix_file");
    }
    inst.U_true = orthonormalize(inst.L);
    inst.rank = g.r > 0 ? g.r : inst.U_true.cols();
    inst.generator = "file";
    inst.parameters = {{"matrix_file", g.matrix_file}};
    inst.seed = seed;
    return inst;
  }
  throw ConfigError("unknown generator '" + g.name + "'");
}

PreparedTrial prepare_trial(const RunConfig& cfg, std::uint64_t seed) {
  PreparedTrial p;
  p.instance = generate(cfg.generator, derive_seed(seed, {kInstance}));
  const Instance& inst = p.instance;
  p.mu0 = inst.U_true.cols() > 0 ? incoherence(inst.U_true) : 0.0;
  const std::size_t m = inst.L.rows();
  switch (cfg.sample.mode) {
    case SampleSpec::Mode::Fixed:
      p.d = cfg.sample.d;
      break;
    case SampleSpec::Mode::Ratio:
      p.d = std::max<std::size_t>(1, floor_ratio(cfg.sample.ratio, m));
      break;
    case SampleSpec::Mode::Auto:
      p.d = auto_sample_count(p.mu0, inst.rank, cfg.sample.delta, m);
      break;
  }

  NoiseSpec spec;
  switch (cfg.noise.kind) {
    case NoiseConfig::Kind::None:
      break;
    case NoiseConfig::Kind::Bounded:
      spec = NoiseSpec::bounded(cfg.noise.eps);
      break;
    case NoiseConfig::Kind::Sparse:
      if (cfg.noise.s0) {
        p.s0 = *cfg.noise.s0;
      } else if (!cfg.noise.positions.empty()) {
        p.s0 = cfg.noise.positions.size();
      } else if (p.d > inst.rank + 1) {
        p.s0 = std::min(p.d - inst.rank - 1, inst.L.cols());
      }
      spec = NoiseSpec::sparse_columns(p.s0, cfg.noise.positions);
      break;
  }
  p.instance = apply_noise(inst, spec, derive_seed(seed, {kCorruption}));
  return p;
}

TrialOutcome run_trial(const RunConfig& cfg, std::uint64_t seed) {
  TrialOutcome out;
  out.seed = seed;
  PreparedTrial prepared = prepare_trial(cfg, seed);
  const Instance& inst = prepared.instance;
  out.m = inst.L.rows();
  out.n = inst.L.cols();
  out.r = inst.rank;
  out.d = prepared.d;
  out.s0 = prepared.s0;
  out.mu0 = prepared.mu0;
  try {
    const std::uint64_t algo_seed = derive_seed(seed, {kSampling, out.d});

    if (cfg.algorithm == Algorithm::Tracker) {
      TrackerConfig tc;
      tc.d = out.d;
      tc.eta_constant = cfg.eta_constant;
      tc.zero_tol = cfg.zero_tol;
      tc.eps_noise = cfg.eps_noise.value_or(
          cfg.noise.kind == NoiseConfig::Kind::Bounded ? cfg.noise.eps : 0.0);
      tc.seed = algo_seed;
      tc.with_replacement = cfg.with_replacement;
      tc.dedup = cfg.dedup;
      tc.normalization = cfg.normalization;
      TrackerResult res = run_stream(inst.M, tc, &inst.L);
      out.report = std::move(res.report);
      const FrobeniusErrors fe =
          frobenius_errors(res.estimate, inst.L, inst.noise_support);
      out.report.frob_abs_error = fe.abs;
      out.report.frob_rel_error = fe.rel;
    } else {
      ExactConfig ec;
      ec.d = out.d;
      ec.zero_tol = cfg.zero_tol;
      ec.seed = algo_seed;
      ec.combination_cap = cfg.combination_cap;
      if (cfg.algorithm == Algorithm::Mixture) {
        ec.tau = cfg.tau.value_or(cfg.generator.tau);
      }
      const Truth truth{&inst.L, inst.noise_support};
      ExactOutcome res = run_exact(inst.M, ec, &truth);
      out.report = std::move(res.report);
      const FrobeniusErrors fe =
          frobenius_errors(res.result.recovered, inst.L, inst.noise_support);
      out.report.frob_abs_error = fe.abs;
      out.report.frob_rel_error = fe.rel;
    }
    out.success = metric_success(out.report, out.r);
  } catch (const StreamError& e) {
    out.report = e.partial();
    out.error = e.what();
    out.success = false;
  } catch (const Error& e) {
    out.error = e.what();
    out.success = false;
  }
  return out;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("LIFELONG_MC_THREADS")) {
    std::size_t v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

RunSummary cmd_run(const RunConfig& cfg) {
  cfg.validate();
  RunSummary summary;
  summary.trials.resize(cfg.trials);
  parallel_for(cfg.trials, [&](std::size_t t) {
    summary.trials[t] = run_trial(cfg, cfg.seed + t);
  });

  std::ostringstream csv;
  csv << preamble("run", cfg);
  csv << "schema_version,row,trial,seed,algorithm,m,n,r,d,s0,mu0,K,"
         "fully_measured,recovered_rank,entries_sampled,frob_abs_error,"
         "frob_rel_error,max_column_error,median_column_error,support_exact,"
         "success,error\n";
  std::size_t successes = 0;
  std::size_t errors = 0;
  double worst_frob = 0.0;
  for (std::size_t t = 0; t < summary.trials.size(); ++t) {
    const TrialOutcome& o = summary.trials[t];
    const RunReport& rep = o.report;
    successes += o.success ? 1 : 0;
    errors += o.error ? 1 : 0;
    if (rep.frob_abs_error) worst_frob = std::max(worst_frob, *rep.frob_abs_error);
    std::string max_err;
    std::string med_err;
    if (!rep.per_column_error.empty()) {
      max_err = format_real(*std::max_element(rep.per_column_error.begin(),
                                              rep.per_column_error.end()));
      med_err = format_real(median(rep.per_column_error));
    }
    csv << kCsvSchemaVersion << ",trial," << t << ',' << o.seed << ','
        << to_string(cfg.algorithm) << ',' << o.m << ',' << o.n << ',' << o.r
        << ',' << o.d << ',' << o.s0 << ',' << format_real(o.mu0) << ','
        << rep.K << ',' << rep.fully_measured << ',' << rep.recovered_rank
        << ',' << rep.entries_sampled << ',' << opt_real(rep.frob_abs_error)
        << ',' << opt_real(rep.frob_rel_error) << ',' << max_err << ','
        << med_err << ','
        << (rep.support_exact ? (*rep.support_exact ? "1" : "0") : "") << ','
        << (o.success ? 1 : 0) << ',' << csv_safe(o.error.value_or("")) << '\n';
  }
  summary.success_fraction =
      static_cast<double>(successes) / static_cast<double>(cfg.trials);
  const TrialOutcome& first = summary.trials.front();
  csv << kCsvSchemaVersion << ",aggregate," << cfg.trials << ',' << cfg.seed
      << ',' << to_string(cfg.algorithm) << ',' << first.m << ',' << first.n
      << ",,,,,,,,," << format_real(worst_frob) << ",,,,,"
      << format_real(summary.success_fraction) << ',' << errors << '\n';
  summary.csv = csv.str();

  if (cfg.algorithm == Algorithm::Tracker) {
    std::ostringstream cols;
    cols << preamble("run-columns", cfg);
    cols << "schema_version,trial,column,k,decision,residual,threshold,error,"
            "bound\n";
    for (std::size_t t = 0; t < summary.trials.size(); ++t) {
      const TrialOutcome& o = summary.trials[t];
      const double eps = cfg.eps_noise.value_or(
          cfg.noise.kind == NoiseConfig::Kind::Bounded ? cfg.noise.eps : 0.0);
      for (std::size_t j = 0; j < o.report.columns.size(); ++j) {
        const ColumnRecord& rec = o.report.columns[j];
        cols << kCsvSchemaVersion << ',' << t << ',' << j << ','
             << rec.basis_size << ',' << to_string(rec.decision) << ','
             << format_real(rec.residual) << ',' << format_real(rec.threshold)
             << ','
             << (j < o.report.per_column_error.size()
                     ? format_real(o.report.per_column_error[j])
                     : std::string())
             << ',' << format_real(error_bound(rec.basis_size, o.m, o.d, eps))
             << '\n';
      }
    }
    summary.columns_csv = cols.str();
  }
  return summary;
}

std::uint64_t sweep_cell_seed(std::uint64_t base, std::size_t rank_index,
                              std::size_t sample_index) {
  return derive_seed(base, {0x5357ULL, rank_index, sample_index});
}

RunConfig sweep_cell_config(const RunConfig& cfg, std::size_t rank_index,
                            std::size_t sample_index) {
  RunConfig cell = cfg;
  const std::size_t m = instance_rows(cfg.generator);
  cell.generator.r = floor_ratio(cfg.rank_ratios.at(rank_index), m);
  cell.sample.mode = SampleSpec::Mode::Fixed;
  cell.sample.d = floor_ratio(cfg.sample_ratios.at(sample_index), m);
  cell.trials = cfg.trials_per_cell;
  cell.seed = sweep_cell_seed(cfg.seed, rank_index, sample_index);
  cell.rank_ratios.clear();
  cell.sample_ratios.clear();
  return cell;
}

SweepResult cmd_sweep(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.rank_ratios.empty() || cfg.sample_ratios.empty()) {
    throw ConfigError("sweep needs rank_ratios and sample_ratios");
  }
  if (cfg.generator.name != "gaussian") {
    throw ConfigError("sweep varies r and needs generator = gaussian");
  }
  const std::size_t nr = cfg.rank_ratios.size();
  const std::size_t ns = cfg.sample_ratios.size();
  const std::size_t per = cfg.trials_per_cell;
  std::vector<RunConfig> cells;
  for (std::size_t ri = 0; ri < nr; ++ri) {
    for (std::size_t si = 0; si < ns; ++si) {
      cells.push_back(sweep_cell_config(cfg, ri, si));
    }
  }
  std::vector<TrialOutcome> outcomes(cells.size() * per);
  parallel_for(outcomes.size(), [&](std::size_t idx) {
    const RunConfig& cell = cells[idx / per];
    outcomes[idx] = run_trial(cell, cell.seed + idx % per);
  });

  SweepResult result;
  std::ostringstream csv;
  csv << preamble("sweep", cfg);
  csv << "schema_version,rank_ratio,sample_ratio,m,n,r,d,s0,trials,successes,"
         "errors,success_fraction,cell_seed\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepCell cell;
    cell.rank_ratio = cfg.rank_ratios[c / ns];
    cell.sample_ratio = cfg.sample_ratios[c % ns];
    cell.r = cells[c].generator.r;
    cell.d = cells[c].sample.d;
    cell.cell_seed = cells[c].seed;
    cell.trials = per;
    for (std::size_t t = 0; t < per; ++t) {
      const TrialOutcome& o = outcomes[c * per + t];
      cell.successes += o.success ? 1 : 0;
      cell.errors += o.error ? 1 : 0;
      cell.s0 = o.s0;
    }
    csv << kCsvSchemaVersion << ',' << format_real(cell.rank_ratio) << ','
        << format_real(cell.sample_ratio) << ',' << cfg.generator.m << ','
        << cfg.generator.n << ',' << cell.r << ',' << cell.d << ',' << cell.s0
        << ',' << cell.trials << ',' << cell.successes << ',' << cell.errors
        << ',' << format_real(cell.success_fraction()) << ',' << cell.cell_seed
        << '\n';
    result.cells.push_back(cell);
  }
  result.csv = csv.str();
  return result;
}

CompareResult cmd_compare_mixture(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.generator.name != "mixture") {
    throw ConfigError("compare-mixture needs generator = mixture");
  }
  const std::size_t m = cfg.generator.m;
  const std::size_t d_max = cfg.d_max == 0 ? m : std::min(cfg.d_max, m);
  if (cfg.d_min < 1 || cfg.d_min > d_max) {
    throw ConfigError("compare-mixture: empty d range");
  }
  std::vector<std::size_t> ds;
  for (std::size_t d = cfg.d_min; d <= d_max; d += cfg.d_step) ds.push_back(d);
  constexpr Algorithm kAlgorithms[] = {Algorithm::Exact, Algorithm::Mixture};
  const std::size_t trials = cfg.trials;
  const std::size_t tasks = ds.size() * 2 * trials;

  std::vector<char> success(tasks, 0);
  std::vector<char> failed(tasks, 0);
  parallel_for(tasks, [&](std::size_t idx) {
    const std::size_t t = idx % trials;
    const std::size_t a = (idx / trials) % 2;
    const std::size_t di = idx / (2 * trials);
    RunConfig one = cfg;
    one.algorithm = kAlgorithms[a];
    one.sample.mode = SampleSpec::Mode::Fixed;
    one.sample.d = ds[di];
    // Shared instance per trial across every d and both algorithms.
    const TrialOutcome o = run_trial(one, derive_seed(cfg.seed, {0x4d4958ULL, t}));
    success[idx] = o.success ? 1 : 0;
    failed[idx] = o.error ? 1 : 0;
  });

  CompareResult result;
  std::ostringstream csv;
  csv << preamble("compare-mixture", cfg);
  csv << "schema_version,d,algorithm,trials,successes,errors,success_fraction\n";
  for (std::size_t di = 0; di < ds.size(); ++di) {
    for (std::size_t a = 0; a < 2; ++a) {
      ComparePoint p;
      p.d = ds[di];
      p.algorithm = kAlgorithms[a];
      p.trials = trials;
      for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t idx = (di * 2 + a) * trials + t;
        p.successes += static_cast<std::size_t>(success[idx]);
        p.errors += static_cast<std::size_t>(failed[idx]);
      }
      csv << kCsvSchemaVersion << ',' << p.d << ','
          << (a == 0 ? "single" : "mixture") << ',' << p.trials << ','
          << p.successes << ',' << p.errors << ','
          << format_real(p.success_fraction()) << '\n';
      result.points.push_back(p);
    }
  }
  result.csv = csv.str();
  return result;
}

}  // namespace lmc
