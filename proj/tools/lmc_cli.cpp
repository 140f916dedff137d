#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lmc/datagen.hpp"
#include "lmc/errors.hpp"
#include "lmc/harness.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "key = value config file")->required();
  sub->add_option("--seed", o.seed, "base seed");
  sub->add_option("--out", o.out, "output path (default: config output, else stdout)");
  sub->add_option("--trials", o.trials, "trial count");
}

lmc::RunConfig load(const Overrides& o) {
  lmc::RunConfig cfg = lmc::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) {
    cfg.trials = *o.trials;
    cfg.trials_per_cell = *o.trials;
  }
  if (!o.out.empty()) cfg.output = o.out;
  cfg.validate();
  return cfg;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw lmc::Error("cannot write '" + path + "'");
  f << text;
  if (!f) throw lmc::Error("write failed for '" + path + "'");
}

int cmd_gen(const lmc::RunConfig& cfg) {
  if (cfg.output.empty()) throw lmc::ConfigError("gen needs --out or output");
  const lmc::PreparedTrial p = lmc::prepare_trial(cfg, cfg.seed);
  lmc::save_matrix(cfg.output, p.instance.M);
  lmc::save_matrix(cfg.output + ".truth", p.instance.L);
  std::cout << "rows=" << p.instance.M.rows() << " cols=" << p.instance.M.cols()
            << " rank=" << p.instance.rank << " d=" << p.d
            << " mu0=" << lmc::format_real(p.mu0) << " noise_support=";
  for (std::size_t i = 0; i < p.instance.noise_support.size(); ++i) {
    std::cout << (i ? "," : "") << p.instance.noise_support[i];
  }
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Life-long matrix completion experiments"};
  app.require_subcommand(1);
  Overrides gen_o, run_o, sweep_o, cmp_o;
  auto* gen = app.add_subcommand("gen", "write an instance (M and M.truth)");
  auto* run = app.add_subcommand("run", "repeated trials of one configuration");
  auto* sweep = app.add_subcommand("sweep", "success grid over r/m and d/m");
  auto* cmp = app.add_subcommand("compare-mixture",
                                 "single-subspace vs tau-sparse success per d");
  add_common(gen, gen_o);
  add_common(run, run_o);
  add_common(sweep, sweep_o);
  add_common(cmp, cmp_o);
  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(load(gen_o));
    if (run->parsed()) {
      const lmc::RunConfig cfg = load(run_o);
      const lmc::RunSummary s = lmc::cmd_run(cfg);
      if (!cfg.columns_out.empty()) emit(cfg.columns_out, s.columns_csv);
      emit(cfg.output, s.csv);
      return 0;
    }
    if (sweep->parsed()) {
      const lmc::RunConfig cfg = load(sweep_o);
      emit(cfg.output, lmc::cmd_sweep(cfg).csv);
      return 0;
    }
    if (cmp->parsed()) {
      const lmc::RunConfig cfg = load(cmp_o);
      emit(cfg.output, lmc::cmd_compare_mixture(cfg).csv);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
