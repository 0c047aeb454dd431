// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: seeded Monte-Carlo campaigns over the comparison
// schemes, with CSV/SVG outputs per experiment.

#include <CLI11.hpp>
#include <cstdio>

#include "starris/harness/experiments.hpp"

using namespace starris;
using namespace starris::harness;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string schemes;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int trials = 0;
  int jobs = -1;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "scenario config file (JSON)");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "master seed")
      ->each([&](const std::string&) { args.has_seed = true; });
  cmd->add_option("--trials", args.trials, "Monte-Carlo trials per point");
  cmd->add_option("--schemes", args.schemes,
                  "comma-separated scheme list (proposed, passive_star, zf, "
                  "ideal_hw, csi_random, csi_worst)");
  cmd->add_option("--jobs", args.jobs, "worker threads (0 = all cores)");
  cmd->add_flag("--verbose", args.verbose, "per-iteration progress output");
}

ScenarioConfig make_config(const CommonArgs& args,
                           ExperimentSpec::Kind kind) {
  ScenarioConfig cfg = args.config_path.empty()
                           ? default_config()
                           : load_config(args.config_path);
  cfg.experiment.kind = kind;
  if (!args.out_dir.empty()) cfg.experiment.out_dir = args.out_dir;
  if (args.has_seed) cfg.experiment.master_seed = args.seed;
  if (args.trials > 0) cfg.experiment.trials = args.trials;
  if (args.jobs >= 0) cfg.experiment.jobs = args.jobs;
  if (args.verbose) cfg.solver.verbosity = 1;
  if (!args.schemes.empty()) {
    cfg.experiment.schemes.clear();
    std::string rest = args.schemes;
    while (!rest.empty()) {
      const auto pos = rest.find(',');
      const std::string name = rest.substr(0, pos);
      if (!name.empty())
        cfg.experiment.schemes.push_back(scheme_from_string(name));
      if (pos == std::string::npos) break;
      rest.erase(0, pos + 1);
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "starris: active STAR-RIS resource-efficiency optimization testbed"};
  app.require_subcommand(1);

  CommonArgs conv_args, m_args, see_args, solve_args;
  CLI::App* conv = app.add_subcommand(
      "convergence", "outer-iteration RE histories per antenna count");
  add_common(conv, conv_args);
  CLI::App* revm = app.add_subcommand(
      "re-vs-m", "mean RE per scheme over the surface-size grid");
  add_common(revm, m_args);
  CLI::App* seee = app.add_subcommand(
      "se-ee", "SE-EE tradeoff sweep over weights and power budgets");
  add_common(seee, see_args);
  CLI::App* solve =
      app.add_subcommand("solve", "one full solve of the configured scenario");
  add_common(solve, solve_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      const ScenarioConfig cfg =
          make_config(conv_args, ExperimentSpec::Kind::convergence);
      const ConvergenceResult res = run_convergence(cfg);
      for (const auto& curve : res.curves)
        std::printf("N=%d: %d/%d trials ok, final mean RE %.4f\n",
                    curve.n_antennas, curve.trials_ok,
                    curve.trials_ok + curve.trials_failed,
                    curve.mean_re.empty() ? 0.0 : curve.mean_re.back());
      std::printf("wrote %s\n", res.csv_path.c_str());
    } else if (revm->parsed()) {
      const ScenarioConfig cfg =
          make_config(m_args, ExperimentSpec::Kind::re_vs_m);
      const ReVsMResult res = run_re_vs_m(cfg);
      for (const auto& cell : res.cells)
        std::printf("%-12s M=%-3d mean RE %.4f (std %.4f, ok %zu, failed %d)\n",
                    to_string(cell.scheme), cell.m, cell.mean(), cell.stddev(),
                    cell.re.size(), cell.trials_failed);
      std::printf("wrote %s\n", res.csv_path.c_str());
    } else if (seee->parsed()) {
      const ScenarioConfig cfg =
          make_config(see_args, ExperimentSpec::Kind::se_ee_tradeoff);
      const SeEeResult res = run_se_ee_tradeoff(cfg);
      for (const auto& cell : res.cells)
        std::printf("P=%g dBm omega=%-8g mean SE %.3f  mean EE %.4g\n",
                    cell.p_bs_max_dbm, cell.omega, cell.mean_se(),
                    cell.mean_ee());
      std::printf("wrote %s\n", res.csv_path.c_str());
    } else if (solve->parsed()) {
      const ScenarioConfig cfg =
          make_config(solve_args, ExperimentSpec::Kind::single_solve);
      const SolveTrace tr = run_single_solve(cfg);
      if (!tr.ok()) {
        std::printf("solve failed: %s\n", tr.failure.c_str());
        return 1;
      }
      std::printf(
          "converged=%d outers=%d RE=%.4f SE=%.3f bit/s/Hz EE=%.4g bit/s/W "
          "P_tot=%.3f W (%.1fs)\n",
          tr.converged, tr.outer_iterations, tr.metrics.re, tr.metrics.se,
          tr.metrics.ee, tr.metrics.p_tot, tr.wall_seconds);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
