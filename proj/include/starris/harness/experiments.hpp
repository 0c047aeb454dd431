// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "starris/harness/config_io.hpp"

namespace starris::harness {

// Runs fn(0..count-1) on a bounded worker pool; results must be written to
// pre-sized slots so the output order never depends on scheduling.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

struct ConvergenceCurve {
  int n_antennas = 0;
  std::vector<double> mean_re;  // indexed by outer iteration
  std::vector<double> std_re;
  std::vector<std::vector<double>> per_trial;  // raw histories, padded
  int trials_ok = 0;
  int trials_failed = 0;
};

struct ConvergenceResult {
  std::vector<ConvergenceCurve> curves;
  std::string csv_path;
};

struct ReVsMCell {
  Scheme scheme = Scheme::proposed;
  int m = 0;
  std::vector<double> re;           // successful trials only
  std::vector<double> re_by_trial;  // aligned by trial index, NaN on failure
  int trials_failed = 0;
  double mean() const;
  double stddev() const;
};

struct ReVsMResult {
  std::vector<ReVsMCell> cells;
  std::string csv_path;
  const ReVsMCell& at(Scheme s, int m) const;
};

struct SeEeCell {
  double p_bs_max_dbm = 0;
  double omega = 0;
  std::vector<double> se;  // successful trials only
  std::vector<double> ee;
  int trials_failed = 0;
  double mean_se() const;
  double mean_ee() const;
};

struct SeEeResult {
  std::vector<SeEeCell> cells;
  std::string csv_path;
  std::string pareto_csv_path;
  const SeEeCell& at(double p_dbm, double omega) const;
};

// Fig. 2-style: convergence histories of the proposed scheme per antenna
// count; writes convergence.csv, a plot, and run metadata.
ConvergenceResult run_convergence(const ScenarioConfig& cfg);

// Fig. 3-style: mean RE per scheme over the surface-size grid with
// omega = P_max per configuration.
ReVsMResult run_re_vs_m(const ScenarioConfig& cfg);

// Fig. 4-style: (SE, EE) per budget and omega, plus a Pareto-front summary.
SeEeResult run_se_ee_tradeoff(const ScenarioConfig& cfg);

// One full solve of the configured scenario; writes the trace as JSON and
// prints a short report. Returns the trace.
SolveTrace run_single_solve(const ScenarioConfig& cfg);

}  // namespace starris::harness
