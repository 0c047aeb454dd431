// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "starris/baselines.hpp"
#include "starris/channel.hpp"
#include "starris/optimizer/ao.hpp"
#include "starris/types.hpp"

namespace starris::harness {

struct ExperimentSpec {
  enum class Kind { convergence, re_vs_m, se_ee_tradeoff, single_solve };
  Kind kind = Kind::single_solve;
  std::vector<int> m_grid{8, 16, 24, 32, 40};
  std::vector<int> n_grid{4, 6};
  std::vector<double> p_bs_max_dbm_grid{20.0, 30.0};
  std::vector<double> omega_grid;  // empty: multiples of P_max, set at load
  int trials = 10;
  std::uint64_t master_seed = 1;
  std::vector<Scheme> schemes{Scheme::proposed,   Scheme::passive_star,
                              Scheme::zf,         Scheme::ideal_hw,
                              Scheme::csi_random, Scheme::csi_worst};
  std::string out_dir = "out";
  int jobs = 0;  // 0: hardware concurrency

  void validate() const;
};

const char* to_string(ExperimentSpec::Kind k);
ExperimentSpec::Kind kind_from_string(const std::string& name);

struct ScenarioConfig {
  SystemConfig system;
  GeometryConfig geometry;
  ExperimentSpec experiment;
  SolverOptions solver;
  // omega given as the literal "p_max": keep omega = P_max under sweeps
  bool omega_tracks_p_max = true;

  void refresh_omega() {
    if (omega_tracks_p_max) system.omega = system.p_max();
  }
};

// paper-scenario defaults; equals parsing an empty JSON object
ScenarioConfig default_config();

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);

}  // namespace starris::harness
