// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <atomic>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "starris/harness/experiments.hpp"
#include "starris/harness/output.hpp"
#include "starris/rng.hpp"
#include "starris/units.hpp"

using namespace starris;
using namespace starris::harness;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// small scenario that solves in well under a second
ScenarioConfig tiny_config(const std::string& out_dir) {
  ScenarioConfig cfg = default_config();
  cfg.system.n_antennas = 2;
  cfg.system.n_elements = 4;
  cfg.system.n_users = 2;
  cfg.system.user_sides = {Side::transmission, Side::reflection};
  cfg.refresh_omega();
  cfg.experiment.trials = 1;
  cfg.experiment.n_grid = {2};
  cfg.experiment.m_grid = {4};
  cfg.experiment.out_dir = out_dir;
  cfg.experiment.master_seed = 9;
  cfg.experiment.schemes = {Scheme::proposed};
  return cfg;
}

}  // namespace

TEST_CASE("empty config gives the paper defaults") {
  const ScenarioConfig cfg = config_from_json(json::object());
  CHECK(cfg.system.n_antennas == 4);
  CHECK(cfg.system.n_elements == 30);
  CHECK(cfg.system.n_users == 4);
  CHECK(cfg.system.users_on(Side::transmission) == 2);
  CHECK(cfg.system.users_on(Side::reflection) == 2);
  CHECK(cfg.system.bandwidth == 10e6);
  CHECK(cfg.system.p_ris_max == 1.0);   // 30 dBm
  CHECK(cfg.system.p_bs_max == 1.0);    // 30 dBm
  CHECK(cfg.system.r_min == 0.4);
  CHECK(cfg.system.xi == 0.8);
  CHECK(cfg.system.p_r == doctest::Approx(0.01).epsilon(1e-15));  // 10 dBm
  CHECK(cfg.system.p_c == 1.0);         // 30 dBm
  CHECK(cfg.system.sigma2 == doctest::Approx(1e-14).epsilon(1e-15));
  CHECK(cfg.system.sigma_a2 == doctest::Approx(1e-14).epsilon(1e-15));
  CHECK(cfg.system.kappa_b == 0.02);
  CHECK(cfg.system.kappa_u == 0.02);
  CHECK(cfg.system.rho_max == 5.0);
  CHECK((cfg.geometry.bs_position - cfg.geometry.ris_position).norm() == 40.0);
  CHECK(cfg.geometry.user_drop_radius == 3.0);
  // omega follows P_max by default: omega/P_max = 1
  CHECK(cfg.omega_tracks_p_max);
  CHECK(cfg.system.omega == doctest::Approx(cfg.system.p_max()));
}

TEST_CASE("config parsing: dBm conversion, overrides and errors") {
  json j;
  j["system"]["p_bs_max_dbm"] = 20.0;
  j["system"]["kappa_b"] = 0.0;
  j["system"]["kappa_u"] = 0.0;
  j["system"]["omega"] = 2.5;
  const ScenarioConfig cfg = config_from_json(j);
  CHECK(cfg.system.p_bs_max == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(cfg.system.kappa_b == 0.0);  // ideal-hardware override
  CHECK(!cfg.omega_tracks_p_max);
  CHECK(cfg.system.omega == 2.5);

  json bad;
  bad["system"]["p_bs_max_dmb"] = 20.0;  // typo must be rejected
  CHECK_THROWS_WITH_AS(config_from_json(bad),
                       doctest::Contains("unknown key"),
                       std::invalid_argument);
  json both;
  both["system"]["p_bs_max_dbm"] = 20.0;
  both["system"]["p_bs_max_w"] = 0.1;
  CHECK_THROWS_AS(config_from_json(both), std::invalid_argument);
  json sides;
  sides["system"]["users_per_side"] = {1, 2};
  CHECK_THROWS_WITH_AS(config_from_json(sides),
                       doctest::Contains("users_per_side"),
                       std::invalid_argument);
  json zero_noise;
  zero_noise["system"]["noise_w"] = 0.0;
  CHECK_THROWS_AS(config_from_json(zero_noise), std::invalid_argument);
}

TEST_CASE("config round-trips through emit and load") {
  ScenarioConfig cfg = default_config();
  cfg.system.n_elements = 24;
  cfg.system.kappa_b = 0.05;
  cfg.experiment.kind = ExperimentSpec::Kind::re_vs_m;
  cfg.experiment.trials = 3;
  cfg.experiment.schemes = {Scheme::proposed, Scheme::zf};
  cfg.refresh_omega();
  const ScenarioConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.system.n_elements == cfg.system.n_elements);
  CHECK(back.system.kappa_b == cfg.system.kappa_b);
  CHECK(back.system.p_bs_max == cfg.system.p_bs_max);
  CHECK(back.system.sigma2 == cfg.system.sigma2);
  CHECK(back.system.omega == cfg.system.omega);
  CHECK(back.experiment.kind == cfg.experiment.kind);
  CHECK(back.experiment.trials == cfg.experiment.trials);
  CHECK(back.experiment.schemes == cfg.experiment.schemes);
  CHECK(config_to_json(back) == config_to_json(cfg));
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<std::atomic<int>> hits(64);
  parallel_for(64, 4, [&](int i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("csv writer formats deterministically") {
  CHECK(CsvWriter::num(1.0) == "1");
  CHECK(CsvWriter::num(0.123456789012345) == "0.123456789012");
  CHECK(CsvWriter::num(1e-14) == "1e-14");
}

TEST_CASE("convergence campaign: csv equals the trace history verbatim") {
  const std::string dir = "harness_out_conv";
  ScenarioConfig cfg = tiny_config(dir);
  const ConvergenceResult res = run_convergence(cfg);
  REQUIRE(res.curves.size() == 1);
  REQUIRE(res.curves[0].trials_ok == 1);

  // one trial: the mean column is the per-trial history
  SolverOptions opts = cfg.solver;
  const std::uint64_t seed = derive_seed(cfg.experiment.master_seed, 0);
  opts.seed = seed;
  const ChannelSet ch = generate_channels(cfg.geometry, cfg.system, seed);
  const SolveTrace tr = ao_solve(ch, cfg.system, opts);
  REQUIRE(tr.ok());
  REQUIRE(res.curves[0].mean_re.size() == tr.outers.size());
  for (std::size_t i = 0; i < tr.outers.size(); ++i)
    CHECK(res.curves[0].mean_re[i] == tr.outers[i].re);

  // curves are non-decreasing in iteration
  for (std::size_t i = 1; i < res.curves[0].mean_re.size(); ++i)
    CHECK(res.curves[0].mean_re[i] >= res.curves[0].mean_re[i - 1] - 1e-6);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  ScenarioConfig a = tiny_config("harness_out_a");
  ScenarioConfig b = tiny_config("harness_out_b");
  run_convergence(a);
  run_convergence(b);
  const std::string csv_a = slurp("harness_out_a/convergence.csv");
  const std::string csv_b = slurp("harness_out_b/convergence.csv");
  REQUIRE(!csv_a.empty());
  CHECK(csv_a == csv_b);
  // metadata carries the per-trial seeds
  const json meta = json::parse(slurp("harness_out_a/convergence_metadata.json"));
  CHECK(meta.at("trial_seeds").size() == 1);
  CHECK(meta.at("config").at("system").at("n_ris_elements") == 4);
}

TEST_CASE("single solve writes a machine-readable trace") {
  ScenarioConfig cfg = tiny_config("harness_out_solve");
  cfg.experiment.kind = ExperimentSpec::Kind::single_solve;
  const SolveTrace tr = run_single_solve(cfg);
  REQUIRE(tr.ok());
  const json j = json::parse(slurp("harness_out_solve/solve_trace.json"));
  CHECK(j.at("converged").get<bool>() == tr.converged);
  CHECK(j.at("outers").size() == tr.outers.size());
  CHECK(j.at("metrics").at("re").get<double>() ==
        doctest::Approx(tr.metrics.re));
}

TEST_CASE("convergence experiment: more antennas give higher final RE") {
  ScenarioConfig cfg = default_config();
  cfg.system.n_elements = 16;
  cfg.refresh_omega();
  cfg.experiment.kind = ExperimentSpec::Kind::convergence;
  cfg.experiment.n_grid = {2, 4};
  cfg.experiment.trials = 2;
  cfg.experiment.master_seed = 31;
  cfg.experiment.out_dir = "harness_out_ntrend";
  const ConvergenceResult res = run_convergence(cfg);
  REQUIRE(res.curves.size() == 2);
  REQUIRE(res.curves[0].trials_ok == 2);
  REQUIRE(res.curves[1].trials_ok == 2);
  CHECK(res.curves[1].mean_re.back() >= res.curves[0].mean_re.back());
  // plot is emitted alongside the CSV
  const std::string svg = slurp("harness_out_ntrend/convergence.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  // header row names units
  const std::string csv = slurp("harness_out_ntrend/convergence.csv");
  CHECK(csv.rfind("iteration,n_antennas,mean_re[1],std_re[1],trials_ok\n", 0) == 0);
}

TEST_CASE("zero SE weight maximizes energy efficiency in the sweep") {
  ScenarioConfig cfg = default_config();
  cfg.system.n_elements = 8;
  cfg.refresh_omega();
  cfg.experiment.kind = ExperimentSpec::Kind::se_ee_tradeoff;
  cfg.experiment.p_bs_max_dbm_grid = {30.0};
  cfg.experiment.omega_grid = {0.0, 8.0 * cfg.system.p_max()};
  cfg.experiment.trials = 2;
  cfg.experiment.master_seed = 37;
  cfg.experiment.out_dir = "harness_out_omega0";
  const SeEeResult res = run_se_ee_tradeoff(cfg);
  const double ee0 = res.at(30.0, 0.0).mean_ee();
  const double ee_big = res.at(30.0, cfg.experiment.omega_grid[1]).mean_ee();
  CHECK(ee0 >= ee_big * (1.0 - 1e-6));
}
