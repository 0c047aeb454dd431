// SPDX-License-Identifier: Apache-2.0
//
// Spec-level acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any requested criterion fails.
//
// Usage: acceptance <criterion> [...], where criterion is one of
//   1 2 3 4 5_9 6 7 8 10 all

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "starris/baselines.hpp"
#include "starris/harness/experiments.hpp"
#include "starris/metrics.hpp"
#include "starris/montecarlo.hpp"
#include "starris/optimizer/ao.hpp"
#include "starris/optimizer/operators.hpp"
#include "starris/optimizer/subproblems.hpp"
#include "starris/units.hpp"
#include "../test_util.hpp"

using namespace starris;
using namespace starris::harness;
using testing::Instance;
using testing::random_instance;

namespace {

int g_failures = 0;

struct Criterion {
  std::string id;
  std::string label;
  bool pass = true;
  std::vector<std::string> notes;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
  void finish() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %s: %s [%.1f s]\n", pass ? "PASS" : "FAIL",
                id.c_str(), label.c_str(), secs);
    for (const std::string& note : notes)
      std::printf("         - %s\n", note.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
  }
};

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

double mean_of(const std::vector<double>& v) {
  double acc = 0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / v.size();
}

// ---------------------------------------------------------------- 1
void criterion_1() {
  Criterion c{"1", "algebraic equivalence of SINR and P_act forms"};
  double worst_sinr = 0, worst_pact = 0, worst_diag = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Instance ins = random_instance(4, 8, 4, 0.02, 10000 + rep);
    for (int k = 0; k < 4; ++k) {
      const double direct = sinr(k, ins.bf, ins.star, ins.ch, ins.cfg);
      worst_sinr = std::max(
          worst_sinr,
          rel_err(direct, sinr_ck_form(k, ins.bf, ins.star, ins.ch, ins.cfg)));
      worst_sinr = std::max(
          worst_sinr, rel_err(direct, sinr_lifted_form(k, ins.bf, ins.star,
                                                       ins.ch, ins.cfg)));
    }
    const double pact = p_act(ins.bf, ins.star, ins.ch, ins.cfg);
    worst_pact = std::max(
        worst_pact,
        rel_err(pact, p_act_quadratic_form(ins.bf, ins.star, ins.ch, ins.cfg)));
    worst_pact = std::max(
        worst_pact,
        rel_err(pact, p_act_upsilon_form(ins.bf, ins.star, ins.ch, ins.cfg)));
    // diag identity on the instance vectors
    Rng rng(20000 + rep);
    const Eigen::VectorXcd a = testing::random_vector(8, rng);
    const Eigen::VectorXcd b = testing::random_vector(8, rng);
    const double lhs = (b.adjoint() * diag_only(a * a.adjoint()) * b).value().real();
    const double rhs = (a.adjoint() * diag_only(b * b.adjoint()) * a).value().real();
    worst_diag = std::max(worst_diag, std::abs(lhs - rhs) /
                                          std::max(1.0, std::abs(lhs)));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "worst relative: sinr %.2e  p_act %.2e  diag %.2e", worst_sinr,
                worst_pact, worst_diag);
  c.notes.push_back(buf);
  c.require(worst_sinr <= 1e-10, "SINR forms disagree beyond 1e-10");
  c.require(worst_pact <= 1e-10, "P_act forms disagree beyond 1e-10");
  c.require(worst_diag <= 1e-12, "diag identity violated beyond 1e-12");
  c.finish();
}

// ---------------------------------------------------------------- 2
void criterion_2() {
  Criterion c{"2", "Monte-Carlo oracle matches the closed-form SINR"};
  int misses = 0;
  double worst_pull = 0, worst_noise_rel = 0;
  for (int rep = 0; rep < 20; ++rep) {
    Instance ins = random_instance(4, 8, 4, 0.02, 30000 + rep);
    const int k = rep % 4;
    const double closed = sinr(k, ins.bf, ins.star, ins.ch, ins.cfg);
    const MonteCarloEstimate est = monte_carlo_sinr(
        k, ins.bf, ins.star, ins.ch, ins.cfg, 1000000, 40000 + rep);
    const double pull = std::abs(est.sinr - closed) / est.std_error;
    worst_pull = std::max(worst_pull, pull);
    if (pull > 3.0) ++misses;
    // the empirical interference-plus-noise power tracks the closed form
    const double inp =
        interference_noise_power(k, ins.bf, ins.star, ins.ch, ins.cfg);
    worst_noise_rel = std::max(worst_noise_rel, rel_err(est.noise_power, inp));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "worst |closed - empirical| = %.2f sigma, worst noise-power "
                "mismatch %.2e",
                worst_pull, worst_noise_rel);
  c.notes.push_back(buf);
  c.require(misses == 0, "an instance fell outside 3 standard errors");
  c.require(worst_noise_rel <= 0.01,
            "empirical noise power off the closed form by more than 1%");
  c.finish();
}

// ---------------------------------------------------------------- 3
void criterion_3() {
  Criterion c{"3", "quadratic-transform objective equals RE at alpha*"};
  double worst = 0;
  for (int rep = 0; rep < 50; ++rep) {
    Instance ins = random_instance(4, 8, 4, 0.02, 50000 + rep);
    const MetricsReport met =
        efficiency_metrics(ins.bf, ins.star, ins.ch, ins.cfg);
    const double alpha = update_alpha(met.se, met.p_tot);
    const double obj = quadratic_transform_objective(alpha, ins.bf, ins.star,
                                                     ins.ch, ins.cfg);
    worst = std::max(worst, rel_err(obj, met.re));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "worst relative mismatch %.2e", worst);
  c.notes.push_back(buf);
  c.require(worst <= 1e-12, "identity violated beyond 1e-12");
  c.finish();
}

// ---------------------------------------------------------------- 4
void criterion_4() {
  Criterion c{"4", "surrogate bounds: rate lower bound and numerator tangent"};
  Rng rng(60001);
  double worst_anchor = 0, worst_pi_anchor = 0;
  int lb_violations = 0, pi_violations = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const double x0 = std::exp(rng.uniform(-2.0, 10.0));
    const double y0 = std::exp(rng.uniform(-12.0, 2.0));
    const RateLowerBound lb = rate_lower_bound(x0, y0);
    worst_anchor = std::max(
        worst_anchor,
        std::abs(lb.value(x0, y0) - std::log2(1.0 + 1.0 / (x0 * y0))));
    for (int s = 0; s < 100; ++s) {
      const double x = x0 * std::exp(rng.uniform(-1.0, 1.0));
      const double y = y0 * std::exp(rng.uniform(-1.0, 1.0));
      if (lb.value(x, y) > std::log2(1.0 + 1.0 / (x * y)) + 1e-10)
        ++lb_violations;
    }
  }
  for (int rep = 0; rep < 100; ++rep) {
    Instance ins = random_instance(4, 8, 4, 0.02, 70000 + rep);
    const int k = rep % 4;
    const Eigen::VectorXcd hk = cascaded_channel(
        ins.ch.h[k], ins.star.side(ins.cfg.user_sides[k]), ins.ch.g);
    const Eigen::VectorXcd w0 = ins.bf.w.col(k);
    const double num0 = std::norm(hk.dot(w0));
    const Eigen::VectorXcd g = hk * hk.dot(w0);
    worst_pi_anchor = std::max(
        worst_pi_anchor,
        std::abs((2.0 * g.dot(w0).real() - num0) - num0) / num0);
    for (int s = 0; s < 100; ++s) {
      const Eigen::VectorXcd w =
          w0 + 0.5 * w0.norm() * testing::random_vector(4, rng);
      const double pi = 2.0 * g.dot(w).real() - num0;
      const double truth = std::norm(hk.dot(w));
      if (pi > truth + 1e-10 * std::max(1.0, truth)) ++pi_violations;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "anchor gaps: rate %.2e, numerator %.2e; violations %d / %d",
                worst_anchor, worst_pi_anchor, lb_violations, pi_violations);
  c.notes.push_back(buf);
  c.require(worst_anchor <= 1e-10, "rate bound not tight at the anchor");
  c.require(worst_pi_anchor <= 1e-10, "tangent not tight at the anchor");
  c.require(lb_violations == 0, "rate lower bound exceeded the true rate");
  c.require(pi_violations == 0, "tangent exceeded the true numerator");
  c.finish();
}

// ---------------------------------------------------------------- 5 and 9
void criterion_5_9() {
  Criterion c5{"5", "ascent and convergence on the default scenario"};
  Criterion c9{"9", "rank-one recovery quality against the relaxation"};
  const ScenarioConfig base = default_config();
  const int n_seeds = 10;

  struct SeedOutcome {
    bool ok = false;
    bool converged = false;
    int outers = 0;
    double ascent_violation = 0;
    double final_ratio = 0;
    double min_slack = 0;
    double relax_bound_violation = 0;
    double wall = 0;
  };
  std::vector<SeedOutcome> outs(n_seeds);
  parallel_for(n_seeds, 0, [&](int s) {
    ScenarioConfig cfg = base;
    cfg.refresh_omega();
    const std::uint64_t seed = derive_seed(991, s);
    const ChannelSet ch = generate_channels(cfg.geometry, cfg.system, seed);
    SolverOptions opts = cfg.solver;
    opts.seed = seed;
    const SolveTrace tr = ao_solve(ch, cfg.system, opts);
    SeedOutcome& o = outs[s];
    o.ok = tr.ok();
    if (!o.ok) return;
    o.converged = tr.converged;
    o.outers = tr.outer_iterations;
    o.wall = tr.wall_seconds;
    for (const OuterRecord& rec : tr.outers)
      for (std::size_t i = 1; i < rec.inner_objectives.size(); ++i)
        o.ascent_violation =
            std::max(o.ascent_violation, rec.inner_objectives[i - 1] -
                                             rec.inner_objectives[i]);
    if (!tr.relaxed_sdp_values.empty()) {
      o.final_ratio = tr.recovered_surrogate_values.back() /
                      tr.relaxed_sdp_values.back();
      for (std::size_t i = 0; i < tr.relaxed_sdp_values.size(); ++i)
        o.relax_bound_violation =
            std::max(o.relax_bound_violation,
                     tr.recovered_surrogate_values[i] -
                         tr.relaxed_sdp_values[i]);
    }
    o.min_slack = tr.final_feasibility.min_slack();
  });

  int converged = 0, failed = 0;
  double worst_ascent = 0, worst_wall = 0;
  double worst_ratio = 2.0, worst_slack = 1.0, worst_bound = 0;
  for (const SeedOutcome& o : outs) {
    if (!o.ok) {
      ++failed;
      continue;
    }
    if (o.converged && o.outers <= 30) ++converged;
    worst_ascent = std::max(worst_ascent, o.ascent_violation);
    worst_wall = std::max(worst_wall, o.wall);
    worst_ratio = std::min(worst_ratio, o.final_ratio);
    worst_slack = std::min(worst_slack, o.min_slack);
    worst_bound = std::max(worst_bound, o.relax_bound_violation);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "converged %d/10 (failed %d), worst ascent dip %.2e, worst "
                "wall %.0f s",
                converged, failed, worst_ascent, worst_wall);
  c5.notes.push_back(buf);
  c5.require(worst_ascent <= 1e-6, "inner objective decreased beyond 1e-6");
  c5.require(converged >= 9, "alpha failed to converge on 9/10 seeds");
  c5.require(worst_wall <= 600.0, "a seed exceeded the 10 min budget");
  c5.finish();

  std::snprintf(buf, sizeof buf,
                "worst final recovered/relaxed %.4f, worst slack %.2e, worst "
                "bound violation %.2e",
                worst_ratio, worst_slack, worst_bound);
  c9.notes.push_back(buf);
  c9.require(failed == 0, "a seed failed to solve");
  c9.require(worst_ratio >= 0.9,
             "final recovery below 90% of the relaxed objective");
  c9.require(worst_slack >= -1e-6, "a recovered iterate violates a constraint");
  c9.require(worst_bound <= 1e-6,
             "a recovered value exceeded the relaxation bound");
  c9.finish();
}

// ---------------------------------------------------------------- 6
void criterion_6() {
  Criterion c{"6", "tiny-scale equivalence with an exhaustive grid search"};
  SystemConfig cfg;
  cfg.n_antennas = 1;
  cfg.n_elements = 1;
  cfg.n_users = 1;
  cfg.user_sides = {Side::transmission};
  cfg.kappa_b = cfg.kappa_u = 0.0;
  cfg.r_min = 0.0;
  GeometryConfig geom;
  const ChannelSet ch = generate_channels(geom, cfg, 321);
  SolverOptions opts;
  opts.seed = 5;
  const SolveTrace tr = ao_solve(ch, cfg, opts);
  c.require(tr.ok(), "solve failed: " + tr.failure);

  double best = 0;
  const int grid = 200;
  for (int ip = 1; ip <= grid; ++ip)
    for (int ib = 1; ib <= grid; ++ib) {
      Beamformers bf = Beamformers::zero(1, 1);
      bf.w(0, 0) = std::sqrt(cfg.p_bs_max * ip / grid);
      StarCoefficients star = StarCoefficients::zero(1);
      star.u_t(0) = std::sqrt(cfg.rho_max * ib / grid);
      star.u_r(0) = star.u_t(0);
      if (p_act(bf, star, ch, cfg) > cfg.p_ris_max) continue;
      best = std::max(best, efficiency_metrics(bf, star, ch, cfg).re);
    }
  char buf[96];
  std::snprintf(buf, sizeof buf, "solver RE %.6f vs grid best %.6f (%.2e rel)",
                tr.ok() ? tr.metrics.re : 0.0, best,
                tr.ok() ? rel_err(tr.metrics.re, best) : 1.0);
  c.notes.push_back(buf);
  if (tr.ok()) c.require(rel_err(tr.metrics.re, best) <= 1e-3,
                         "solution off the brute-force optimum");
  c.finish();
}

// ---------------------------------------------------------------- 7
void criterion_7() {
  Criterion c{"7", "trend reproduction over the surface-size grid"};
  ScenarioConfig cfg = default_config();
  cfg.experiment.kind = ExperimentSpec::Kind::re_vs_m;
  cfg.experiment.m_grid = {8, 16, 24, 32, 40};
  cfg.experiment.trials = 10;
  cfg.experiment.master_seed = 777;
  cfg.experiment.out_dir = "acceptance_out/re_vs_m";
  cfg.experiment.schemes = {Scheme::proposed,   Scheme::passive_star,
                            Scheme::zf,         Scheme::ideal_hw,
                            Scheme::csi_random, Scheme::csi_worst};
  const ReVsMResult res = run_re_vs_m(cfg);

  auto means = [&](Scheme s) {
    std::vector<double> m;
    for (int size : cfg.experiment.m_grid) m.push_back(res.at(s, size).mean());
    return m;
  };
  auto pooled_se = [&](Scheme s, int i, int j) {
    const auto& a = res.at(s, cfg.experiment.m_grid[i]);
    const auto& b = res.at(s, cfg.experiment.m_grid[j]);
    const double sa = a.stddev() / std::sqrt(double(a.re.size()));
    const double sb = b.stddev() / std::sqrt(double(b.re.size()));
    return std::sqrt(sa * sa + sb * sb);
  };

  // (a) active scheme: unimodal with interior argmax
  const std::vector<double> active = means(Scheme::proposed);
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < active.size(); ++i)
    if (active[i] > active[argmax]) argmax = i;
  {
    std::ostringstream ss;
    ss << "proposed means:";
    for (double v : active) ss << ' ' << v;
    c.notes.push_back(ss.str());
  }
  c.require(argmax != 0 && argmax + 1 != active.size(),
            "active argmax not interior");
  for (std::size_t i = 0; i + 1 < active.size(); ++i) {
    const double tol = pooled_se(Scheme::proposed, int(i), int(i + 1));
    if (i < argmax)
      c.require(active[i + 1] >= active[i] - tol,
                "active curve not rising before its peak");
    else
      c.require(active[i + 1] <= active[i] + tol,
                "active curve not falling after its peak");
  }

  // (b) passive scheme: non-decreasing within one pooled standard error
  const std::vector<double> passive = means(Scheme::passive_star);
  {
    std::ostringstream ss;
    ss << "passive  means:";
    for (double v : passive) ss << ' ' << v;
    c.notes.push_back(ss.str());
  }
  for (std::size_t i = 0; i + 1 < passive.size(); ++i)
    c.require(passive[i + 1] >=
                  passive[i] - pooled_se(Scheme::passive_star, int(i), int(i + 1)),
              "passive curve decreased beyond one pooled standard error");

  // (c) scheme ordering at every M in the mean
  for (int size : cfg.experiment.m_grid) {
    const double ideal = res.at(Scheme::ideal_hw, size).mean();
    const double prop = res.at(Scheme::proposed, size).mean();
    const double zf = res.at(Scheme::zf, size).mean();
    const double rnd = res.at(Scheme::csi_random, size).mean();
    const double worst = res.at(Scheme::csi_worst, size).mean();
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "M=%-3d ideal %.3f >= proposed %.3f >= zf %.3f ; proposed "
                  ">= random %.3f >= worst %.3f",
                  size, ideal, prop, zf, rnd, worst);
    c.notes.push_back(buf);
    c.require(ideal >= prop - 1e-9, "ideal below proposed");
    c.require(prop >= zf - 1e-9, "zero-forcing above proposed");
    c.require(prop >= rnd - 1e-9, "random-CSI above proposed");
    c.require(rnd >= worst - 1e-9, "worst-case CSI above random-CSI");
  }
  // per-seed pairing: the proposed scheme beats zero-forcing on most seeds
  {
    int wins = 0, comparable = 0;
    for (int size : cfg.experiment.m_grid) {
      const auto& a = res.at(Scheme::proposed, size).re_by_trial;
      const auto& b = res.at(Scheme::zf, size).re_by_trial;
      for (std::size_t t = 0; t < a.size() && t < b.size(); ++t) {
        if (std::isnan(a[t]) || std::isnan(b[t])) continue;
        ++comparable;
        if (a[t] >= b[t] - 1e-9) ++wins;
      }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "proposed >= zf on %d / %d paired trials",
                  wins, comparable);
    c.notes.push_back(buf);
    c.require(comparable > 0 && wins * 5 >= comparable * 4,
              "proposed lost to zero-forcing on more than 20% of seeds");
  }
  int failures = 0;
  for (const auto& cell : res.cells) failures += cell.trials_failed;
  if (failures > 0)
    c.notes.push_back("failed trials: " + std::to_string(failures));
  c.finish();
}

// ---------------------------------------------------------------- 8
void criterion_8() {
  Criterion c{"8", "SE-EE region growth with the transmit power budget"};
  ScenarioConfig cfg = default_config();
  cfg.experiment.kind = ExperimentSpec::Kind::se_ee_tradeoff;
  cfg.experiment.p_bs_max_dbm_grid = {20.0, 30.0};
  cfg.experiment.trials = 10;
  cfg.experiment.master_seed = 555;
  cfg.experiment.out_dir = "acceptance_out/se_ee";
  // six log-spaced weights around the nominal budget
  cfg.experiment.omega_grid.clear();
  const double pmax = cfg.system.p_max();
  for (double e : {-1.5, -0.9, -0.3, 0.3, 0.9, 1.5})
    cfg.experiment.omega_grid.push_back(pmax * std::pow(10.0, e));
  const SeEeResult res = run_se_ee_tradeoff(cfg);

  auto budget_stats = [&](double p_dbm) {
    double max_se = 0, max_ee = 0, min_se = 1e300;
    for (double w : cfg.experiment.omega_grid) {
      const SeEeCell& cell = res.at(p_dbm, w);
      max_se = std::max(max_se, cell.mean_se());
      max_ee = std::max(max_ee, cell.mean_ee());
      min_se = std::min(min_se, cell.mean_se());
    }
    return std::tuple{max_se, max_ee, min_se};
  };
  const auto [se20, ee20, min20] = budget_stats(20.0);
  const auto [se30, ee30, min30] = budget_stats(30.0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "20 dBm: max SE %.3f max EE %.4g spread %.2f%% | 30 dBm: max "
                "SE %.3f max EE %.4g",
                se20, ee20, 100.0 * (se20 - min20) / se20, se30, ee30);
  c.notes.push_back(buf);
  c.require(se30 >= se20, "higher budget lost peak SE");
  c.require(ee30 >= ee20, "higher budget lost peak EE");
  c.require((se20 - min20) / se20 <= 0.10,
            "low-budget SE spread above 10% across the weight sweep");
  int failures = 0;
  for (const auto& cell : res.cells) failures += cell.trials_failed;
  c.require(failures == 0,
            "failed trials: " + std::to_string(failures));
  c.finish();
}

// ---------------------------------------------------------------- 10
void criterion_10() {
  Criterion c{"10", "byte-identical outputs under identical config and seed"};
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  ScenarioConfig cfg = default_config();
  cfg.system.n_elements = 8;
  cfg.experiment.kind = ExperimentSpec::Kind::convergence;
  cfg.experiment.n_grid = {4};
  cfg.experiment.trials = 2;
  cfg.experiment.master_seed = 2024;
  cfg.refresh_omega();

  cfg.experiment.out_dir = "acceptance_out/det_a";
  run_convergence(cfg);
  cfg.experiment.out_dir = "acceptance_out/det_b";
  run_convergence(cfg);
  const std::string conv_a = slurp("acceptance_out/det_a/convergence.csv");
  const std::string conv_b = slurp("acceptance_out/det_b/convergence.csv");
  c.require(!conv_a.empty() && conv_a == conv_b,
            "convergence CSVs differ between identical runs");

  ScenarioConfig rcfg = default_config();
  rcfg.system.n_elements = 8;
  rcfg.experiment.kind = ExperimentSpec::Kind::re_vs_m;
  rcfg.experiment.m_grid = {8};
  rcfg.experiment.trials = 1;
  rcfg.experiment.master_seed = 11;
  rcfg.experiment.schemes = {Scheme::proposed, Scheme::zf};
  rcfg.experiment.out_dir = "acceptance_out/det_c";
  run_re_vs_m(rcfg);
  rcfg.experiment.out_dir = "acceptance_out/det_d";
  run_re_vs_m(rcfg);
  const std::string m_a = slurp("acceptance_out/det_c/re_vs_m.csv");
  const std::string m_b = slurp("acceptance_out/det_d/re_vs_m.csv");
  c.require(!m_a.empty() && m_a == m_b,
            "re_vs_m CSVs differ between identical runs");
  c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) wanted.emplace_back(argv[i]);
  if (wanted.empty()) wanted = {"all"};
  auto want = [&](const char* id) {
    for (const auto& w : wanted)
      if (w == id || w == "all") return true;
    return false;
  };
  if (want("1")) criterion_1();
  if (want("2")) criterion_2();
  if (want("3")) criterion_3();
  if (want("4")) criterion_4();
  if (want("5_9")) criterion_5_9();
  if (want("6")) criterion_6();
  if (want("7")) criterion_7();
  if (want("8")) criterion_8();
  if (want("10")) criterion_10();
  return g_failures == 0 ? 0 : 1;
}
