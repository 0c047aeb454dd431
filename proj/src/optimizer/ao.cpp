// SPDX-License-Identifier: Apache-2.0
#include "starris/optimizer/ao.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "starris/metrics.hpp"
#include "starris/rng.hpp"

namespace starris {

namespace {

double min_rate(const Beamformers& bf, const StarCoefficients& star,
                const ChannelSet& ch, const SystemConfig& cfg) {
  double r = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.n_users; ++k)
    r = std::min(r, rate(k, bf, star, ch, cfg));
  return r;
}

// Uniform renormalization when a returned beamformer overshoots a power
// budget by solver tolerance; larger violations are reported as errors.
// The slip allowance sits two orders above the backend tolerance: scaled
// 1e-8 residuals land at a few 1e-8 in raw watts.
bool enforce_power_safety(Beamformers& bf, const StarCoefficients& star,
                          const ChannelSet& ch, const SystemConfig& cfg,
                          std::string& error) {
  const double slip_tol = 1e-6;
  const double pb = p_bs(bf);
  if (pb > cfg.p_bs_max) {
    if (pb > cfg.p_bs_max + slip_tol * std::max(1.0, cfg.p_bs_max)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3e", pb - cfg.p_bs_max);
      error =
          std::string("transmit power violation beyond solver tolerance (") +
          buf + " W)";
      return false;
    }
    bf.w *= std::sqrt(cfg.p_bs_max / pb) * (1.0 - 1e-12);
  }
  if (cfg.ris_mode == RisMode::active) {
    const double pa = p_act(bf, star, ch, cfg);
    if (pa > cfg.p_ris_max) {
      if (pa > cfg.p_ris_max + slip_tol * std::max(1.0, cfg.p_ris_max)) {
        error = "amplification power violation beyond solver tolerance";
        return false;
      }
      // quadratic part scales with ||w||^2; the thermal floor does not
      const double thermal =
          p_act(Beamformers::zero(cfg.n_antennas, cfg.n_users), star, ch, cfg);
      const double quad = pa - thermal;
      if (quad > 0 && cfg.p_ris_max > thermal) {
        bf.w *= std::sqrt((cfg.p_ris_max - thermal) / quad) * (1.0 - 1e-12);
      } else {
        error = "amplification budget below the thermal floor";
        return false;
      }
    }
  }
  return true;
}

Eigen::MatrixXcd matched_filter_directions(const StarCoefficients& star,
                                           const ChannelSet& ch,
                                           const SystemConfig& cfg) {
  Eigen::MatrixXcd dirs(cfg.n_antennas, cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    const Eigen::VectorXcd hk =
        cascaded_channel(ch.h[k], star.side(cfg.user_sides[k]), ch.g);
    const double nrm = hk.norm();
    if (!(nrm > 0))
      throw std::runtime_error("initialize: zero cascaded channel");
    dirs.col(k) = hk / nrm;
  }
  return dirs;
}

}  // namespace

InitialPoint initialize(const ChannelSet& ch, const SystemConfig& cfg,
                        const SolverOptions& opts) {
  cfg.validate();
  ch.validate(cfg);
  const int m = cfg.n_elements;
  const bool active = cfg.ris_mode == RisMode::active;

  InitialPoint last;
  for (int attempt = 0; attempt < 10; ++attempt) {
    Rng rng(derive_seed(opts.seed, 1000 + attempt));
    StarCoefficients star;
    star.u_t.resize(m);
    star.u_r.resize(m);
    const double amp0 = active ? 1.0 : std::sqrt(0.5);
    for (int i = 0; i < m; ++i) {
      star.u_t[i] = std::polar(amp0, rng.uniform(0.0, 2.0 * M_PI));
      star.u_r[i] = std::polar(amp0, rng.uniform(0.0, 2.0 * M_PI));
    }
    Beamformers bf;
    bf.w = (opts.zf_precoding ? zf_directions(star, ch, cfg)
                              : matched_filter_directions(star, ch, cfg)) *
           std::sqrt(cfg.p_bs_max / cfg.n_users);
    if (active) {
      // uniform gain chosen so the amplification budget holds with margin
      const double pa = p_act(bf, star, ch, cfg);
      double gain0 = cfg.rho_max;
      if (pa > 0) gain0 = std::min(0.5 * cfg.p_ris_max / pa, cfg.rho_max);
      star.u_t *= std::sqrt(gain0);
      star.u_r *= std::sqrt(gain0);
    }
    const MetricsReport met = efficiency_metrics(bf, star, ch, cfg);
    last = {bf, star, update_alpha(met.se, met.p_tot), false};
    if (met.per_user_rate.minCoeff() >= cfg.r_min) return last;
  }

  // restoration: successively maximize the worst-case rate surrogate at the
  // surface drawn last
  Beamformers bf = last.bf;
  for (int round = 0; round < 5; ++round) {
    const SurrogateState state =
        SurrogateState::at_point(bf, last.star, ch, cfg, last.alpha);
    const DerivedOperators ops = derive_operators(ch, last.star, bf, cfg);
    TransmitSubproblem sub =
        build_rate_restoration_subproblem(state, ops, last.star, ch, cfg);
    const conic::Solution sol = sub.prog.solve({opts.conic_tol, 200, 0});
    if (sol.status != conic::SolveStatus::optimal &&
        sol.status != conic::SolveStatus::iteration_limit)
      break;
    Beamformers cand = sub.extract(sol);
    std::string err;
    if (!enforce_power_safety(cand, last.star, ch, cfg, err)) break;
    bf = cand;
    if (min_rate(bf, last.star, ch, cfg) >= cfg.r_min) {
      const MetricsReport met = efficiency_metrics(bf, last.star, ch, cfg);
      return {bf, last.star, update_alpha(met.se, met.p_tot), true};
    }
  }
  throw std::runtime_error(
      "initialize: no feasible starting point after restoration");
}

SolveTrace ao_solve(const ChannelSet& ch, const SystemConfig& cfg,
                    const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveTrace tr;
  auto stamp = [&] {
    tr.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  };

  Beamformers bf;
  StarCoefficients star;
  double alpha = 0;
  try {
    const InitialPoint init = initialize(ch, cfg, opts);
    bf = init.bf;
    star = init.star;
    alpha = init.alpha;
  } catch (const std::exception& e) {
    tr.failure = e.what();
    stamp();
    return tr;
  }

  const conic::SolveOptions copts{opts.conic_tol, 200,
                                  opts.verbosity >= 3 ? 1 : 0};
  auto objective = [&](const Beamformers& b, const StarCoefficients& s) {
    return quadratic_transform_objective(alpha, b, s, ch, cfg);
  };
  auto solved = [](conic::SolveStatus st) {
    return st == conic::SolveStatus::optimal ||
           st == conic::SolveStatus::iteration_limit;
  };

  bool converged = false;
  for (int outer = 0; outer < opts.max_outer && !converged; ++outer) {
    OuterRecord rec;
    rec.alpha = alpha;
    double obj = objective(bf, star);
    bool aborted = false;
    auto abort_with = [&](const std::string& why) {
      tr.failure = why;
      aborted = true;
    };

    // transmit step: full beamformer surrogate, or power allocation over
    // zero-forcing directions for the ZF baseline
    auto transmit_step = [&] {
      if (!opts.zf_precoding) {
        const SurrogateState state =
            SurrogateState::at_point(bf, star, ch, cfg, alpha);
        const DerivedOperators ops = derive_operators(ch, star, bf, cfg);
        TransmitSubproblem sub =
            build_transmit_subproblem(state, ops, star, ch, cfg);
        const conic::Solution sol = sub.prog.solve(copts);
        rec.statuses.push_back(std::string("tx:") + to_string(sol.status));
        if (sol.status == conic::SolveStatus::infeasible)
          return abort_with(
              "transmit surrogate infeasible at the current anchor");
        if (!solved(sol.status))
          return abort_with(std::string("transmit subproblem: ") +
                            to_string(sol.status));
        Beamformers cand = sub.extract(sol);
        std::string err;
        if (!enforce_power_safety(cand, star, ch, cfg, err))
          return abort_with(err);
        const double obj_new = objective(cand, star);
        if (obj_new > obj) {
          bf = cand;
          obj = obj_new;
        }
        return;
      }
      Eigen::MatrixXcd dirs;
      try {
        dirs = zf_directions(star, ch, cfg);
      } catch (const std::exception& e) {
        return abort_with(e.what());
      }
      // project the iterate onto the new directions at unchanged powers
      Beamformers proj;
      proj.w = dirs;
      for (int k = 0; k < cfg.n_users; ++k)
        proj.w.col(k) *= bf.w.col(k).norm();
      std::string perr;
      if (!enforce_power_safety(proj, star, ch, cfg, perr))
        return abort_with(perr);
      const SurrogateState state =
          SurrogateState::at_point(proj, star, ch, cfg, alpha);
      const DerivedOperators ops = derive_operators(ch, star, proj, cfg);
      ZfPowerSubproblem sub =
          build_zf_power_subproblem(state, ops, dirs, star, ch, cfg);
      const conic::Solution sol = sub.prog.solve(copts);
      rec.statuses.push_back(std::string("zf:") + to_string(sol.status));
      if (sol.status == conic::SolveStatus::infeasible)
        return abort_with("power-allocation surrogate infeasible");
      if (!solved(sol.status))
        return abort_with(std::string("power subproblem: ") +
                          to_string(sol.status));
      Beamformers cand = sub.extract(sol);
      std::string err;
      if (!enforce_power_safety(cand, star, ch, cfg, err))
        return abort_with(err);
      const double obj_new = objective(cand, star);
      if (obj_new > obj) {
        bf = cand;
        obj = obj_new;
      }
    };

    auto surface_step = [&](int inner) {
      if (opts.freeze_ris) return;
      const SurrogateState state =
          SurrogateState::at_point(bf, star, ch, cfg, alpha);
      const DerivedOperators ops = derive_operators(ch, star, bf, cfg);
      RisSubproblem sub = build_ris_subproblem(state, ops, bf, ch, cfg);
      const conic::Solution sol = sub.prog.solve(copts);
      rec.statuses.push_back(std::string("ris:") + to_string(sol.status));
      if (sol.status == conic::SolveStatus::infeasible)
        return abort_with(
            "surface surrogate infeasible at the current anchor");
      if (!solved(sol.status))
        return abort_with(std::string("surface subproblem: ") +
                          to_string(sol.status));
      tr.relaxed_sdp_values.push_back(sol.objective);
      const LiftedStarMatrices lifted = sub.extract(sol);
      const RecoveryResult rec_res = recover_rank_one(
          lifted, bf, ch, cfg, alpha, opts.n_randomizations,
          derive_seed(opts.seed, 7000 + 100 * outer + inner));
      if (rec_res.feasible && rec_res.objective > obj) {
        star = rec_res.star;
        obj = rec_res.objective;
      }
      // rank-one point the algorithm continues with, on the scale of the
      // relaxed objective
      tr.recovered_surrogate_values.push_back(
          surrogate_objective_at(state, star, bf, ch, cfg));
    };

    for (int inner = 0; inner < opts.max_inner && !aborted; ++inner) {
      const double obj_cycle = obj;
      // the ZF baseline updates the surface first so the returned
      // beamformers null the final cascaded channels exactly
      if (opts.zf_precoding) {
        surface_step(inner);
        rec.inner_objectives.push_back(obj);
        if (!aborted) transmit_step();
      } else {
        transmit_step();
        rec.inner_objectives.push_back(obj);
        if (!aborted) surface_step(inner);
      }
      if (aborted) break;
      rec.inner_objectives.push_back(obj);

      if (opts.verbosity >= 2)
        std::printf("  outer %d inner %d objective %.8f\n", outer, inner, obj);
      if (std::abs(obj - obj_cycle) <=
          cfg.inner_tol * std::max(1.0, std::abs(obj_cycle)))
        break;
    }
    if (aborted) {
      tr.outers.push_back(rec);
      stamp();
      return tr;
    }

    const MetricsReport met = efficiency_metrics(bf, star, ch, cfg);
    rec.re = met.re;
    tr.outers.push_back(rec);
    tr.outer_iterations = outer + 1;
    const double alpha_new = update_alpha(met.se, met.p_tot);
    if (opts.verbosity >= 1)
      std::printf("outer %d alpha %.8f -> %.8f re %.6f\n", outer, alpha,
                  alpha_new, met.re);
    converged = std::abs(alpha_new - alpha) <= cfg.epsilon;
    alpha = alpha_new;
  }

  tr.converged = converged;
  tr.bf = bf;
  tr.star = star;
  tr.metrics = efficiency_metrics(bf, star, ch, cfg);
  tr.final_feasibility = check_feasibility(bf, star, ch, cfg);
  stamp();
  return tr;
}

}  // namespace starris
