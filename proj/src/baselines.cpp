// SPDX-License-Identifier: Apache-2.0
#include "starris/baselines.hpp"

#include <stdexcept>

#include "starris/metrics.hpp"
#include "starris/rng.hpp"

namespace starris {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::passive_star: return "passive_star";
    case Scheme::zf: return "zf";
    case Scheme::ideal_hw: return "ideal_hw";
    case Scheme::csi_random: return "csi_random";
    case Scheme::csi_worst: return "csi_worst";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  for (Scheme s : {Scheme::proposed, Scheme::passive_star, Scheme::zf,
                   Scheme::ideal_hw, Scheme::csi_random, Scheme::csi_worst})
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown scheme: " + name);
}

void SchemeSpec::validate() const {
  if (rho_c_max < 0)
    throw std::invalid_argument("SchemeSpec.rho_c_max: must be >= 0");
  if (kappa_override >= 1.0)
    throw std::invalid_argument("SchemeSpec.kappa_override: must be < 1");
  if (freeze_ris && scheme != Scheme::zf)
    throw std::invalid_argument(
        "SchemeSpec.freeze_ris: only meaningful for the zf scheme");
}

namespace {

SchemeResult evaluate_on(const ChannelSet& eval_ch, const SystemConfig& cfg,
                         SolveTrace trace) {
  SchemeResult res;
  res.trace = std::move(trace);
  if (res.trace.ok()) {
    res.metrics =
        efficiency_metrics(res.trace.bf, res.trace.star, eval_ch, cfg);
    res.audit = check_feasibility(res.trace.bf, res.trace.star, eval_ch, cfg);
  }
  return res;
}

}  // namespace

SolveTrace run_passive_star(const ChannelSet& ch, const SystemConfig& cfg,
                            const SolverOptions& opts) {
  SystemConfig passive = cfg;
  passive.ris_mode = RisMode::passive;
  passive.sigma_a2 = 0.0;  // passive elements inject no amplifier noise
  return ao_solve(ch, passive, opts);
}

SolveTrace run_zf(const ChannelSet& ch, const SystemConfig& cfg,
                  const SolverOptions& opts) {
  SolverOptions zf_opts = opts;
  zf_opts.zf_precoding = true;
  return ao_solve(ch, cfg, zf_opts);
}

SolveTrace run_ideal_hw(const ChannelSet& ch, const SystemConfig& cfg,
                        const SolverOptions& opts) {
  SystemConfig ideal = cfg;
  ideal.kappa_b = 0.0;
  ideal.kappa_u = 0.0;
  return ao_solve(ch, ideal, opts);
}

SchemeResult run_csi_error(const ChannelSet& ch, const SystemConfig& cfg,
                           CsiErrorMode mode, const SolverOptions& opts) {
  return run_scheme(
      {mode == CsiErrorMode::random ? Scheme::csi_random : Scheme::csi_worst,
       -1.0, 1e-2, false},
      ch, cfg, opts);
}

SchemeResult run_scheme(const SchemeSpec& spec, const ChannelSet& ch,
                        const SystemConfig& cfg, const SolverOptions& opts) {
  spec.validate();
  SystemConfig run_cfg = cfg;
  if (spec.kappa_override >= 0.0) {
    run_cfg.kappa_b = spec.kappa_override;
    run_cfg.kappa_u = spec.kappa_override;
  }
  switch (spec.scheme) {
    case Scheme::proposed:
      return evaluate_on(ch, run_cfg, ao_solve(ch, run_cfg, opts));
    case Scheme::passive_star: {
      SystemConfig passive = run_cfg;
      passive.ris_mode = RisMode::passive;
      passive.sigma_a2 = 0.0;
      return evaluate_on(ch, passive, ao_solve(ch, passive, opts));
    }
    case Scheme::zf: {
      SolverOptions zf_opts = opts;
      zf_opts.zf_precoding = true;
      zf_opts.freeze_ris = spec.freeze_ris;
      return evaluate_on(ch, run_cfg, ao_solve(ch, run_cfg, zf_opts));
    }
    case Scheme::ideal_hw: {
      SystemConfig ideal = run_cfg;
      ideal.kappa_b = 0.0;
      ideal.kappa_u = 0.0;
      return evaluate_on(ch, ideal, ao_solve(ch, ideal, opts));
    }
    case Scheme::csi_random:
    case Scheme::csi_worst: {
      // optimize on perturbed channels, evaluate on the true ones
      const CsiErrorMode mode = spec.scheme == Scheme::csi_random
                                    ? CsiErrorMode::random
                                    : CsiErrorMode::worst_case;
      const ChannelSet perturbed = apply_csi_error(
          ch, mode, spec.rho_c_max, derive_seed(opts.seed, 0xC51));
      return evaluate_on(ch, run_cfg, ao_solve(perturbed, run_cfg, opts));
    }
  }
  throw std::logic_error("run_scheme: unreachable");
}

}  // namespace starris
