// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "starris/optimizer/recovery.hpp"
#include "starris/optimizer/subproblems.hpp"
#include "starris/types.hpp"

namespace starris {

// alpha* = sqrt(SE) / P_tot, the closed-form maximizer of the
// quadratic-transform objective over alpha.
inline double update_alpha(double se, double p_tot_w) {
  if (!(p_tot_w > 0))
    throw std::invalid_argument("update_alpha: P_tot must be > 0");
  if (se < 0) throw std::invalid_argument("update_alpha: SE must be >= 0");
  return std::sqrt(se) / p_tot_w;
}

struct SolverOptions {
  int max_outer = 30;
  int max_inner = 20;
  int n_randomizations = 50;
  double conic_tol = 1e-8;
  std::uint64_t seed = 1;
  bool zf_precoding = false;  // fix beam directions to zero-forcing
  bool freeze_ris = false;    // skip the surface subproblem entirely
  int verbosity = 0;
};

struct OuterRecord {
  double alpha = 0;
  std::vector<double> inner_objectives;  // true objective after each step
  std::vector<std::string> statuses;
  double re = 0;  // resource efficiency at the end of the outer iteration
};

struct SolveTrace {
  std::vector<OuterRecord> outers;
  Beamformers bf;
  StarCoefficients star;
  MetricsReport metrics;
  FeasibilityReport final_feasibility;
  bool converged = false;
  int outer_iterations = 0;
  double wall_seconds = 0;
  std::string failure;  // nonempty when the solve aborted

  // relaxation quality bookkeeping, one entry per surface step
  std::vector<double> relaxed_sdp_values;
  std::vector<double> recovered_surrogate_values;

  bool ok() const { return failure.empty(); }
};

struct InitialPoint {
  Beamformers bf;
  StarCoefficients star;
  double alpha = 0;
  bool restored = false;  // feasibility restoration was needed
};

// Random-phase surface with a margin on the amplification budget,
// matched-filter (or zero-forcing) beams at equal power, reseeded until
// R_min holds; one surrogate feasibility-restoration attempt afterwards.
// Throws std::runtime_error when even restoration fails.
InitialPoint initialize(const ChannelSet& ch, const SystemConfig& cfg,
                        const SolverOptions& opts);

// Algorithm: outer quadratic-transform alpha updates around an inner
// alternating loop of the transmit and surface subproblems with rank-one
// recovery. Failures are reported in the trace, never thrown.
SolveTrace ao_solve(const ChannelSet& ch, const SystemConfig& cfg,
                    const SolverOptions& opts);

}  // namespace starris
