// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "starris/channel.hpp"
#include "starris/optimizer/ao.hpp"

namespace starris {

enum class Scheme {
  proposed,
  passive_star,
  zf,
  ideal_hw,
  csi_random,
  csi_worst,
};

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct SchemeSpec {
  Scheme scheme = Scheme::proposed;
  double kappa_override = -1.0;  // < 0 keeps the configured value
  double rho_c_max = 1e-2;       // CSI-error schemes
  bool freeze_ris = false;       // ZF baseline switch: skip surface updates

  void validate() const;
};

// Every scheme is audited on the channels used for evaluation; for the
// CSI-error schemes those are the true channels, not the perturbed copies
// the optimizer saw.
struct SchemeResult {
  SolveTrace trace;
  MetricsReport metrics;      // on the evaluation channels
  FeasibilityReport audit;    // on the evaluation channels
  bool ok() const { return trace.ok(); }
};

SchemeResult run_scheme(const SchemeSpec& spec, const ChannelSet& ch,
                        const SystemConfig& cfg, const SolverOptions& opts);

// Named wrappers for the comparison schemes
SolveTrace run_passive_star(const ChannelSet& ch, const SystemConfig& cfg,
                            const SolverOptions& opts);
SolveTrace run_zf(const ChannelSet& ch, const SystemConfig& cfg,
                  const SolverOptions& opts);
SolveTrace run_ideal_hw(const ChannelSet& ch, const SystemConfig& cfg,
                        const SolverOptions& opts);
SchemeResult run_csi_error(const ChannelSet& ch, const SystemConfig& cfg,
                           CsiErrorMode mode, const SolverOptions& opts);

}  // namespace starris
