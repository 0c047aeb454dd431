// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "starris/optimizer/subproblems.hpp"
#include "starris/types.hpp"

namespace starris {

struct RecoveryResult {
  StarCoefficients star;
  bool feasible = false;        // meets budget/gain/rate floors exactly
  int candidate_index = -1;     // 0 = principal eigenvector
  double objective = 0;         // quadratic-transform objective at alpha
  Eigen::VectorXd rate_slack;   // R_min audit of the returned point
};

// Rank-one extraction from the relaxed lifted solution: principal
// eigenvector plus Gaussian randomizations drawn with covariance U_s,
// per-element amplitude clipping to the feasible set, candidate selection by
// the true objective; uniform down-scaling fallback when no candidate meets
// the amplification budget.
RecoveryResult recover_rank_one(const LiftedStarMatrices& lifted,
                                const Beamformers& bf, const ChannelSet& ch,
                                const SystemConfig& cfg, double alpha,
                                int n_randomizations, std::uint64_t seed);

}  // namespace starris
