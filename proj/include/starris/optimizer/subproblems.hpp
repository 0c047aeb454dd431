// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "starris/conic/program.hpp"
#include "starris/optimizer/operators.hpp"
#include "starris/optimizer/surrogate.hpp"
#include "starris/types.hpp"

namespace starris {

// Lifted surface matrices U_s = u_s u_s^H with the rank-one constraint
// relaxed; recovered to StarCoefficients by rank-one extraction.
struct LiftedStarMatrices {
  Eigen::MatrixXcd u_t;
  Eigen::MatrixXcd u_r;
};

// Shared handle bundle. X_k and Y_k enter the programs anchor-normalized
// (x_hat = X/X_anchor), which keeps every cone member O(1) regardless of
// the physical channel scale.
struct TransmitSubproblem {
  conic::ConicProgram prog;
  std::vector<std::vector<conic::VarId>> w_re;  // [user][antenna]
  std::vector<std::vector<conic::VarId>> w_im;
  std::vector<conic::VarId> x_hat, y_hat;
  conic::VarId y_se, t_hyp, p_quad;
  double p_const = 0;  // constant part of P_tot at fixed surface
  Eigen::VectorXd x_anchor, y_anchor;

  Beamformers extract(const conic::Solution& sol) const;
};

TransmitSubproblem build_transmit_subproblem(const SurrogateState& state,
                                             const DerivedOperators& ops,
                                             const StarCoefficients& star,
                                             const ChannelSet& ch,
                                             const SystemConfig& cfg);

// Same skeleton with the objective replaced by max-min rate slack; used for
// feasibility restoration when no random initialization meets R_min.
TransmitSubproblem build_rate_restoration_subproblem(
    const SurrogateState& state, const DerivedOperators& ops,
    const StarCoefficients& star, const ChannelSet& ch,
    const SystemConfig& cfg);

struct RisSubproblem {
  conic::ConicProgram prog;
  conic::PsdVar u_emb_t, u_emb_r;  // real embeddings, 2M x 2M
  std::vector<conic::VarId> x_hat, y_hat;
  conic::VarId y_se, t_hyp;
  double p_const = 0;  // constant part of P_tot at fixed beamformers
  Eigen::VectorXd x_anchor, y_anchor;

  LiftedStarMatrices extract(const conic::Solution& sol) const;
};

RisSubproblem build_ris_subproblem(const SurrogateState& state,
                                   const DerivedOperators& ops,
                                   const Beamformers& bf, const ChannelSet& ch,
                                   const SystemConfig& cfg);

// Power allocation over fixed (zero-forcing) beam directions: the transmit
// step of the ZF baseline.
struct ZfPowerSubproblem {
  conic::ConicProgram prog;
  std::vector<conic::VarId> power;  // per-user transmit power
  std::vector<conic::VarId> x_hat, y_hat;
  conic::VarId y_se, t_hyp;
  Eigen::MatrixXcd directions;  // unit-norm columns
  Eigen::VectorXd x_anchor, y_anchor;

  Beamformers extract(const conic::Solution& sol) const;
};

ZfPowerSubproblem build_zf_power_subproblem(const SurrogateState& state,
                                            const DerivedOperators& ops,
                                            const Eigen::MatrixXcd& directions,
                                            const StarCoefficients& star,
                                            const ChannelSet& ch,
                                            const SystemConfig& cfg);

// Zero-forcing directions for the current cascaded channels: normalized
// columns of H (H^H H)^{-1}. Throws on rank deficiency.
Eigen::MatrixXcd zf_directions(const StarCoefficients& star,
                               const ChannelSet& ch, const SystemConfig& cfg);

// Surrogate objective value at an explicit surface configuration, using the
// given expansion anchors: the comparable scale for the relaxed-vs-recovered
// quality measure.
double surrogate_objective_at(const SurrogateState& state,
                              const StarCoefficients& star,
                              const Beamformers& bf, const ChannelSet& ch,
                              const SystemConfig& cfg);

}  // namespace starris
