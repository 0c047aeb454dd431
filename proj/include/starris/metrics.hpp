// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starris/types.hpp"

namespace starris {

// Zeroes the off-diagonal entries and keeps the diagonal.
template <typename Derived>
Eigen::MatrixXcd diag_only(const Eigen::MatrixBase<Derived>& a) {
  return a.derived().diagonal().asDiagonal();
}

// Cascaded BS->RIS->user channel H_k, defined through
// H_k^H = h_k^H diag(u_s^H) G, returned as the column vector H_k.
Eigen::VectorXcd cascaded_channel(const Eigen::VectorXcd& h_k,
                                  const Eigen::VectorXcd& u_side,
                                  const Eigen::MatrixXcd& g);

// E{n~_k n~_k^*}: inter-user interference, transceiver distortion,
// amplified thermal noise and AWGN seen by user k.
double interference_noise_power(int k, const Beamformers& bf,
                                const StarCoefficients& star,
                                const ChannelSet& ch, const SystemConfig& cfg);

// |H_k^H w_k|^2 / interference_noise_power(k).
double sinr(int k, const Beamformers& bf, const StarCoefficients& star,
            const ChannelSet& ch, const SystemConfig& cfg);

// log2(1 + SINR_k)
double rate(int k, const Beamformers& bf, const StarCoefficients& star,
            const ChannelSet& ch, const SystemConfig& cfg);

// sum rate over users, bit/s/Hz
double system_se(const Beamformers& bf, const StarCoefficients& star,
                 const ChannelSet& ch, const SystemConfig& cfg);

// BS transmit power sum_k ||w_k||^2
double p_bs(const Beamformers& bf);

// Active-surface amplification power, in closed form with the transmit
// signal and BS distortion averaged out:
//   sum_s ||Theta_s G sum_k w_k||-type signal term
// + sum_s kappa_b tr(Theta_s G (sum_k diag~(w_k w_k^H)) G^H Theta_s^H)
// + sum_s sigma_A^2 ||Theta_s||_F^2.
// Identically 0 in passive mode.
double p_act(const Beamformers& bf, const StarCoefficients& star,
             const ChannelSet& ch, const SystemConfig& cfg);

// (p_bs + p_act)/xi + M p_r + p_c
double p_tot(const Beamformers& bf, const StarCoefficients& star,
             const ChannelSet& ch, const SystemConfig& cfg);

// Fills the full report: per-user SINR/rate, SE, powers, EE = B*SE/P_tot and
// RE = SE/P_tot + omega*SE/P_max.
MetricsReport efficiency_metrics(const Beamformers& bf,
                                 const StarCoefficients& star,
                                 const ChannelSet& ch,
                                 const SystemConfig& cfg);

// Signed slack of every design constraint at the given operating point.
// Infeasibility is reported, never thrown.
FeasibilityReport check_feasibility(const Beamformers& bf,
                                    const StarCoefficients& star,
                                    const ChannelSet& ch,
                                    const SystemConfig& cfg);

// Objective of the quadratic-transform reformulation at a fixed alpha:
//   2 alpha sqrt(SE) - alpha^2 P_tot + omega SE / P_max.
double quadratic_transform_objective(double alpha, const Beamformers& bf,
                                     const StarCoefficients& star,
                                     const ChannelSet& ch,
                                     const SystemConfig& cfg);

}  // namespace starris
