// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starris/types.hpp"

namespace starris {

// Fixed-point operators entering the two subproblem constructions. All are
// Gram-type sums, Hermitian PSD by construction.
struct DerivedOperators {
  // channel-only
  std::vector<Eigen::MatrixXcd> d_mat;   // D_k = diag(h_k^H) G, M x N
  std::vector<Eigen::VectorXd> q_abs2;   // diag(Q_k Q_k^H) = |h_k|^2, M

  // depend on the surface configuration
  std::vector<Eigen::VectorXcd> h_casc;  // cascaded H_k, N
  std::vector<Eigen::MatrixXcd> c_mat;   // C_k, N x N
  Eigen::MatrixXcd gamma;                // Gamma, N x N
  double theta_fro2 = 0;                 // sum_s ||Theta_s||_F^2

  // depend on the beamformers
  Eigen::VectorXd upsilon;               // diagonal of Upsilon, M
  std::vector<Eigen::MatrixXcd> e_mat;   // E_k, M x M
};

DerivedOperators derive_operators(const ChannelSet& ch,
                                  const StarCoefficients& star,
                                  const Beamformers& bf,
                                  const SystemConfig& cfg);

// Amplification power through the beamformer quadratic form:
//   sum_k w_k^H Gamma w_k + sigma_A^2 sum_s ||Theta_s||_F^2.
double p_act_quadratic_form(const Beamformers& bf, const StarCoefficients& star,
                            const ChannelSet& ch, const SystemConfig& cfg);

// Amplification power through the surface quadratic form:
//   sum_s u_s^H Upsilon u_s.
double p_act_upsilon_form(const Beamformers& bf, const StarCoefficients& star,
                          const ChannelSet& ch, const SystemConfig& cfg);

// SINR of user k evaluated through the C_k denominator decomposition.
double sinr_ck_form(int k, const Beamformers& bf, const StarCoefficients& star,
                    const ChannelSet& ch, const SystemConfig& cfg);

// SINR of user k evaluated through the lifted trace form with U = u u^H.
double sinr_lifted_form(int k, const Beamformers& bf,
                        const StarCoefficients& star, const ChannelSet& ch,
                        const SystemConfig& cfg);

}  // namespace starris
