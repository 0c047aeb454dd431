// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "starris/types.hpp"

namespace starris {

// Scenario geometry and propagation constants for Rician channel synthesis.
struct GeometryConfig {
  Eigen::Vector3d bs_position{0.0, 0.0, 0.0};
  Eigen::Vector3d ris_position{40.0, 0.0, 0.0};
  double user_drop_radius = 3.0;  // m, disc centered at the surface
  double pl0_db = -30.0;          // path loss at 1 m
  double pl_exp_bs_ris = 2.2;
  double pl_exp_ris_user = 2.8;
  double rician_k_db_bs_ris = 3.0;
  double rician_k_db_ris_user = 3.0;
  int ris_rows = 0;  // 0: near-square factorization of M

  void validate() const;
};

// amplitude-domain path loss factor sqrt(PL0 * d^-exp)
double path_loss_amplitude(const GeometryConfig& geom, double distance_m,
                           double exponent);

// near-square rows x cols factorization used for the surface array
std::pair<int, int> ris_grid(int m, int rows_hint);

// Draws G (BS->RIS) and h_k (RIS->user) under the Rician model with
// deterministic array-steering LoS components and i.i.d. CN(0,1) NLoS.
// User positions are resampled per call; BS/RIS are fixed.
ChannelSet generate_channels(const GeometryConfig& geom,
                             const SystemConfig& cfg, std::uint64_t seed);

enum class CsiErrorMode { random, worst_case };

// Returns a perturbed copy: random mode draws one rho_c ~ U[0, rho_c_max]
// per call and scales a uniformly random Frobenius-sphere direction to
// ||Delta|| = rho_c ||.||_F; worst_case pins rho_c = rho_c_max exactly.
ChannelSet apply_csi_error(const ChannelSet& ch, CsiErrorMode mode,
                           double rho_c_max, std::uint64_t seed);

}  // namespace starris
