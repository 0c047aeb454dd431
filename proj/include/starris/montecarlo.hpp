// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "starris/types.hpp"

namespace starris {

struct MonteCarloEstimate {
  double sinr = 0;          // empirical signal power / noise power
  double std_error = 0;     // delta-method standard error of the ratio
  double signal_power = 0;  // empirical E|H_k^H w_k s_k|^2
  double noise_power = 0;   // empirical E|n~_k|^2
};

// Validation oracle for the closed-form SINR: simulates the signal model
// draw by draw (data symbols, BS distortion, surface thermal noise, AWGN,
// receiver distortion with variance kappa_u |y~_k|^2 conditioned on the
// realized y~_k) and estimates signal and interference-plus-noise powers.
MonteCarloEstimate monte_carlo_sinr(int k, const Beamformers& bf,
                                    const StarCoefficients& star,
                                    const ChannelSet& ch,
                                    const SystemConfig& cfg, int n_draws,
                                    std::uint64_t seed);

}  // namespace starris
