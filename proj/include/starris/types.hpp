// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace starris {

enum class Side { transmission, reflection };

enum class RisMode { active, passive };

// All scalar system parameters, in linear units (Watts, Hz, bit/s/Hz).
struct SystemConfig {
  int n_antennas = 4;   // N
  int n_elements = 30;  // M
  int n_users = 4;      // K
  std::vector<Side> user_sides = {Side::transmission, Side::transmission,
                                  Side::reflection, Side::reflection};

  double p_bs_max = 1.0;   // W
  double p_ris_max = 1.0;  // W
  double r_min = 0.4;      // bit/s/Hz
  double rho_max = 5.0;    // max per-element power gain, > 1
  double kappa_b = 0.02;   // BS hardware-impairment level, [0,1)
  double kappa_u = 0.02;   // user hardware-impairment level, [0,1)
  double sigma2 = 1e-14;   // W, receiver AWGN power
  double sigma_a2 = 1e-14; // W, active-element thermal noise power
  double xi = 0.8;         // amplifier efficiency, (0,1]
  double p_r = 0.01;       // W, per-element circuit power
  double p_c = 1.0;        // W, static power
  double bandwidth = 10e6; // Hz
  double omega = 3.8;      // SE weight, dimensionless, >= 0
  double epsilon = 1e-3;   // outer convergence threshold on alpha
  double inner_tol = 1e-4; // inner-loop relative objective tolerance

  RisMode ris_mode = RisMode::active;

  // entire system power budget (P_BS^max + P_RIS^max)/xi + M*P_r + P_c
  double p_max() const {
    return (p_bs_max + p_ris_max) / xi + n_elements * p_r + p_c;
  }

  int users_on(Side s) const;

  // throws std::invalid_argument naming the offending field
  void validate() const;
};

// BS->RIS matrix G (M x N) and per-user RIS->user vectors h_k (length M).
struct ChannelSet {
  Eigen::MatrixXcd g;
  std::vector<Eigen::VectorXcd> h;

  void validate(const SystemConfig& cfg) const;
};

// Transmission/reflection coefficient vectors; element m of side s is
// sqrt(beta_m^s) * exp(j theta_m^s).
struct StarCoefficients {
  Eigen::VectorXcd u_t;
  Eigen::VectorXcd u_r;

  const Eigen::VectorXcd& side(Side s) const {
    return s == Side::transmission ? u_t : u_r;
  }
  Eigen::VectorXcd& side(Side s) { return s == Side::transmission ? u_t : u_r; }

  static StarCoefficients zero(int m) {
    return {Eigen::VectorXcd::Zero(m), Eigen::VectorXcd::Zero(m)};
  }
};

// Per-user precoding vectors, stored as columns of an N x K matrix.
struct Beamformers {
  Eigen::MatrixXcd w;

  static Beamformers zero(int n, int k) {
    return {Eigen::MatrixXcd::Zero(n, k)};
  }
  int n_users() const { return static_cast<int>(w.cols()); }
};

struct MetricsReport {
  Eigen::VectorXd per_user_sinr;  // dimensionless
  Eigen::VectorXd per_user_rate;  // bit/s/Hz
  double se = 0;                  // bit/s/Hz
  double p_bs = 0;                // W
  double p_act = 0;               // W
  double p_tot = 0;               // W
  double ee = 0;                  // bit/s per W
  double re = 0;                  // dimensionless
};

// Signed slacks: >= 0 means satisfied, < 0 is the violation magnitude.
struct FeasibilityReport {
  double bs_power_slack = 0;   // transmit power budget
  double ris_power_slack = 0;  // amplification budget; in passive mode the
                               // energy-splitting slack min_m(1 - b_t - b_r)
  Eigen::VectorXd rate_slack;  // per-user rate floor
  double coeff_slack = 0;      // element gain bound, min over elements/sides
  bool ok(double tol = 1e-9) const {
    return bs_power_slack >= -tol && ris_power_slack >= -tol &&
           coeff_slack >= -tol && (rate_slack.size() == 0 || rate_slack.minCoeff() >= -tol);
  }
  double min_slack() const {
    double s = std::min({bs_power_slack, ris_power_slack, coeff_slack});
    if (rate_slack.size() > 0) s = std::min(s, rate_slack.minCoeff());
    return s;
  }
};

}  // namespace starris
