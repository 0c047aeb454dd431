// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "starris/rng.hpp"
#include "starris/types.hpp"

namespace starris::testing {

inline Eigen::MatrixXcd random_matrix(int rows, int cols, Rng& rng,
                                      double scale = 1.0) {
  Eigen::MatrixXcd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = scale * rng.cnormal();
  return m;
}

inline Eigen::VectorXcd random_vector(int n, Rng& rng, double scale = 1.0) {
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.cnormal();
  return v;
}

struct Instance {
  SystemConfig cfg;
  ChannelSet ch;
  Beamformers bf;
  StarCoefficients star;
};

// Random instance with O(1)-scale channels; beamformers scaled to the BS
// power budget, surface amplitudes uniform in (0, sqrt(rho_max)].
inline Instance random_instance(int n, int m, int k, double kappa,
                                std::uint64_t seed) {
  Instance ins;
  ins.cfg.n_antennas = n;
  ins.cfg.n_elements = m;
  ins.cfg.n_users = k;
  ins.cfg.user_sides.clear();
  for (int i = 0; i < k; ++i)
    ins.cfg.user_sides.push_back(i % 2 == 0 ? Side::transmission
                                            : Side::reflection);
  ins.cfg.kappa_b = kappa;
  ins.cfg.kappa_u = kappa;
  ins.cfg.sigma2 = 1e-3;
  ins.cfg.sigma_a2 = 1e-3;
  Rng rng(seed);
  ins.ch.g = random_matrix(m, n, rng);
  ins.ch.h.resize(k);
  for (int i = 0; i < k; ++i) ins.ch.h[i] = random_vector(m, rng);
  ins.bf.w = random_matrix(n, k, rng);
  ins.bf.w *= std::sqrt(ins.cfg.p_bs_max / ins.bf.w.cwiseAbs2().sum());
  auto coeffs = [&](Eigen::VectorXcd& u) {
    u.resize(m);
    for (int i = 0; i < m; ++i) {
      const double beta = rng.uniform(0.05, 1.0) * ins.cfg.rho_max;
      u[i] = std::polar(std::sqrt(beta), rng.uniform(0.0, 2.0 * M_PI));
    }
  };
  coeffs(ins.star.u_t);
  coeffs(ins.star.u_r);
  return ins;
}

}  // namespace starris::testing
