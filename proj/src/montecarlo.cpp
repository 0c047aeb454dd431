// SPDX-License-Identifier: Apache-2.0
#include "starris/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "starris/metrics.hpp"
#include "starris/rng.hpp"

namespace starris {

MonteCarloEstimate monte_carlo_sinr(int k, const Beamformers& bf,
                                    const StarCoefficients& star,
                                    const ChannelSet& ch,
                                    const SystemConfig& cfg, int n_draws,
                                    std::uint64_t seed) {
  if (n_draws < 1) throw std::invalid_argument("monte_carlo_sinr: n_draws >= 1");
  const int n = cfg.n_antennas;
  const int m = cfg.n_elements;
  const int nk = cfg.n_users;

  const Eigen::VectorXcd& u = star.side(cfg.user_sides[k]);
  const Eigen::VectorXcd hk = cascaded_channel(ch.h[k], u, ch.g);

  // fixed linear maps of the draw
  Eigen::VectorXcd a(nk);  // a_i = H_k^H w_i
  for (int i = 0; i < nk; ++i) a[i] = hk.dot(bf.w.col(i));
  const Eigen::VectorXcd hk_conj = hk.conjugate();           // for H_k^H z_b
  const Eigen::VectorXcd theta_row =
      ch.h[k].conjugate().cwiseProduct(u.conjugate());       // h_k^H Theta_s
  Eigen::VectorXd zb_sigma(n);                               // per-antenna std
  const Eigen::VectorXd per_antenna = bf.w.cwiseAbs2().rowwise().sum();
  for (int j = 0; j < n; ++j)
    zb_sigma[j] = std::sqrt(cfg.kappa_b * per_antenna[j]);
  const double sqrt_sigma_a = std::sqrt(cfg.sigma_a2);
  const double sqrt_sigma = std::sqrt(cfg.sigma2);
  const double sqrt_kappa_u = std::sqrt(cfg.kappa_u);

  Rng rng(seed);
  double sum_s = 0, sum_n = 0, sum_ss = 0, sum_nn = 0, sum_sn = 0;
  for (int d = 0; d < n_draws; ++d) {
    std::complex<double> desired = 0, interf = 0;
    for (int i = 0; i < nk; ++i) {
      const std::complex<double> si = rng.cnormal();
      if (i == k)
        desired = a[i] * si;
      else
        interf += a[i] * si;
    }
    std::complex<double> zb_seen = 0;  // H_k^H z_b
    for (int j = 0; j < n; ++j)
      zb_seen += hk_conj[j] * (rng.cnormal() * zb_sigma[j]);
    std::complex<double> na_seen = 0;  // h_k^H Theta_s n_A
    for (int t = 0; t < m; ++t)
      na_seen += theta_row[t] * (rng.cnormal() * sqrt_sigma_a);
    const std::complex<double> awgn = rng.cnormal() * sqrt_sigma;

    const std::complex<double> y_tilde =
        desired + interf + zb_seen + na_seen + awgn;
    const std::complex<double> nu =
        rng.cnormal() * (sqrt_kappa_u * std::abs(y_tilde));

    const double sig = std::norm(desired);
    const double noi = std::norm(interf + zb_seen + na_seen + awgn + nu);
    sum_s += sig;
    sum_n += noi;
    sum_ss += sig * sig;
    sum_nn += noi * noi;
    sum_sn += sig * noi;
  }

  const double nd = static_cast<double>(n_draws);
  MonteCarloEstimate est;
  est.signal_power = sum_s / nd;
  est.noise_power = sum_n / nd;
  est.sinr = est.signal_power / est.noise_power;
  // delta method on the ratio of means
  const double var_s = sum_ss / nd - est.signal_power * est.signal_power;
  const double var_n = sum_nn / nd - est.noise_power * est.noise_power;
  const double cov_sn = sum_sn / nd - est.signal_power * est.noise_power;
  const double s2 = est.signal_power * est.signal_power;
  const double n2 = est.noise_power * est.noise_power;
  const double var_ratio =
      (var_s / n2 + s2 * var_n / (n2 * n2) - 2.0 * est.signal_power * cov_sn / (n2 * est.noise_power)) / nd;
  est.std_error = std::sqrt(std::max(var_ratio, 0.0));
  return est;
}

}  // namespace starris
