// SPDX-License-Identifier: Apache-2.0
#include "starris/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace starris {

Eigen::VectorXcd cascaded_channel(const Eigen::VectorXcd& h_k,
                                  const Eigen::VectorXcd& u_side,
                                  const Eigen::MatrixXcd& g) {
  if (h_k.size() != g.rows() || u_side.size() != g.rows())
    throw std::invalid_argument("cascaded_channel: dimension mismatch");
  // H_k = G^H diag(u) h_k  <=>  H_k^H = h_k^H diag(u^H) G
  return g.adjoint() * u_side.cwiseProduct(h_k);
}

namespace {

// ||h_k^H Theta_s||^2 = sum_m |h_k[m]|^2 |u_s[m]|^2
double theta_row_power(const Eigen::VectorXcd& h_k,
                       const Eigen::VectorXcd& u_side) {
  return (h_k.cwiseAbs2().cwiseProduct(u_side.cwiseAbs2())).sum();
}

}  // namespace

double interference_noise_power(int k, const Beamformers& bf,
                                const StarCoefficients& star,
                                const ChannelSet& ch, const SystemConfig& cfg) {
  if (k < 0 || k >= cfg.n_users)
    throw std::invalid_argument("interference_noise_power: bad user index");
  const Eigen::VectorXcd& u = star.side(cfg.user_sides[k]);
  const Eigen::VectorXcd hk = cascaded_channel(ch.h[k], u, ch.g);

  double acc = 0.0;
  const Eigen::VectorXd habs2 = hk.cwiseAbs2();
  for (int l = 0; l < cfg.n_users; ++l) {
    const auto wl = bf.w.col(l);
    const double gain = std::norm(hk.dot(wl));  // |H_k^H w_l|^2
    if (l != k) acc += gain;
    acc += cfg.kappa_u * gain;
    // H_k^H diag~(w_l w_l^H) H_k = sum_n |H_k[n]|^2 |w_l[n]|^2
    acc += (1.0 + cfg.kappa_u) * cfg.kappa_b * habs2.dot(wl.cwiseAbs2());
  }
  acc += (1.0 + cfg.kappa_u) *
         (theta_row_power(ch.h[k], u) * cfg.sigma_a2 + cfg.sigma2);
  return acc;
}

double sinr(int k, const Beamformers& bf, const StarCoefficients& star,
            const ChannelSet& ch, const SystemConfig& cfg) {
  const Eigen::VectorXcd& u = star.side(cfg.user_sides[k]);
  const Eigen::VectorXcd hk = cascaded_channel(ch.h[k], u, ch.g);
  const double num = std::norm(hk.dot(bf.w.col(k)));
  const double den = interference_noise_power(k, bf, star, ch, cfg);
  if (!(den > 0.0))
    throw std::domain_error("sinr: zero interference-plus-noise power");
  return num / den;
}

double rate(int k, const Beamformers& bf, const StarCoefficients& star,
            const ChannelSet& ch, const SystemConfig& cfg) {
  return std::log2(1.0 + sinr(k, bf, star, ch, cfg));
}

double system_se(const Beamformers& bf, const StarCoefficients& star,
                 const ChannelSet& ch, const SystemConfig& cfg) {
  double se = 0.0;
  for (int k = 0; k < cfg.n_users; ++k) se += rate(k, bf, star, ch, cfg);
  return se;
}

double p_bs(const Beamformers& bf) { return bf.w.cwiseAbs2().sum(); }

double p_act(const Beamformers& bf, const StarCoefficients& star,
             const ChannelSet& ch, const SystemConfig& cfg) {
  if (cfg.ris_mode == RisMode::passive) return 0.0;
  double acc = 0.0;
  const Eigen::VectorXd per_antenna =
      bf.w.cwiseAbs2().rowwise().sum();  // sum_k |w_k[n]|^2
  for (Side s : {Side::transmission, Side::reflection}) {
    const Eigen::VectorXcd& u = star.side(s);
    const Eigen::VectorXd uabs2 = u.cwiseAbs2();
    // sum_k ||Theta_s G w_k||^2
    for (int k = 0; k < cfg.n_users; ++k)
      acc += uabs2.dot((ch.g * bf.w.col(k)).cwiseAbs2());
    // kappa_b tr(Theta_s G diag~(sum_k w_k w_k^H) G^H Theta_s^H)
    acc += cfg.kappa_b *
           uabs2.dot((ch.g.cwiseAbs2() * per_antenna));
    // sigma_A^2 ||Theta_s||_F^2
    acc += cfg.sigma_a2 * uabs2.sum();
  }
  return acc;
}

double p_tot(const Beamformers& bf, const StarCoefficients& star,
             const ChannelSet& ch, const SystemConfig& cfg) {
  return (p_bs(bf) + p_act(bf, star, ch, cfg)) / cfg.xi +
         cfg.n_elements * cfg.p_r + cfg.p_c;
}

MetricsReport efficiency_metrics(const Beamformers& bf,
                                 const StarCoefficients& star,
                                 const ChannelSet& ch,
                                 const SystemConfig& cfg) {
  MetricsReport rep;
  rep.per_user_sinr.resize(cfg.n_users);
  rep.per_user_rate.resize(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    rep.per_user_sinr[k] = sinr(k, bf, star, ch, cfg);
    rep.per_user_rate[k] = std::log2(1.0 + rep.per_user_sinr[k]);
  }
  rep.se = rep.per_user_rate.sum();
  rep.p_bs = p_bs(bf);
  rep.p_act = p_act(bf, star, ch, cfg);
  rep.p_tot = (rep.p_bs + rep.p_act) / cfg.xi + cfg.n_elements * cfg.p_r + cfg.p_c;
  rep.ee = cfg.bandwidth * rep.se / rep.p_tot;
  rep.re = rep.se / rep.p_tot + cfg.omega * rep.se / cfg.p_max();
  return rep;
}

FeasibilityReport check_feasibility(const Beamformers& bf,
                                    const StarCoefficients& star,
                                    const ChannelSet& ch,
                                    const SystemConfig& cfg) {
  FeasibilityReport rep;
  rep.bs_power_slack = cfg.p_bs_max - p_bs(bf);
  rep.rate_slack.resize(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k)
    rep.rate_slack[k] = rate(k, bf, star, ch, cfg) - cfg.r_min;

  const Eigen::VectorXd bt = star.u_t.cwiseAbs2();
  const Eigen::VectorXd br = star.u_r.cwiseAbs2();
  if (cfg.ris_mode == RisMode::active) {
    rep.ris_power_slack = cfg.p_ris_max - p_act(bf, star, ch, cfg);
    rep.coeff_slack = std::min(cfg.rho_max - bt.maxCoeff(),
                               cfg.rho_max - br.maxCoeff());
  } else {
    // energy splitting: beta_t + beta_r <= 1 per element, no power constraint
    rep.ris_power_slack = (1.0 - (bt + br).maxCoeff());
    rep.coeff_slack = rep.ris_power_slack;
  }
  return rep;
}

double quadratic_transform_objective(double alpha, const Beamformers& bf,
                                     const StarCoefficients& star,
                                     const ChannelSet& ch,
                                     const SystemConfig& cfg) {
  const double se = system_se(bf, star, ch, cfg);
  const double pt = p_tot(bf, star, ch, cfg);
  return 2.0 * alpha * std::sqrt(se) - alpha * alpha * pt +
         cfg.omega * se / cfg.p_max();
}

}  // namespace starris
