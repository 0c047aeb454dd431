// SPDX-License-Identifier: Apache-2.0
#include "starris/optimizer/operators.hpp"

#include "starris/metrics.hpp"

namespace starris {

DerivedOperators derive_operators(const ChannelSet& ch,
                                  const StarCoefficients& star,
                                  const Beamformers& bf,
                                  const SystemConfig& cfg) {
  DerivedOperators ops;
  const int n = cfg.n_antennas;
  const int m = cfg.n_elements;
  const int k = cfg.n_users;

  ops.d_mat.reserve(k);
  ops.q_abs2.reserve(k);
  ops.h_casc.reserve(k);
  ops.c_mat.reserve(k);
  for (int i = 0; i < k; ++i) {
    ops.d_mat.push_back(ch.h[i].conjugate().asDiagonal() * ch.g);
    ops.q_abs2.push_back(ch.h[i].cwiseAbs2());
    const Eigen::VectorXcd hk =
        cascaded_channel(ch.h[i], star.side(cfg.user_sides[i]), ch.g);
    ops.h_casc.push_back(hk);
    const Eigen::MatrixXcd outer = hk * hk.adjoint();
    ops.c_mat.push_back(cfg.kappa_u * outer +
                        (1.0 + cfg.kappa_u) * cfg.kappa_b * diag_only(outer));
  }

  ops.gamma = Eigen::MatrixXcd::Zero(n, n);
  ops.theta_fro2 = 0;
  for (Side s : {Side::transmission, Side::reflection}) {
    const Eigen::VectorXd uabs2 = star.side(s).cwiseAbs2();
    const Eigen::MatrixXcd gram =
        ch.g.adjoint() * uabs2.asDiagonal() * ch.g;  // G^H Th^H Th G
    ops.gamma += gram + cfg.kappa_b * diag_only(gram);
    ops.theta_fro2 += uabs2.sum();
  }

  // Upsilon = I o (sum_k G (W_k + kappa_b diag(W_k)) G^H + sigma_A^2 I)
  const Eigen::VectorXd per_antenna = bf.w.cwiseAbs2().rowwise().sum();
  Eigen::VectorXd ups = Eigen::VectorXd::Constant(m, cfg.sigma_a2);
  for (int i = 0; i < k; ++i) ups += (ch.g * bf.w.col(i)).cwiseAbs2();
  ups += cfg.kappa_b * (ch.g.cwiseAbs2() * per_antenna);
  ops.upsilon = ups;

  ops.e_mat.reserve(k);
  for (int i = 0; i < k; ++i) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(m, m);
    for (int l = 0; l < k; ++l) {
      const Eigen::VectorXcd dw = ops.d_mat[i] * bf.w.col(l);
      e += cfg.kappa_u * (dw * dw.adjoint());
      e += (1.0 + cfg.kappa_u) * cfg.kappa_b * ops.d_mat[i] *
           bf.w.col(l).cwiseAbs2().asDiagonal() * ops.d_mat[i].adjoint();
    }
    ops.e_mat.push_back(0.5 * (e + e.adjoint()));
  }
  return ops;
}

double p_act_quadratic_form(const Beamformers& bf, const StarCoefficients& star,
                            const ChannelSet& ch, const SystemConfig& cfg) {
  const DerivedOperators ops =
      derive_operators(ch, star, Beamformers::zero(cfg.n_antennas, cfg.n_users),
                       cfg);
  double acc = cfg.sigma_a2 * ops.theta_fro2;
  for (int k = 0; k < cfg.n_users; ++k)
    acc += (bf.w.col(k).adjoint() * ops.gamma * bf.w.col(k)).value().real();
  return acc;
}

double p_act_upsilon_form(const Beamformers& bf, const StarCoefficients& star,
                          const ChannelSet& ch, const SystemConfig& cfg) {
  const DerivedOperators ops = derive_operators(ch, star, bf, cfg);
  double acc = 0;
  for (Side s : {Side::transmission, Side::reflection})
    acc += ops.upsilon.dot(star.side(s).cwiseAbs2());
  return acc;
}

double sinr_ck_form(int k, const Beamformers& bf, const StarCoefficients& star,
                    const ChannelSet& ch, const SystemConfig& cfg) {
  const DerivedOperators ops = derive_operators(ch, star, bf, cfg);
  const Eigen::VectorXcd& hk = ops.h_casc[k];
  double den = 0;
  for (int i = 0; i < cfg.n_users; ++i) {
    if (i != k) den += std::norm(hk.dot(bf.w.col(i)));
    den += (bf.w.col(i).adjoint() * ops.c_mat[k] * bf.w.col(i)).value().real();
  }
  const Eigen::VectorXd uabs2 = star.side(cfg.user_sides[k]).cwiseAbs2();
  den += (1.0 + cfg.kappa_u) *
         (ops.q_abs2[k].dot(uabs2) * cfg.sigma_a2 + cfg.sigma2);
  return std::norm(hk.dot(bf.w.col(k))) / den;
}

double sinr_lifted_form(int k, const Beamformers& bf,
                        const StarCoefficients& star, const ChannelSet& ch,
                        const SystemConfig& cfg) {
  const DerivedOperators ops = derive_operators(ch, star, bf, cfg);
  const Eigen::VectorXcd& u = star.side(cfg.user_sides[k]);
  const Eigen::MatrixXcd big_u = u * u.adjoint();
  auto tr = [&](const Eigen::MatrixXcd& a) {
    return (big_u * a).trace().real();
  };
  const Eigen::VectorXcd dwk = ops.d_mat[k] * bf.w.col(k);
  const double num = tr(dwk * dwk.adjoint());
  double den = 0;
  for (int i = 0; i < cfg.n_users; ++i) {
    if (i == k) continue;
    const Eigen::VectorXcd dwi = ops.d_mat[k] * bf.w.col(i);
    den += tr(dwi * dwi.adjoint());
  }
  den += tr(ops.e_mat[k]);
  den += (1.0 + cfg.kappa_u) *
         (tr(Eigen::MatrixXcd(ops.q_abs2[k].cast<std::complex<double>>()
                                  .asDiagonal())) *
              cfg.sigma_a2 +
          cfg.sigma2);
  return num / den;
}

}  // namespace starris
