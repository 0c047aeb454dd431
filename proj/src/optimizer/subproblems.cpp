// SPDX-License-Identifier: Apache-2.0
#include "starris/optimizer/subproblems.hpp"

#include <cmath>
#include <stdexcept>

#include "starris/conic/embed.hpp"
#include "starris/metrics.hpp"

namespace starris {

using conic::ConicProgram;
using conic::LinExpr;
using conic::PsdVar;
using conic::VarId;

namespace {

// Re(r^H w) over realified beam variables: Re(r).Re(w) + Im(r).Im(w)
LinExpr re_dot(const Eigen::VectorXcd& r, const std::vector<VarId>& wre,
               const std::vector<VarId>& wim, double scale = 1.0) {
  LinExpr e;
  for (int i = 0; i < r.size(); ++i) {
    e += (scale * r[i].real()) * LinExpr(wre[i]);
    e += (scale * r[i].imag()) * LinExpr(wim[i]);
  }
  return e;
}

// Im(r^H w) = Re(r).Im(w) - Im(r).Re(w)
LinExpr im_dot(const Eigen::VectorXcd& r, const std::vector<VarId>& wre,
               const std::vector<VarId>& wim, double scale = 1.0) {
  LinExpr e;
  for (int i = 0; i < r.size(); ++i) {
    e += (scale * r[i].real()) * LinExpr(wim[i]);
    e -= (scale * r[i].imag()) * LinExpr(wre[i]);
  }
  return e;
}

// Rows F with sum_j (F_j . [Re w; Im w])^2 = w^H A w for Hermitian PSD A.
Eigen::MatrixXd psd_factor_rows(const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXd emb = conic::hermitian_embed(a, 1e-9);
  Eigen::LLT<Eigen::MatrixXd> llt(emb);
  if (llt.info() == Eigen::Success) {
    return Eigen::MatrixXd(llt.matrixL().transpose());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(emb);
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd f =
      lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return f;
}

// expression rows of F applied to user vars, optionally scaled
void append_factor_rows(std::vector<LinExpr>& rows, const Eigen::MatrixXd& f,
                        const std::vector<VarId>& wre,
                        const std::vector<VarId>& wim, double scale) {
  const int n = static_cast<int>(wre.size());
  for (int r = 0; r < f.rows(); ++r) {
    if (f.row(r).norm() * std::abs(scale) < 1e-16) continue;
    LinExpr e;
    for (int i = 0; i < n; ++i) {
      const double cre = scale * f(r, i);
      const double cim = scale * f(r, n + i);
      if (cre != 0.0) e += cre * LinExpr(wre[i]);
      if (cim != 0.0) e += cim * LinExpr(wim[i]);
    }
    rows.push_back(std::move(e));
  }
}

// common skeleton shared by the RE objective and the restoration variant
TransmitSubproblem build_transmit_core(const SurrogateState& state,
                                       const DerivedOperators& ops,
                                       const StarCoefficients& star,
                                       const ChannelSet& ch,
                                       const SystemConfig& cfg,
                                       bool restoration) {
  (void)ch;
  TransmitSubproblem tp;
  ConicProgram& p = tp.prog;
  const int n = cfg.n_antennas;
  const int nk = cfg.n_users;
  const double alpha = state.alpha;
  const bool active = cfg.ris_mode == RisMode::active;
  tp.x_anchor = state.x_anchor;
  tp.y_anchor = state.y_anchor;

  tp.w_re.resize(nk);
  tp.w_im.resize(nk);
  for (int k = 0; k < nk; ++k)
    for (int i = 0; i < n; ++i) {
      tp.w_re[k].push_back(p.scalar("w_re"));
      tp.w_im[k].push_back(p.scalar("w_im"));
    }
  for (int k = 0; k < nk; ++k) {
    tp.x_hat.push_back(p.nonneg_scalar("x_hat"));
    tp.y_hat.push_back(p.nonneg_scalar("y_hat"));
  }
  tp.y_se = p.nonneg_scalar("y_se");
  tp.t_hyp = p.nonneg_scalar("t");
  tp.p_quad = p.nonneg_scalar("p_quad");

  const Eigen::MatrixXd gamma_rows =
      active ? psd_factor_rows(ops.gamma) : Eigen::MatrixXd();

  // numerator linearization: X_k Pi_k >= 1 with Pi_k(w) = 2 Re(g_k^H w_k)
  // - |H_k^H w_k^t|^2, anchor-normalized so both cone members sit near 1
  for (int k = 0; k < nk; ++k) {
    const std::complex<double> s_anchor =
        ops.h_casc[k].dot(state.w_anchor.col(k));
    const Eigen::VectorXcd g = ops.h_casc[k] * s_anchor;
    LinExpr pi_hat =
        re_dot(g, tp.w_re[k], tp.w_im[k], 2.0 * state.x_anchor[k]) - 1.0;
    p.add_rsoc(tp.x_hat[k], pi_hat, {LinExpr(M_SQRT2)});
  }

  // denominator upper bound: Y_k >= interference + distortion + noise
  for (int k = 0; k < nk; ++k) {
    const double inv_scale = 1.0 / std::sqrt(state.y_anchor[k]);
    const Eigen::VectorXd uabs2 =
        star.side(cfg.user_sides[k]).cwiseAbs2();
    const double const_k =
        (1.0 + cfg.kappa_u) *
        (ops.q_abs2[k].dot(uabs2) * cfg.sigma_a2 + cfg.sigma2);
    std::vector<LinExpr> rows;
    for (int i = 0; i < nk; ++i) {
      if (i == k) continue;
      rows.push_back(re_dot(ops.h_casc[k], tp.w_re[i], tp.w_im[i], inv_scale));
      rows.push_back(im_dot(ops.h_casc[k], tp.w_re[i], tp.w_im[i], inv_scale));
    }
    const Eigen::MatrixXd ck_rows = psd_factor_rows(ops.c_mat[k]);
    for (int l = 0; l < nk; ++l)
      append_factor_rows(rows, ck_rows, tp.w_re[l], tp.w_im[l], inv_scale);
    const LinExpr margin =
        LinExpr(tp.y_hat[k]) - const_k / state.y_anchor[k];
    p.add_rsoc(margin, LinExpr(0.5), std::move(rows));
  }

  // concave rate lower bounds in the normalized slack variables
  std::vector<LinExpr> rlb(nk);
  LinExpr rlb_sum;
  for (int k = 0; k < nk; ++k) {
    const RateLowerBound lb =
        rate_lower_bound(state.x_anchor[k], state.y_anchor[k]);
    rlb[k] = LinExpr(lb.constant) +
             (lb.dx * state.x_anchor[k]) * (LinExpr(tp.x_hat[k]) - 1.0) +
             (lb.dy * state.y_anchor[k]) * (LinExpr(tp.y_hat[k]) - 1.0);
    rlb_sum += rlb[k];
  }

  // BS power budget
  {
    std::vector<LinExpr> wexprs;
    for (int k = 0; k < nk; ++k)
      for (int i = 0; i < n; ++i) {
        wexprs.emplace_back(tp.w_re[k][i]);
        wexprs.emplace_back(tp.w_im[k][i]);
      }
    p.add_soc(LinExpr(std::sqrt(cfg.p_bs_max)), std::move(wexprs));
  }

  // surface amplification budget at fixed Theta
  if (active) {
    const double rhs = cfg.p_ris_max - cfg.sigma_a2 * ops.theta_fro2;
    std::vector<LinExpr> rows;
    for (int l = 0; l < nk; ++l)
      append_factor_rows(rows, gamma_rows, tp.w_re[l], tp.w_im[l], 1.0);
    p.add_soc(LinExpr(std::sqrt(std::max(rhs, 0.0))), std::move(rows));
  }

  // epigraph of the beamformer-dependent part of P_tot
  {
    const double inv_sqrt_xi = 1.0 / std::sqrt(cfg.xi);
    std::vector<LinExpr> rows;
    for (int k = 0; k < nk; ++k)
      for (int i = 0; i < n; ++i) {
        rows.push_back(inv_sqrt_xi * LinExpr(tp.w_re[k][i]));
        rows.push_back(inv_sqrt_xi * LinExpr(tp.w_im[k][i]));
      }
    if (active)
      for (int l = 0; l < nk; ++l)
        append_factor_rows(rows, gamma_rows, tp.w_re[l], tp.w_im[l],
                           inv_sqrt_xi);
    p.add_rsoc(tp.p_quad, LinExpr(0.5), std::move(rows));
  }
  tp.p_const = cfg.n_elements * cfg.p_r + cfg.p_c +
               (active ? cfg.sigma_a2 * ops.theta_fro2 / cfg.xi : 0.0);

  // numerical floors relative to the anchors
  for (int k = 0; k < nk; ++k) {
    p.add_ge(tp.x_hat[k], 1e-12);
    p.add_ge(tp.y_hat[k], 1e-12);
  }

  if (!restoration) {
    p.add_le(tp.y_se, rlb_sum);
    for (int k = 0; k < nk; ++k) p.add_ge(rlb[k], cfg.r_min);
    p.add_rsoc(tp.y_se, LinExpr(0.5), {LinExpr(tp.t_hyp)});
    const LinExpr obj = (2.0 * alpha) * LinExpr(tp.t_hyp) -
                        (alpha * alpha) * LinExpr(tp.p_quad) +
                        (cfg.omega / cfg.p_max()) * LinExpr(tp.y_se) -
                        alpha * alpha * tp.p_const;
    p.maximize(obj);
  } else {
    // maximize the worst-case rate slack instead
    const VarId r_slack = p.scalar("r_min_slack");
    for (int k = 0; k < nk; ++k) p.add_ge(rlb[k], LinExpr(r_slack));
    p.maximize(LinExpr(r_slack));
  }
  return tp;
}

}  // namespace

Beamformers TransmitSubproblem::extract(const conic::Solution& sol) const {
  const int nk = static_cast<int>(w_re.size());
  const int n = static_cast<int>(w_re[0].size());
  Beamformers bf = Beamformers::zero(n, nk);
  for (int k = 0; k < nk; ++k)
    for (int i = 0; i < n; ++i)
      bf.w(i, k) = {sol.value(w_re[k][i]), sol.value(w_im[k][i])};
  return bf;
}

TransmitSubproblem build_transmit_subproblem(const SurrogateState& state,
                                             const DerivedOperators& ops,
                                             const StarCoefficients& star,
                                             const ChannelSet& ch,
                                             const SystemConfig& cfg) {
  (void)ch;
  return build_transmit_core(state, ops, star, ch, cfg, false);
}

TransmitSubproblem build_rate_restoration_subproblem(
    const SurrogateState& state, const DerivedOperators& ops,
    const StarCoefficients& star, const ChannelSet& ch,
    const SystemConfig& cfg) {
  return build_transmit_core(state, ops, star, ch, cfg, true);
}

LiftedStarMatrices RisSubproblem::extract(const conic::Solution& sol) const {
  return {conic::hermitian_unembed(sol.value(u_emb_t)),
          conic::hermitian_unembed(sol.value(u_emb_r))};
}

RisSubproblem build_ris_subproblem(const SurrogateState& state,
                                   const DerivedOperators& ops,
                                   const Beamformers& bf, const ChannelSet& ch,
                                   const SystemConfig& cfg) {
  (void)ch;
  RisSubproblem rp;
  ConicProgram& p = rp.prog;
  const int m = cfg.n_elements;
  const int nk = cfg.n_users;
  const int d = 2 * m;
  const double alpha = state.alpha;
  const bool active = cfg.ris_mode == RisMode::active;
  rp.x_anchor = state.x_anchor;
  rp.y_anchor = state.y_anchor;

  rp.u_emb_t = p.psd_matrix("U_t", d);
  rp.u_emb_r = p.psd_matrix("U_r", d);
  for (int k = 0; k < nk; ++k) {
    rp.x_hat.push_back(p.nonneg_scalar("x_hat"));
    rp.y_hat.push_back(p.nonneg_scalar("y_hat"));
  }
  rp.y_se = p.nonneg_scalar("y_se");
  rp.t_hyp = p.nonneg_scalar("t");

  auto side_var = [&](int k) {
    return cfg.user_sides[k] == Side::transmission ? rp.u_emb_t : rp.u_emb_r;
  };
  // <A, U> through the real embedding carries a factor 1/2
  auto trace_half = [&](PsdVar v, const Eigen::MatrixXcd& a) {
    return 0.5 * p.trace_product(v, conic::hermitian_embed(a, 1e-9));
  };

  // per-user numerator/denominator trace expressions
  for (int k = 0; k < nk; ++k) {
    const Eigen::VectorXcd dwk = ops.d_mat[k] * bf.w.col(k);
    const Eigen::MatrixXcd num_mat = dwk * dwk.adjoint();
    p.add_rsoc(rp.x_hat[k],
               state.x_anchor[k] * trace_half(side_var(k), num_mat),
               {LinExpr(M_SQRT2)});

    LinExpr den;
    for (int i = 0; i < nk; ++i) {
      if (i == k) continue;
      const Eigen::VectorXcd dwi = ops.d_mat[k] * bf.w.col(i);
      den += trace_half(side_var(k), Eigen::MatrixXcd(dwi * dwi.adjoint()));
    }
    den += trace_half(side_var(k), ops.e_mat[k]);
    if (cfg.sigma_a2 > 0) {
      const Eigen::MatrixXcd qmat =
          ops.q_abs2[k].cast<std::complex<double>>().asDiagonal();
      den += ((1.0 + cfg.kappa_u) * cfg.sigma_a2) *
             trace_half(side_var(k), qmat);
    }
    den += (1.0 + cfg.kappa_u) * cfg.sigma2;
    p.add_ge(rp.y_hat[k], (1.0 / state.y_anchor[k]) * den);
  }

  // per-element feasible set
  for (int i = 0; i < m; ++i) {
    const LinExpr diag_t =
        0.5 * (p.entry(rp.u_emb_t, i, i) + p.entry(rp.u_emb_t, m + i, m + i));
    const LinExpr diag_r =
        0.5 * (p.entry(rp.u_emb_r, i, i) + p.entry(rp.u_emb_r, m + i, m + i));
    if (active) {
      p.add_le(diag_t, cfg.rho_max);
      p.add_le(diag_r, cfg.rho_max);
    } else {
      p.add_le(diag_t + diag_r, 1.0);  // energy splitting
    }
  }

  // amplification power, affine in the lifted variables
  LinExpr p_act_expr;
  if (active) {
    const Eigen::MatrixXcd ups_mat =
        ops.upsilon.cast<std::complex<double>>().asDiagonal();
    p_act_expr = trace_half(rp.u_emb_t, ups_mat) +
                 trace_half(rp.u_emb_r, ups_mat);
    p.add_le(p_act_expr, cfg.p_ris_max);
  }

  // rate lower bounds, SE slack, sqrt hypograph
  std::vector<LinExpr> rlb(nk);
  LinExpr rlb_sum;
  for (int k = 0; k < nk; ++k) {
    const RateLowerBound lb =
        rate_lower_bound(state.x_anchor[k], state.y_anchor[k]);
    rlb[k] = LinExpr(lb.constant) +
             (lb.dx * state.x_anchor[k]) * (LinExpr(rp.x_hat[k]) - 1.0) +
             (lb.dy * state.y_anchor[k]) * (LinExpr(rp.y_hat[k]) - 1.0);
    rlb_sum += rlb[k];
    p.add_ge(rlb[k], cfg.r_min);
  }
  p.add_le(rp.y_se, rlb_sum);
  p.add_rsoc(rp.y_se, LinExpr(0.5), {LinExpr(rp.t_hyp)});

  for (int k = 0; k < nk; ++k) {
    p.add_ge(rp.x_hat[k], 1e-12);
    p.add_ge(rp.y_hat[k], 1e-12);
  }

  rp.p_const = (p_bs(bf)) / cfg.xi + cfg.n_elements * cfg.p_r + cfg.p_c;
  const LinExpr obj = (2.0 * alpha) * LinExpr(rp.t_hyp) -
                      (alpha * alpha / cfg.xi) * p_act_expr +
                      (cfg.omega / cfg.p_max()) * LinExpr(rp.y_se) -
                      alpha * alpha * rp.p_const;
  p.maximize(obj);
  return rp;
}

Eigen::MatrixXcd zf_directions(const StarCoefficients& star,
                               const ChannelSet& ch, const SystemConfig& cfg) {
  const int n = cfg.n_antennas;
  const int nk = cfg.n_users;
  if (nk > n)
    throw std::invalid_argument("zf_directions: needs K <= N");
  Eigen::MatrixXcd h(n, nk);
  for (int k = 0; k < nk; ++k)
    h.col(k) = cascaded_channel(ch.h[k], star.side(cfg.user_sides[k]), ch.g);
  const Eigen::MatrixXcd gram = h.adjoint() * h;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
  if (!lu.isInvertible())
    throw std::runtime_error("zf_directions: rank-deficient cascaded channel");
  Eigen::MatrixXcd w = h * lu.inverse();
  for (int k = 0; k < nk; ++k) {
    const double nrm = w.col(k).norm();
    if (!(nrm > 0))
      throw std::runtime_error("zf_directions: degenerate direction");
    w.col(k) /= nrm;
  }
  return w;
}

Beamformers ZfPowerSubproblem::extract(const conic::Solution& sol) const {
  const int nk = static_cast<int>(power.size());
  Beamformers bf;
  bf.w = directions;
  for (int k = 0; k < nk; ++k)
    bf.w.col(k) *= std::sqrt(std::max(sol.value(power[k]), 0.0));
  return bf;
}

ZfPowerSubproblem build_zf_power_subproblem(const SurrogateState& state,
                                            const DerivedOperators& ops,
                                            const Eigen::MatrixXcd& directions,
                                            const StarCoefficients& star,
                                            const ChannelSet& ch,
                                            const SystemConfig& cfg) {
  (void)ch;
  ZfPowerSubproblem zp;
  zp.directions = directions;
  ConicProgram& p = zp.prog;
  const int nk = cfg.n_users;
  const double alpha = state.alpha;
  const bool active = cfg.ris_mode == RisMode::active;
  zp.x_anchor = state.x_anchor;
  zp.y_anchor = state.y_anchor;

  for (int k = 0; k < nk; ++k) {
    zp.power.push_back(p.nonneg_scalar("p"));
    zp.x_hat.push_back(p.nonneg_scalar("x_hat"));
    zp.y_hat.push_back(p.nonneg_scalar("y_hat"));
  }
  zp.y_se = p.nonneg_scalar("y_se");
  zp.t_hyp = p.nonneg_scalar("t");

  Eigen::MatrixXd cross_gain(nk, nk);   // |H_k^H w_i|^2
  Eigen::MatrixXd c_quad(nk, nk);       // w_l^H C_k w_l
  Eigen::VectorXd gamma_quad(nk);       // w_l^H Gamma w_l
  for (int k = 0; k < nk; ++k) {
    for (int i = 0; i < nk; ++i) {
      cross_gain(k, i) = std::norm(ops.h_casc[k].dot(directions.col(i)));
      c_quad(k, i) = (directions.col(i).adjoint() * ops.c_mat[k] *
                      directions.col(i))
                         .value()
                         .real();
    }
    gamma_quad[k] = active ? (directions.col(k).adjoint() * ops.gamma *
                              directions.col(k))
                                 .value()
                                 .real()
                           : 0.0;
  }

  for (int k = 0; k < nk; ++k) {
    p.add_rsoc(zp.x_hat[k],
               (state.x_anchor[k] * cross_gain(k, k)) * LinExpr(zp.power[k]),
               {LinExpr(M_SQRT2)});
    const Eigen::VectorXd uabs2 = star.side(cfg.user_sides[k]).cwiseAbs2();
    const double const_k =
        (1.0 + cfg.kappa_u) *
        (ops.q_abs2[k].dot(uabs2) * cfg.sigma_a2 + cfg.sigma2);
    LinExpr den(const_k);
    for (int i = 0; i < nk; ++i) {
      double coef = c_quad(k, i);
      if (i != k) coef += cross_gain(k, i);
      den += coef * LinExpr(zp.power[i]);
    }
    p.add_ge(zp.y_hat[k], (1.0 / state.y_anchor[k]) * den);
  }

  LinExpr total_power;
  for (int k = 0; k < nk; ++k) total_power += LinExpr(zp.power[k]);
  p.add_le(total_power, cfg.p_bs_max);
  if (active) {
    LinExpr amp;
    for (int k = 0; k < nk; ++k) amp += gamma_quad[k] * LinExpr(zp.power[k]);
    p.add_le(amp, cfg.p_ris_max - cfg.sigma_a2 * ops.theta_fro2);
  }

  std::vector<LinExpr> rlb(nk);
  LinExpr rlb_sum;
  for (int k = 0; k < nk; ++k) {
    const RateLowerBound lb =
        rate_lower_bound(state.x_anchor[k], state.y_anchor[k]);
    rlb[k] = LinExpr(lb.constant) +
             (lb.dx * state.x_anchor[k]) * (LinExpr(zp.x_hat[k]) - 1.0) +
             (lb.dy * state.y_anchor[k]) * (LinExpr(zp.y_hat[k]) - 1.0);
    rlb_sum += rlb[k];
    p.add_ge(rlb[k], cfg.r_min);
  }
  p.add_le(zp.y_se, rlb_sum);
  p.add_rsoc(zp.y_se, LinExpr(0.5), {LinExpr(zp.t_hyp)});
  for (int k = 0; k < nk; ++k) {
    p.add_ge(zp.x_hat[k], 1e-12);
    p.add_ge(zp.y_hat[k], 1e-12);
  }

  const double p_const = cfg.n_elements * cfg.p_r + cfg.p_c +
                         (active ? cfg.sigma_a2 * ops.theta_fro2 / cfg.xi : 0.0);
  LinExpr ptot_expr(p_const);
  for (int k = 0; k < nk; ++k)
    ptot_expr += ((1.0 + gamma_quad[k]) / cfg.xi) * LinExpr(zp.power[k]);
  const LinExpr obj = (2.0 * alpha) * LinExpr(zp.t_hyp) -
                      (alpha * alpha) * ptot_expr +
                      (cfg.omega / cfg.p_max()) * LinExpr(zp.y_se);
  p.maximize(obj);
  return zp;
}

double surrogate_objective_at(const SurrogateState& state,
                              const StarCoefficients& star,
                              const Beamformers& bf, const ChannelSet& ch,
                              const SystemConfig& cfg) {
  double rlb_sum = 0;
  for (int k = 0; k < cfg.n_users; ++k) {
    const Eigen::VectorXcd hk =
        cascaded_channel(ch.h[k], star.side(cfg.user_sides[k]), ch.g);
    const double num = std::norm(hk.dot(bf.w.col(k)));
    if (!(num > 0)) return -std::numeric_limits<double>::infinity();
    const double x = 1.0 / num;
    const double y = interference_noise_power(k, bf, star, ch, cfg);
    rlb_sum +=
        rate_lower_bound(state.x_anchor[k], state.y_anchor[k]).value(x, y);
  }
  const double y_se = std::max(rlb_sum, 0.0);
  const double pt = p_tot(bf, star, ch, cfg);
  return 2.0 * state.alpha * std::sqrt(y_se) - state.alpha * state.alpha * pt +
         cfg.omega * y_se / cfg.p_max();
}

}  // namespace starris
