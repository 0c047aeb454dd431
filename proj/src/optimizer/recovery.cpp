// SPDX-License-Identifier: Apache-2.0
#include "starris/optimizer/recovery.hpp"

#include <cmath>
#include <limits>

#include "starris/metrics.hpp"
#include "starris/rng.hpp"

namespace starris {

namespace {

struct EigFactor {
  Eigen::VectorXcd principal;   // sqrt(lambda_max) * v_max
  Eigen::MatrixXcd half;        // U^{1/2} for randomization draws
};

EigFactor factor(const Eigen::MatrixXcd& u) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (u + u.adjoint()));
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  EigFactor f;
  const int top = static_cast<int>(lam.size()) - 1;
  f.principal = std::sqrt(lam[top]) * es.eigenvectors().col(top);
  f.half = es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
  return f;
}

// clip amplitudes into the per-element feasible set, preserving phases
void clip(StarCoefficients& star, const SystemConfig& cfg) {
  const int m = cfg.n_elements;
  if (cfg.ris_mode == RisMode::active) {
    for (Side s : {Side::transmission, Side::reflection}) {
      Eigen::VectorXcd& u = star.side(s);
      for (int i = 0; i < m; ++i) {
        const double beta = std::norm(u[i]);
        if (beta > cfg.rho_max) u[i] *= std::sqrt(cfg.rho_max / beta);
      }
    }
  } else {
    for (int i = 0; i < m; ++i) {
      const double split = std::norm(star.u_t[i]) + std::norm(star.u_r[i]);
      if (split > 1.0) {
        const double g = std::sqrt(1.0 / split);
        star.u_t[i] *= g;
        star.u_r[i] *= g;
      }
    }
  }
}

}  // namespace

RecoveryResult recover_rank_one(const LiftedStarMatrices& lifted,
                                const Beamformers& bf, const ChannelSet& ch,
                                const SystemConfig& cfg, double alpha,
                                int n_randomizations, std::uint64_t seed) {
  const int m = cfg.n_elements;
  const EigFactor ft = factor(lifted.u_t);
  const EigFactor fr = factor(lifted.u_r);
  Rng rng(seed);

  auto draw = [&](const EigFactor& f) {
    Eigen::VectorXcd zeta(m);
    for (int i = 0; i < m; ++i) zeta[i] = rng.cnormal();
    return Eigen::VectorXcd(f.half * zeta);
  };

  // amplitude profile of the relaxed solution; used to re-dress phase-only
  // candidates, which recovers better when the diagonal carries the power
  // structure
  Eigen::VectorXd amp_t(m), amp_r(m);
  for (int i = 0; i < m; ++i) {
    amp_t[i] = std::sqrt(std::max(lifted.u_t(i, i).real(), 0.0));
    amp_r[i] = std::sqrt(std::max(lifted.u_r(i, i).real(), 0.0));
  }
  auto redress = [&](const StarCoefficients& cand) {
    StarCoefficients out = cand;
    for (int i = 0; i < m; ++i) {
      const double at = std::abs(cand.u_t[i]);
      const double ar = std::abs(cand.u_r[i]);
      out.u_t[i] = at > 0 ? cand.u_t[i] / at * amp_t[i]
                          : std::complex<double>(amp_t[i], 0);
      out.u_r[i] = ar > 0 ? cand.u_r[i] / ar * amp_r[i]
                          : std::complex<double>(amp_r[i], 0);
    }
    return out;
  };

  RecoveryResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  StarCoefficients first_candidate;

  const int n_cand = 1 + std::max(n_randomizations, 0);
  for (int c = 0; c < n_cand; ++c) {
    StarCoefficients base;
    if (c == 0) {
      base.u_t = ft.principal;
      base.u_r = fr.principal;
    } else {
      base.u_t = draw(ft);
      base.u_r = draw(fr);
    }
    for (int variant = 0; variant < 2; ++variant) {
      StarCoefficients cand = variant == 0 ? base : redress(base);
      clip(cand, cfg);
      if (c == 0 && variant == 0) first_candidate = cand;
      const FeasibilityReport rep = check_feasibility(bf, cand, ch, cfg);
      if (rep.min_slack() < -1e-9) continue;
      const double obj =
          quadratic_transform_objective(alpha, bf, cand, ch, cfg);
      if (obj > best.objective) {
        best.objective = obj;
        best.star = cand;
        best.feasible = true;
        best.candidate_index = c;
        best.rate_slack = rep.rate_slack;
      }
    }
  }
  if (best.feasible) return best;

  // no candidate met the budget and rate floor: take the eigenvector
  // candidate, scale amplitudes until the amplification power fits, and
  // report the remaining rate violations
  StarCoefficients fallback = first_candidate;
  if (cfg.ris_mode == RisMode::active) {
    const double pa = p_act(bf, fallback, ch, cfg);
    if (pa > cfg.p_ris_max && pa > 0) {
      const double g = std::sqrt(cfg.p_ris_max / pa) * (1.0 - 1e-12);
      fallback.u_t *= g;
      fallback.u_r *= g;
    }
  }
  const FeasibilityReport rep = check_feasibility(bf, fallback, ch, cfg);
  RecoveryResult out;
  out.star = fallback;
  out.feasible = false;
  out.candidate_index = 0;
  out.objective = quadratic_transform_objective(alpha, bf, fallback, ch, cfg);
  out.rate_slack = rep.rate_slack;
  return out;
}

}  // namespace starris
