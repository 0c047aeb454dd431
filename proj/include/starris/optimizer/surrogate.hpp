// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

#include "starris/metrics.hpp"
#include "starris/types.hpp"

namespace starris {

// First-order lower bound of f(X, Y) = log2(1 + 1/(XY)) at (x0, y0):
//   f(X, Y) >= value(X, Y) = constant + dx (X - x0) + dy (Y - y0),
// valid globally on X, Y > 0 since f is jointly convex there, and tight at
// the anchor.
struct RateLowerBound {
  double x0 = 1, y0 = 1;
  double constant = 0;
  double dx = 0, dy = 0;

  double value(double x, double y) const {
    return constant + dx * (x - x0) + dy * (y - y0);
  }
};

inline RateLowerBound rate_lower_bound(double x_anchor, double y_anchor) {
  if (!(x_anchor > 0) || !(y_anchor > 0))
    throw std::invalid_argument("rate_lower_bound: anchors must be positive");
  RateLowerBound lb;
  lb.x0 = x_anchor;
  lb.y0 = y_anchor;
  lb.constant = std::log2(1.0 + 1.0 / (x_anchor * y_anchor));
  const double log2e = 1.0 / std::log(2.0);
  lb.dx = -log2e / (x_anchor + x_anchor * x_anchor * y_anchor);
  lb.dy = -log2e / (y_anchor + y_anchor * y_anchor * x_anchor);
  return lb;
}

// Expansion point of the successive approximation. Constructed from a
// feasible iterate so that 1/X_k = |H_k^H w_k|^2 and Y_k equals the
// interference-plus-noise power exactly, giving SINR_k = 1/(X_k Y_k).
struct SurrogateState {
  Eigen::MatrixXcd w_anchor;   // N x K
  Eigen::VectorXd x_anchor;    // K
  Eigen::VectorXd y_anchor;    // K
  double alpha = 0;

  static SurrogateState at_point(const Beamformers& bf,
                                 const StarCoefficients& star,
                                 const ChannelSet& ch, const SystemConfig& cfg,
                                 double alpha) {
    SurrogateState st;
    st.w_anchor = bf.w;
    st.alpha = alpha;
    st.x_anchor.resize(cfg.n_users);
    st.y_anchor.resize(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
      const Eigen::VectorXcd hk =
          cascaded_channel(ch.h[k], star.side(cfg.user_sides[k]), ch.g);
      const double num = std::norm(hk.dot(bf.w.col(k)));
      if (!(num > 0))
        throw std::domain_error(
            "SurrogateState: anchor has a zero-gain user; cannot expand");
      st.x_anchor[k] = 1.0 / num;
      st.y_anchor[k] = interference_noise_power(k, bf, star, ch, cfg);
    }
    return st;
  }
};

}  // namespace starris
