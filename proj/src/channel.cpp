// SPDX-License-Identifier: Apache-2.0
#include "starris/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "starris/rng.hpp"
#include "starris/units.hpp"

namespace starris {

void GeometryConfig::validate() const {
  if ((bs_position - ris_position).norm() <= 0.0)
    throw std::invalid_argument("GeometryConfig: BS and RIS positions coincide");
  if (!(user_drop_radius > 0.0))
    throw std::invalid_argument("GeometryConfig.user_drop_radius: must be > 0");
  if (!(pl_exp_bs_ris > 0.0) || !(pl_exp_ris_user > 0.0))
    throw std::invalid_argument("GeometryConfig: path-loss exponents must be > 0");
  if (ris_rows < 0) throw std::invalid_argument("GeometryConfig.ris_rows: must be >= 0");
}

double path_loss_amplitude(const GeometryConfig& geom, double distance_m,
                           double exponent) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("path_loss_amplitude: zero distance");
  const double pl0 = db_to_linear(geom.pl0_db);
  return std::sqrt(pl0 * std::pow(distance_m, -exponent));
}

std::pair<int, int> ris_grid(int m, int rows_hint) {
  if (rows_hint > 0) {
    if (m % rows_hint != 0)
      throw std::invalid_argument("ris_grid: rows hint does not divide M");
    return {rows_hint, m / rows_hint};
  }
  int rows = static_cast<int>(std::sqrt(static_cast<double>(m)));
  while (rows > 1 && m % rows != 0) --rows;
  return {rows, m / rows};
}

namespace {

// half-wavelength ULA steering toward direction cosine c
Eigen::VectorXcd ula_steering(int n, double cosine) {
  Eigen::VectorXcd a(n);
  for (int i = 0; i < n; ++i)
    a[i] = std::polar(1.0, M_PI * i * cosine);
  return a;
}

// Surface modeled as a rows x cols grid in the y-z plane at the RIS
// position; steering phase depends on the y and z direction cosines.
Eigen::VectorXcd upa_steering(int rows, int cols, const Eigen::Vector3d& dir) {
  Eigen::VectorXcd a(rows * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      a[r * cols + c] = std::polar(1.0, M_PI * (c * dir.y() + r * dir.z()));
  return a;
}

struct RicianWeights {
  double los, nlos;
};

RicianWeights rician_weights(double k_db) {
  if (std::isinf(k_db) && k_db > 0) return {1.0, 0.0};
  const double k = db_to_linear(k_db);
  return {std::sqrt(k / (1.0 + k)), std::sqrt(1.0 / (1.0 + k))};
}

}  // namespace

ChannelSet generate_channels(const GeometryConfig& geom,
                             const SystemConfig& cfg, std::uint64_t seed) {
  geom.validate();
  Rng rng(seed);
  const int n = cfg.n_antennas;
  const int m = cfg.n_elements;
  const auto [rows, cols] = ris_grid(m, geom.ris_rows);

  ChannelSet ch;
  // BS -> RIS
  {
    const Eigen::Vector3d d = geom.ris_position - geom.bs_position;
    const double dist = d.norm();
    const Eigen::Vector3d dir = d / dist;
    const double amp = path_loss_amplitude(geom, dist, geom.pl_exp_bs_ris);
    const RicianWeights wgt = rician_weights(geom.rician_k_db_bs_ris);
    const Eigen::VectorXcd a_ris = upa_steering(rows, cols, -dir);
    const Eigen::VectorXcd a_bs = ula_steering(n, dir.y());
    ch.g.resize(m, n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) {
        const std::complex<double> los = a_ris[r] * std::conj(a_bs[c]);
        ch.g(r, c) = amp * (wgt.los * los + wgt.nlos * rng.cnormal());
      }
  }
  // RIS -> users: uniform drop in a disc around the surface
  ch.h.resize(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    const double radius = geom.user_drop_radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * M_PI * rng.uniform();
    const Eigen::Vector3d user =
        geom.ris_position +
        Eigen::Vector3d(radius * std::cos(phi), radius * std::sin(phi), 0.0);
    const Eigen::Vector3d d = user - geom.ris_position;
    const double dist = std::max(d.norm(), 1e-6);
    const Eigen::Vector3d dir = d / dist;
    const double amp = path_loss_amplitude(geom, dist, geom.pl_exp_ris_user);
    const RicianWeights wgt = rician_weights(geom.rician_k_db_ris_user);
    const Eigen::VectorXcd a_ris = upa_steering(rows, cols, dir);
    ch.h[k].resize(m);
    for (int r = 0; r < m; ++r)
      ch.h[k][r] = amp * (wgt.los * a_ris[r] + wgt.nlos * rng.cnormal());
  }
  ch.validate(cfg);
  return ch;
}

namespace {

// uniform direction on the complex Frobenius sphere, scaled to target norm
void perturb(Eigen::MatrixXcd& a, double target_norm, Rng& rng) {
  if (target_norm <= 0.0) return;
  Eigen::MatrixXcd delta(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) delta(i, j) = rng.cnormal();
  const double nrm = delta.norm();
  if (nrm == 0.0) return;
  a += (target_norm / nrm) * delta;
}

}  // namespace

ChannelSet apply_csi_error(const ChannelSet& ch, CsiErrorMode mode,
                           double rho_c_max, std::uint64_t seed) {
  if (rho_c_max < 0.0)
    throw std::invalid_argument("apply_csi_error: rho_c_max must be >= 0");
  ChannelSet out = ch;
  if (rho_c_max == 0.0) return out;
  Rng rng(seed);
  const double rho_c =
      mode == CsiErrorMode::worst_case ? rho_c_max : rng.uniform(0.0, rho_c_max);
  perturb(out.g, rho_c * ch.g.norm(), rng);
  for (std::size_t k = 0; k < out.h.size(); ++k) {
    Eigen::MatrixXcd hk = out.h[k];
    perturb(hk, rho_c * ch.h[k].norm(), rng);
    out.h[k] = hk;
  }
  return out;
}

}  // namespace starris
