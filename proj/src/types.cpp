// SPDX-License-Identifier: Apache-2.0
#include "starris/types.hpp"

#include <stdexcept>

namespace starris {

int SystemConfig::users_on(Side s) const {
  int n = 0;
  for (Side us : user_sides)
    if (us == s) ++n;
  return n;
}

namespace {
[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument("SystemConfig." + field + ": " + what);
}
}  // namespace

void SystemConfig::validate() const {
  if (n_antennas < 1) fail("n_antennas", "must be >= 1");
  if (n_elements < 1) fail("n_elements", "must be >= 1");
  if (n_users < 1) fail("n_users", "must be >= 1");
  if (static_cast<int>(user_sides.size()) != n_users)
    fail("user_sides", "must label every user exactly once");
  if (!(kappa_b >= 0.0 && kappa_b < 1.0)) fail("kappa_b", "must be in [0,1)");
  if (!(kappa_u >= 0.0 && kappa_u < 1.0)) fail("kappa_u", "must be in [0,1)");
  if (ris_mode == RisMode::active && !(rho_max > 1.0))
    fail("rho_max", "must be > 1 for an active surface");
  if (!(p_bs_max >= 0)) fail("p_bs_max", "must be >= 0");
  if (!(p_ris_max >= 0)) fail("p_ris_max", "must be >= 0");
  if (!(r_min >= 0)) fail("r_min", "must be >= 0");
  // every SINR denominator must be strictly positive
  if (!(sigma2 > 0)) fail("sigma2", "must be > 0");
  if (!(sigma_a2 >= 0)) fail("sigma_a2", "must be >= 0");
  if (ris_mode == RisMode::passive && sigma_a2 != 0.0)
    fail("sigma_a2", "must be 0 for a passive surface");
  if (!(xi > 0.0 && xi <= 1.0)) fail("xi", "must be in (0,1]");
  if (!(p_r >= 0)) fail("p_r", "must be >= 0");
  if (!(p_c >= 0)) fail("p_c", "must be >= 0");
  if (!(bandwidth > 0)) fail("bandwidth", "must be > 0");
  if (!(omega >= 0)) fail("omega", "must be >= 0");
  if (!(epsilon > 0)) fail("epsilon", "must be > 0");
  if (!(inner_tol > 0)) fail("inner_tol", "must be > 0");
  if (!(p_max() > 0)) fail("p_max", "derived power budget must be > 0");
}

void ChannelSet::validate(const SystemConfig& cfg) const {
  if (g.rows() != cfg.n_elements || g.cols() != cfg.n_antennas)
    throw std::invalid_argument("ChannelSet.g: dimension mismatch");
  if (static_cast<int>(h.size()) != cfg.n_users)
    throw std::invalid_argument("ChannelSet.h: need one vector per user");
  for (const auto& hk : h)
    if (hk.size() != cfg.n_elements)
      throw std::invalid_argument("ChannelSet.h: dimension mismatch");
  if (!g.allFinite()) throw std::invalid_argument("ChannelSet.g: non-finite entries");
  for (const auto& hk : h)
    if (!hk.allFinite())
      throw std::invalid_argument("ChannelSet.h: non-finite entries");
}

}  // namespace starris
