// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <complex>

#include "starris/channel.hpp"
#include "starris/metrics.hpp"
#include "starris/montecarlo.hpp"
#include "starris/units.hpp"
#include "test_util.hpp"

using namespace starris;
using testing::Instance;
using testing::random_instance;

TEST_CASE("dbm conversion is exact at reference points") {
  CHECK(dbm_to_watt(30.0) == 1.0);
  CHECK(dbm_to_watt(-110.0) == doctest::Approx(1e-14).epsilon(1e-15));
  CHECK(dbm_to_watt(10.0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(watt_to_dbm(1.0) == doctest::Approx(30.0));
}

TEST_CASE("config validation rejects out-of-range fields") {
  SystemConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  SystemConfig bad = cfg;
  bad.sigma2 = 0.0;  // degenerate noise must be rejected at load
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.kappa_b = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.rho_max = 0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.user_sides.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(cfg.p_max() == doctest::Approx(3.8));
}

TEST_CASE("cascaded channel: identity and zero chains") {
  Eigen::VectorXcd h(1), u(1);
  Eigen::MatrixXcd g(1, 1);
  h << 1.0;
  u << 1.0;
  g << 1.0;
  CHECK(cascaded_channel(h, u, g)(0) == std::complex<double>(1.0, 0.0));
  u << 0.0;
  CHECK(std::abs(cascaded_channel(h, u, g)(0)) == 0.0);
}

TEST_CASE("cascaded channel matches an explicit triple product") {
  Rng rng(7);
  const int m = 4, n = 2;
  const Eigen::MatrixXcd g = testing::random_matrix(m, n, rng);
  const Eigen::VectorXcd h = testing::random_vector(m, rng);
  const Eigen::VectorXcd u = testing::random_vector(m, rng);
  // independent dense route: H^H = h^H diag(u^H) G
  const Eigen::MatrixXcd theta = u.conjugate().asDiagonal();
  const Eigen::RowVectorXcd hh = h.adjoint() * theta * g;
  const Eigen::VectorXcd via_op = cascaded_channel(h, u, g);
  CHECK((via_op.adjoint() - hh).norm() <= 1e-12);
}

TEST_CASE("interference power: ideal single user reduces to sigma2") {
  Instance ins = random_instance(4, 8, 1, 0.0, 3);
  ins.cfg.kappa_b = ins.cfg.kappa_u = 0.0;
  ins.cfg.sigma_a2 = 0.0;
  CHECK(interference_noise_power(0, ins.bf, ins.star, ins.ch, ins.cfg) ==
        doctest::Approx(ins.cfg.sigma2).epsilon(1e-12));
}

TEST_CASE("interference power: scalar closed form") {
  Instance ins = random_instance(1, 1, 1, 0.0, 4);
  ins.ch.g(0, 0) = 1.0;
  ins.ch.h[0](0) = 1.0;
  ins.star.u_t(0) = 1.0;
  ins.star.u_r(0) = 1.0;
  const double p = 0.37;
  ins.bf.w(0, 0) = std::sqrt(p);
  ins.cfg.kappa_b = 0.03;
  ins.cfg.kappa_u = 0.05;
  const double expected =
      ins.cfg.kappa_u * p + (1 + ins.cfg.kappa_u) * ins.cfg.kappa_b * p +
      (1 + ins.cfg.kappa_u) * (ins.cfg.sigma_a2 + ins.cfg.sigma2);
  CHECK(interference_noise_power(0, ins.bf, ins.star, ins.ch, ins.cfg) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sinr scalar ideal case and zero beamformer") {
  Instance ins = random_instance(1, 1, 1, 0.0, 5);
  ins.ch.g(0, 0) = 1.0;
  ins.ch.h[0](0) = 1.0;
  ins.star.u_t(0) = 1.0;
  ins.star.u_r(0) = 1.0;
  ins.cfg.sigma_a2 = 0.0;
  const double p = 0.8;
  ins.bf.w(0, 0) = std::sqrt(p);
  CHECK(sinr(0, ins.bf, ins.star, ins.ch, ins.cfg) ==
        doctest::Approx(p / ins.cfg.sigma2).epsilon(1e-12));
  ins.bf.w(0, 0) = 0.0;
  CHECK(sinr(0, ins.bf, ins.star, ins.ch, ins.cfg) == 0.0);
}

TEST_CASE("rates: unit SINR gives one bit, SE sums per-user rates") {
  Instance ins = random_instance(4, 8, 4, 0.02, 6);
  double sum = 0;
  for (int k = 0; k < 4; ++k) sum += rate(k, ins.bf, ins.star, ins.ch, ins.cfg);
  CHECK(system_se(ins.bf, ins.star, ins.ch, ins.cfg) ==
        doctest::Approx(sum).epsilon(1e-12));
  CHECK(std::log2(1.0 + 1.0) == 1.0);
}

TEST_CASE("powers: all-off point and paper circuit numbers") {
  SystemConfig cfg;
  ChannelSet ch;
  Rng rng(8);
  ch.g = testing::random_matrix(cfg.n_elements, cfg.n_antennas, rng);
  ch.h.assign(cfg.n_users, testing::random_vector(cfg.n_elements, rng));
  const Beamformers bf = Beamformers::zero(cfg.n_antennas, cfg.n_users);
  const StarCoefficients star = StarCoefficients::zero(cfg.n_elements);
  CHECK(p_act(bf, star, ch, cfg) == 0.0);
  // P_r = 10 dBm, P_c = 30 dBm, M = 30 -> 1.3 W with everything silent
  CHECK(p_tot(bf, star, ch, cfg) == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("p_act equals a literal evaluation of its defining expression") {
  Instance ins = random_instance(3, 5, 2, 0.04, 9);
  const auto& cfg = ins.cfg;
  // independent route with explicit diagonal matrices
  double expect = 0.0;
  Eigen::MatrixXcd wsum = Eigen::MatrixXcd::Zero(cfg.n_antennas, cfg.n_antennas);
  for (int k = 0; k < cfg.n_users; ++k)
    wsum += diag_only(ins.bf.w.col(k) * ins.bf.w.col(k).adjoint());
  for (Side s : {Side::transmission, Side::reflection}) {
    const Eigen::MatrixXcd theta = ins.star.side(s).conjugate().asDiagonal();
    for (int k = 0; k < cfg.n_users; ++k)
      expect += (theta * ins.ch.g * ins.bf.w.col(k)).squaredNorm();
    expect += cfg.kappa_b *
              (theta * ins.ch.g * wsum * ins.ch.g.adjoint() * theta.adjoint())
                  .trace()
                  .real();
    expect += cfg.sigma_a2 * theta.squaredNorm();
  }
  CHECK(p_act(ins.bf, ins.star, ins.ch, cfg) ==
        doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("efficiency metrics recompose") {
  Instance ins = random_instance(4, 8, 4, 0.02, 10);
  const MetricsReport rep = efficiency_metrics(ins.bf, ins.star, ins.ch, ins.cfg);
  CHECK(rep.se == doctest::Approx(rep.per_user_rate.sum()).epsilon(1e-12));
  CHECK(rep.ee == doctest::Approx(ins.cfg.bandwidth * rep.se / rep.p_tot).epsilon(1e-12));
  CHECK(rep.re ==
        doctest::Approx(rep.se / rep.p_tot +
                        ins.cfg.omega * rep.se / ins.cfg.p_max())
            .epsilon(1e-12));

  const Beamformers off = Beamformers::zero(ins.cfg.n_antennas, ins.cfg.n_users);
  const MetricsReport silent = efficiency_metrics(off, ins.star, ins.ch, ins.cfg);
  CHECK(silent.se == 0.0);
  CHECK(silent.ee == 0.0);
  CHECK(silent.re == 0.0);
}

TEST_CASE("feasibility report flags rate violations at the silent point") {
  Instance ins = random_instance(4, 8, 4, 0.02, 11);
  const Beamformers off = Beamformers::zero(ins.cfg.n_antennas, ins.cfg.n_users);
  const StarCoefficients star0 = StarCoefficients::zero(ins.cfg.n_elements);
  const FeasibilityReport rep = check_feasibility(off, star0, ins.ch, ins.cfg);
  CHECK(rep.bs_power_slack >= 0);
  CHECK(rep.ris_power_slack >= 0);
  CHECK(rep.coeff_slack >= 0);
  for (int k = 0; k < ins.cfg.n_users; ++k) CHECK(rep.rate_slack[k] < 0);

  StarCoefficients full = star0;
  full.u_t.setConstant(std::sqrt(ins.cfg.rho_max));
  full.u_r.setConstant(std::sqrt(ins.cfg.rho_max));
  const FeasibilityReport bd = check_feasibility(off, full, ins.ch, ins.cfg);
  CHECK(bd.coeff_slack == doctest::Approx(0.0));
}

TEST_CASE("diag_only identity b^H diag(aa^H) b = a^H diag(bb^H) a") {
  Rng rng(12);
  // vector form, the one the power reformulation relies on
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXcd w = testing::random_vector(5, rng);
    const Eigen::VectorXcd h = testing::random_vector(5, rng);
    const double lhs =
        (h.adjoint() * diag_only(w * w.adjoint()) * h).value().real();
    const double rhs =
        (w.adjoint() * diag_only(h * h.adjoint()) * w).value().real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // trace form for matrix arguments
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXcd a = testing::random_matrix(6, 3, rng);
    const Eigen::MatrixXcd b = testing::random_matrix(6, 4, rng);
    const double lhs =
        (b.adjoint() * diag_only(a * a.adjoint()) * b).trace().real();
    const double rhs =
        (a.adjoint() * diag_only(b * b.adjoint()) * a).trace().real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("monte carlo sinr: determinism and degenerate-noise limit") {
  Instance ins = random_instance(2, 4, 1, 0.0, 13);
  ins.cfg.kappa_b = ins.cfg.kappa_u = 0.0;
  ins.cfg.sigma_a2 = 0.0;
  const auto a = monte_carlo_sinr(0, ins.bf, ins.star, ins.ch, ins.cfg, 20000, 99);
  const auto b = monte_carlo_sinr(0, ins.bf, ins.star, ins.ch, ins.cfg, 20000, 99);
  CHECK(a.sinr == b.sinr);
  CHECK(a.std_error == b.std_error);
  const double closed = sinr(0, ins.bf, ins.star, ins.ch, ins.cfg);
  CHECK(a.sinr == doctest::Approx(closed).epsilon(0.05));
}

TEST_CASE("monte carlo sinr agrees with the closed form within 3 sigma") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    Instance ins = random_instance(4, 8, 4, 0.02, seed);
    const double closed = sinr(1, ins.bf, ins.star, ins.ch, ins.cfg);
    const auto est =
        monte_carlo_sinr(1, ins.bf, ins.star, ins.ch, ins.cfg, 200000, seed + 1);
    CHECK(std::abs(est.sinr - closed) <= 3.0 * est.std_error);
    const double inp = interference_noise_power(1, ins.bf, ins.star, ins.ch, ins.cfg);
    CHECK(est.noise_power == doctest::Approx(inp).epsilon(0.03));
  }
}

TEST_CASE("sinr is non-increasing in the impairment levels") {
  for (std::uint64_t seed = 40; seed < 50; ++seed) {
    Instance ins = random_instance(4, 8, 4, 0.0, seed);
    double prev = std::numeric_limits<double>::infinity();
    for (double kappa : {0.0, 0.02, 0.1}) {
      ins.cfg.kappa_b = kappa;
      ins.cfg.kappa_u = kappa;
      const double v = sinr(0, ins.bf, ins.star, ins.ch, ins.cfg);
      CHECK(v <= prev * (1 + 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("sinr signals a degenerate zero denominator") {
  Instance ins = random_instance(1, 1, 1, 0.0, 130);
  ins.cfg.kappa_b = ins.cfg.kappa_u = 0.0;
  ins.cfg.sigma2 = 0.0;  // bypasses validate() on purpose
  ins.cfg.sigma_a2 = 0.0;
  CHECK_THROWS_AS(sinr(0, ins.bf, ins.star, ins.ch, ins.cfg),
                  std::domain_error);
}
