// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "starris/conic/embed.hpp"
#include "starris/conic/program.hpp"
#include "starris/rng.hpp"
#include "test_util.hpp"

using namespace starris;
using namespace starris::conic;

TEST_CASE("hermitian embedding: round trip, PSD order and trace identity") {
  Rng rng(31);
  const int m = 5;
  Eigen::MatrixXcd a = testing::random_matrix(m, m, rng);
  a = (a + a.adjoint()).eval();
  Eigen::MatrixXcd b = testing::random_matrix(m, m, rng);
  b = (b * b.adjoint()).eval();  // PSD

  const Eigen::MatrixXd ea = hermitian_embed(a);
  const Eigen::MatrixXd eb = hermitian_embed(b);
  CHECK((hermitian_unembed(ea) - a).norm() == 0.0);
  CHECK((ea - ea.transpose()).norm() == 0.0);

  // identity: embed(I) = I
  CHECK((hermitian_embed(Eigen::MatrixXcd::Identity(m, m)) -
         Eigen::MatrixXd::Identity(2 * m, 2 * m))
            .norm() == 0.0);

  // eigenvalues duplicated
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esc(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esr(ea);
  for (int i = 0; i < m; ++i) {
    CHECK(esr.eigenvalues()[2 * i] ==
          doctest::Approx(esc.eigenvalues()[i]).epsilon(1e-10));
    CHECK(esr.eigenvalues()[2 * i + 1] ==
          doctest::Approx(esc.eigenvalues()[i]).epsilon(1e-10));
  }
  CHECK(esr.eigenvalues().minCoeff() * esc.eigenvalues().minCoeff() >= 0);

  // tr(embed(A) embed(B)) = 2 Re tr(A B)
  const double lhs = (ea * eb).trace();
  const double rhs = 2.0 * (a * b).trace().real();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  Eigen::MatrixXcd not_herm = testing::random_matrix(m, m, rng);
  CHECK_THROWS_AS(hermitian_embed(not_herm), std::invalid_argument);

  // skew-Hermitian-free check on a purely imaginary off-diagonal matrix
  Eigen::MatrixXcd j2(2, 2);
  j2 << 0.0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esj(hermitian_embed(j2));
  CHECK(esj.eigenvalues()[0] == doctest::Approx(-1.0));
  CHECK(esj.eigenvalues()[3] == doctest::Approx(1.0));
}

TEST_CASE("trivial LP: max t subject to t <= 1") {
  ConicProgram p;
  const VarId t = p.scalar("t");
  p.add_le(t, 1.0);
  p.maximize(t);
  const Solution s = p.solve();
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.value(t) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(p.max_violation(s) <= 1e-7);
}

TEST_CASE("rotated SOC: max t with t^2 <= y, y = 4") {
  ConicProgram p;
  const VarId t = p.scalar("t");
  const VarId y = p.scalar("y");
  p.add_eq(y, 4.0);
  p.add_rsoc(y, LinExpr(0.5), {LinExpr(t)});
  p.maximize(t);
  const Solution s = p.solve();
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.value(t) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("inverse constraint via rotated SOC: min x with 4x >= 1") {
  ConicProgram p;
  const VarId x = p.nonneg_scalar("x");
  p.add_rsoc(x, LinExpr(4.0), {LinExpr(M_SQRT2)});
  p.maximize(-1.0 * LinExpr(x));
  const Solution s = p.solve();
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.value(x) == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("2x2 PSD block with active diagonal bound") {
  ConicProgram p;
  const PsdVar u = p.psd_matrix("U", 2);
  const double rho_max = 5.0;
  p.add_le(p.entry(u, 0, 0), rho_max);
  p.add_le(p.entry(u, 1, 1), rho_max);
  p.maximize(p.entry(u, 0, 0) + p.entry(u, 1, 1));
  const Solution s = p.solve();
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(10.0).epsilon(1e-7));
  CHECK(p.max_violation(s) <= 1e-6);
}

TEST_CASE("SOC projection: max c.x subject to ||x|| <= 1") {
  Rng rng(32);
  for (int rep = 0; rep < 3; ++rep) {
    const int n = 5;
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c[i] = rng.normal();
    ConicProgram p;
    std::vector<VarId> x;
    std::vector<LinExpr> xe;
    LinExpr obj;
    for (int i = 0; i < n; ++i) {
      x.push_back(p.scalar("x" + std::to_string(i)));
      xe.emplace_back(x.back());
      obj += c[i] * LinExpr(x.back());
    }
    p.add_soc(LinExpr(1.0), xe);
    p.maximize(obj);
    const Solution s = p.solve();
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(c.norm()).epsilon(1e-6));
    for (int i = 0; i < n; ++i)
      CHECK(s.value(x[i]) == doctest::Approx(c[i] / c.norm()).epsilon(1e-5));
  }
}

TEST_CASE("random SDP: max <C,X> with tr X = 1 equals lambda_max") {
  Rng rng(33);
  for (int rep = 0; rep < 3; ++rep) {
    const int d = 6;
    Eigen::MatrixXd c(d, d);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) c(i, j) = rng.normal();
    c = (0.5 * (c + c.transpose())).eval();
    ConicProgram p;
    const PsdVar xv = p.psd_matrix("X", d);
    p.add_eq(p.trace_product(xv, Eigen::MatrixXd::Identity(d, d)), 1.0);
    p.maximize(p.trace_product(xv, c));
    const Solution s = p.solve();
    REQUIRE(s.status == SolveStatus::optimal);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    CHECK(s.objective ==
          doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-6));
    CHECK(p.max_violation(s) <= 1e-6);
  }
}

TEST_CASE("mixed SOC and PSD blocks in one program") {
  ConicProgram p;
  const VarId u = p.scalar("u");
  const VarId v = p.scalar("v");
  const PsdVar x = p.psd_matrix("X", 2);
  p.add_soc(LinExpr(1.0), {LinExpr(u), LinExpr(v)});
  p.add_le(p.entry(x, 0, 0), 1.0);
  p.add_le(p.entry(x, 1, 1), 1.0);
  p.maximize(2.0 * LinExpr(u) +
             p.trace_product(x, Eigen::MatrixXd::Identity(2, 2)));
  const Solution s = p.solve();
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(s.value(u) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("infeasible and unbounded detection") {
  {
    ConicProgram p;
    const VarId x = p.scalar("x");
    p.add_ge(x, 1.0);
    p.add_le(x, 0.0);
    p.maximize(x);
    CHECK(p.solve().status == SolveStatus::infeasible);
  }
  {
    ConicProgram p;
    const VarId x = p.scalar("x");
    p.add_ge(x, 1.0);
    p.maximize(x);
    CHECK(p.solve().status == SolveStatus::unbounded);
  }
}

TEST_CASE("solution certificates: residuals stay within 10x tolerance") {
  // a structured program resembling one AO subproblem in miniature
  Rng rng(34);
  ConicProgram p;
  const VarId y = p.nonneg_scalar("y");
  const VarId t = p.nonneg_scalar("t");
  std::vector<VarId> w;
  std::vector<LinExpr> we;
  for (int i = 0; i < 4; ++i) {
    w.push_back(p.scalar("w" + std::to_string(i)));
    we.emplace_back(w.back());
  }
  p.add_soc(LinExpr(1.0), we);                 // ||w|| <= 1
  p.add_rsoc(y, LinExpr(0.5), {LinExpr(t)});   // t^2 <= y
  LinExpr sum;
  for (const auto& e : we) sum += e;
  p.add_le(y, sum + 4.0);
  p.maximize(2.0 * LinExpr(t) - 0.1 * LinExpr(y) + sum);
  const SolveOptions opts{1e-9, 200, 0};
  const Solution s = p.solve(opts);
  REQUIRE(s.status == SolveStatus::optimal);
  for (double viol : p.constraint_violations(s)) CHECK(viol <= 10 * 1e-8);
  CHECK(s.stats.iterations < 200);
}

TEST_CASE("program dump is self-describing text") {
  ConicProgram p;
  const VarId t = p.scalar("t");
  const PsdVar x = p.psd_matrix("X", 2);
  p.add_le(p.entry(x, 0, 0), 1.0);
  p.add_soc(LinExpr(1.0), {LinExpr(t)});
  p.maximize(LinExpr(t) + p.entry(x, 0, 0));
  std::ostringstream os;
  p.dump(os);
  const std::string text = os.str();
  CHECK(text.find("cols") != std::string::npos);
  CHECK(text.find("maximize") != std::string::npos);
  CHECK(text.find("psd") != std::string::npos);
  CHECK(text.find("soc") != std::string::npos);
}
