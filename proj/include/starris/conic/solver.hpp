// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "starris/conic/program.hpp"

namespace starris::conic {

// Standard-form cone program
//   minimize    c.x + c0
//   subject to  A x = b,   x in K,
// with K = R^{nf} x R^{nl}_+ x SOC(p_1) x ... x PSD(d_1) x ...
// PSD blocks use scaled svec storage (off-diagonals times sqrt(2)),
// column-major lower triangle.
struct ConeDims {
  int n_free = 0;
  int n_nonneg = 0;
  std::vector<int> soc;  // block dimensions
  std::vector<int> psd;  // matrix orders

  int psd_svec(int j) const { return psd[j] * (psd[j] + 1) / 2; }
  int total() const;
  // barrier degree: nl + (#soc) + sum d_j   (Euclidean pairing convention)
  int degree() const;
};

struct StandardForm {
  ConeDims dims;
  Eigen::VectorXd c;
  double c0 = 0.0;
  std::vector<std::vector<std::pair<int, double>>> rows;  // sparse A
  Eigen::VectorXd b;
};

struct IpmSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;  // primal point (already divided by tau when optimal)
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  SolverStats stats;
};

// Homogeneous self-dual primal-dual interior-point method with
// Nesterov-Todd scaling and a Mehrotra predictor-corrector.
IpmSolution solve_standard_form(const StandardForm& sf, const SolveOptions& opts);

// svec packing helpers shared by the solver and its tests
Eigen::VectorXd sym_to_svec(const Eigen::MatrixXd& a);
Eigen::MatrixXd svec_to_sym(const Eigen::VectorXd& v, int d);

}  // namespace starris::conic
