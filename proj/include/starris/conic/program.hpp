// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace starris::conic {

enum class SolveStatus {
  optimal,
  infeasible,
  unbounded,
  numerical_failure,
  iteration_limit,
};

const char* to_string(SolveStatus s);

// Handle to a scalar decision variable.
struct VarId {
  int index = -1;
  bool valid() const { return index >= 0; }
};

// Handle to a symmetric PSD matrix variable. Hermitian MxM complex
// variables are hosted as their real symmetric 2Mx2M embedding (see
// embed.hpp); the builder owns the 1/2 trace-scaling that implies.
struct PsdVar {
  int block = -1;
  int dim = 0;
  bool valid() const { return block >= 0; }
};

// Sparse affine expression over decision-variable coordinates.
class LinExpr {
 public:
  LinExpr() = default;
  /*implicit*/ LinExpr(double constant) : constant_(constant) {}
  /*implicit*/ LinExpr(VarId v) { terms_.emplace_back(v.index, 1.0); }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);
  void add_term(int coord, double coef) { terms_.emplace_back(coord, coef); }

  double constant() const { return constant_; }
  // combined duplicate-free terms, sorted by coordinate
  std::vector<std::pair<int, double>> collect() const;

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);
LinExpr operator*(LinExpr a, double s);
LinExpr operator-(LinExpr a);

struct SolveOptions {
  double tol = 1e-8;    // relative accuracy (feasibility and duality gap)
  int max_iters = 200;
  int verbosity = 0;
};

struct SolverStats {
  int iterations = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double gap = 0;
  double seconds = 0;
};

class Solution {
 public:
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = 0;  // in the program's maximize sense
  SolverStats stats;

  double value(VarId v) const { return coord_values_.at(v.index); }
  double value(const LinExpr& e) const;
  const Eigen::MatrixXd& value(PsdVar p) const { return psd_values_.at(p.block); }

  bool optimal() const { return status == SolveStatus::optimal; }

 private:
  friend class ConicProgram;
  std::vector<double> coord_values_;
  std::vector<Eigen::MatrixXd> psd_values_;
};

// Solver-agnostic conic program: scalar and PSD-matrix variables, linear
// maximize objective, and {equality, inequality, SOC, rotated-SOC, PSD}
// constraints. PSD membership of matrix variables is implicit.
class ConicProgram {
 public:
  VarId scalar(std::string name);
  VarId nonneg_scalar(std::string name);
  PsdVar psd_matrix(std::string name, int dim);

  // X(i,j) of a PSD matrix variable as an expression
  LinExpr entry(PsdVar p, int i, int j) const;
  // <A, X> for symmetric A
  LinExpr trace_product(PsdVar p, const Eigen::MatrixXd& a) const;

  void add_eq(const LinExpr& lhs, const LinExpr& rhs = LinExpr(0.0));
  void add_le(const LinExpr& lhs, const LinExpr& rhs);  // lhs <= rhs
  void add_ge(const LinExpr& lhs, const LinExpr& rhs);  // lhs >= rhs
  // ||x||_2 <= t
  void add_soc(const LinExpr& t, std::vector<LinExpr> x);
  // 2 a b >= ||x||^2, a >= 0, b >= 0
  void add_rsoc(const LinExpr& a, const LinExpr& b, std::vector<LinExpr> x);

  void maximize(const LinExpr& objective);

  Solution solve(const SolveOptions& opts = {}) const;

  // Independent re-evaluation of every modeled constraint at a solution;
  // entries are violation magnitudes (0 when satisfied).
  std::vector<double> constraint_violations(const Solution& sol) const;
  double max_violation(const Solution& sol) const;

  // documented text dump: variables, cones and sparse triplets
  void dump(std::ostream& os) const;

  int num_constraints() const { return static_cast<int>(constraints_.size()); }

 private:
  struct Column {
    enum class Kind { free_scalar, nonneg_scalar, psd_coord } kind;
    int psd_block = -1;
    int svec_index = -1;
    std::string name;
  };
  struct PsdBlock {
    int dim = 0;
    int first_coord = 0;
    std::string name;
  };
  struct Constraint {
    enum class Kind { eq, le, soc, rsoc } kind;
    LinExpr expr;  // eq: expr == 0; le: expr <= 0
    LinExpr a, b;  // soc: a = t; rsoc: the two nonneg factors
    std::vector<LinExpr> x;
  };

  int svec_coord(PsdVar p, int i, int j) const;

  std::vector<Column> columns_;
  std::vector<PsdBlock> psd_blocks_;
  std::vector<Constraint> constraints_;
  LinExpr objective_;
  bool have_objective_ = false;
};

}  // namespace starris::conic
