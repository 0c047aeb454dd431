// SPDX-License-Identifier: Apache-2.0
#include "starris/conic/program.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "starris/conic/solver.hpp"

namespace starris::conic {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  constant_ += o.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& [c, v] : o.terms_) terms_.emplace_back(c, -v);
  constant_ -= o.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  for (auto& [c, v] : terms_) v *= s;
  constant_ *= s;
  return *this;
}

std::vector<std::pair<int, double>> LinExpr::collect() const {
  std::map<int, double> acc;
  for (const auto& [c, v] : terms_) acc[c] += v;
  std::vector<std::pair<int, double>> out;
  out.reserve(acc.size());
  for (const auto& [c, v] : acc)
    if (v != 0.0) out.emplace_back(c, v);
  return out;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator*(LinExpr a, double s) { return a *= s; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }

double Solution::value(const LinExpr& e) const {
  double v = e.constant();
  for (const auto& [c, coef] : e.collect()) v += coef * coord_values_.at(c);
  return v;
}

VarId ConicProgram::scalar(std::string name) {
  columns_.push_back({Column::Kind::free_scalar, -1, -1, std::move(name)});
  return {static_cast<int>(columns_.size()) - 1};
}

VarId ConicProgram::nonneg_scalar(std::string name) {
  columns_.push_back({Column::Kind::nonneg_scalar, -1, -1, std::move(name)});
  return {static_cast<int>(columns_.size()) - 1};
}

PsdVar ConicProgram::psd_matrix(std::string name, int dim) {
  if (dim < 1) throw std::invalid_argument("psd_matrix: dim must be >= 1");
  const int block = static_cast<int>(psd_blocks_.size());
  PsdBlock pb;
  pb.dim = dim;
  pb.first_coord = static_cast<int>(columns_.size());
  pb.name = std::move(name);
  for (int j = 0; j < dim; ++j)
    for (int i = j; i < dim; ++i)
      columns_.push_back({Column::Kind::psd_coord, block,
                          pb.first_coord /*unused*/, pb.name});
  // fix svec indices
  int idx = 0;
  for (int c = pb.first_coord; c < static_cast<int>(columns_.size()); ++c)
    columns_[c].svec_index = idx++;
  psd_blocks_.push_back(pb);
  return {block, dim};
}

int ConicProgram::svec_coord(PsdVar p, int i, int j) const {
  const PsdBlock& pb = psd_blocks_.at(p.block);
  if (i < 0 || j < 0 || i >= pb.dim || j >= pb.dim)
    throw std::invalid_argument("psd entry out of range");
  if (i < j) std::swap(i, j);
  const int idx = j * pb.dim - j * (j - 1) / 2 + (i - j);
  return pb.first_coord + idx;
}

LinExpr ConicProgram::entry(PsdVar p, int i, int j) const {
  LinExpr e;
  e.add_term(svec_coord(p, i, j), i == j ? 1.0 : M_SQRT1_2);
  return e;
}

LinExpr ConicProgram::trace_product(PsdVar p, const Eigen::MatrixXd& a) const {
  const PsdBlock& pb = psd_blocks_.at(p.block);
  if (a.rows() != pb.dim || a.cols() != pb.dim)
    throw std::invalid_argument("trace_product: dimension mismatch");
  LinExpr e;
  for (int j = 0; j < pb.dim; ++j) {
    e.add_term(svec_coord(p, j, j), a(j, j));
    for (int i = j + 1; i < pb.dim; ++i) {
      const double sym = 0.5 * (a(i, j) + a(j, i));
      if (sym != 0.0) e.add_term(svec_coord(p, i, j), M_SQRT2 * sym);
    }
  }
  return e;
}

void ConicProgram::add_eq(const LinExpr& lhs, const LinExpr& rhs) {
  Constraint c;
  c.kind = Constraint::Kind::eq;
  c.expr = lhs - rhs;
  constraints_.push_back(std::move(c));
}

void ConicProgram::add_le(const LinExpr& lhs, const LinExpr& rhs) {
  Constraint c;
  c.kind = Constraint::Kind::le;
  c.expr = lhs - rhs;
  constraints_.push_back(std::move(c));
}

void ConicProgram::add_ge(const LinExpr& lhs, const LinExpr& rhs) {
  add_le(rhs, lhs);
}

void ConicProgram::add_soc(const LinExpr& t, std::vector<LinExpr> x) {
  Constraint c;
  c.kind = Constraint::Kind::soc;
  c.a = t;
  c.x = std::move(x);
  constraints_.push_back(std::move(c));
}

void ConicProgram::add_rsoc(const LinExpr& a, const LinExpr& b,
                            std::vector<LinExpr> x) {
  Constraint c;
  c.kind = Constraint::Kind::rsoc;
  c.a = a;
  c.b = b;
  c.x = std::move(x);
  constraints_.push_back(std::move(c));
}

void ConicProgram::maximize(const LinExpr& objective) {
  objective_ = objective;
  have_objective_ = true;
}

Solution ConicProgram::solve(const SolveOptions& opts) const {
  if (!have_objective_)
    throw std::logic_error("ConicProgram::solve: no objective set");

  StandardForm sf;
  const int ncols_model = static_cast<int>(columns_.size());

  // column layout: [free][nonneg declared + inequality slacks][soc][psd]
  int n_free = 0, n_nonneg = 0;
  for (const auto& col : columns_) {
    if (col.kind == Column::Kind::free_scalar) ++n_free;
    if (col.kind == Column::Kind::nonneg_scalar) ++n_nonneg;
  }
  int n_slack = 0;
  for (const auto& c : constraints_)
    if (c.kind == Constraint::Kind::le) ++n_slack;

  sf.dims.n_free = n_free;
  sf.dims.n_nonneg = n_nonneg + n_slack;
  for (const auto& c : constraints_) {
    if (c.kind == Constraint::Kind::soc)
      sf.dims.soc.push_back(1 + static_cast<int>(c.x.size()));
    if (c.kind == Constraint::Kind::rsoc)
      sf.dims.soc.push_back(2 + static_cast<int>(c.x.size()));
  }
  for (const auto& pb : psd_blocks_) sf.dims.psd.push_back(pb.dim);

  // model coordinate -> standard-form column
  std::vector<int> col_of(ncols_model, -1);
  {
    int f = 0, l = 0;
    const int lp_base = n_free;
    int psd_base = n_free + n_nonneg + n_slack;
    for (int s : sf.dims.soc) psd_base += s;
    std::vector<int> psd_off(psd_blocks_.size());
    {
      int off = psd_base;
      for (std::size_t bidx = 0; bidx < psd_blocks_.size(); ++bidx) {
        psd_off[bidx] = off;
        off += psd_blocks_[bidx].dim * (psd_blocks_[bidx].dim + 1) / 2;
      }
    }
    for (int id = 0; id < ncols_model; ++id) {
      const auto& col = columns_[id];
      switch (col.kind) {
        case Column::Kind::free_scalar: col_of[id] = f++; break;
        case Column::Kind::nonneg_scalar: col_of[id] = lp_base + l++; break;
        case Column::Kind::psd_coord:
          col_of[id] = psd_off[col.psd_block] + col.svec_index;
          break;
      }
    }
  }
  const int ntot = sf.dims.total();

  auto push_row = [&sf](std::vector<std::pair<int, double>> row, double rhs) {
    sf.rows.push_back(std::move(row));
    sf.b.conservativeResize(sf.rows.size());
    sf.b[sf.rows.size() - 1] = rhs;
  };
  auto mapped_terms = [&](const LinExpr& e) {
    std::vector<std::pair<int, double>> out;
    for (const auto& [c, v] : e.collect()) out.emplace_back(col_of[c], v);
    return out;
  };

  int slack_cursor = n_free + n_nonneg;
  int soc_cursor = n_free + n_nonneg + n_slack;
  for (const auto& c : constraints_) {
    switch (c.kind) {
      case Constraint::Kind::eq:
        push_row(mapped_terms(c.expr), -c.expr.constant());
        break;
      case Constraint::Kind::le: {
        auto row = mapped_terms(c.expr);
        row.emplace_back(slack_cursor++, 1.0);
        push_row(std::move(row), -c.expr.constant());
        break;
      }
      case Constraint::Kind::soc: {
        const int q0 = soc_cursor;
        // q0 = t;  q_{1+i} = x_i
        auto row = mapped_terms(c.a);
        for (auto& [cc, v] : row) v = -v;
        row.emplace_back(q0, 1.0);
        push_row(std::move(row), c.a.constant());
        for (std::size_t i = 0; i < c.x.size(); ++i) {
          auto r = mapped_terms(c.x[i]);
          for (auto& [cc, v] : r) v = -v;
          r.emplace_back(q0 + 1 + static_cast<int>(i), 1.0);
          push_row(std::move(r), c.x[i].constant());
        }
        soc_cursor += 1 + static_cast<int>(c.x.size());
        break;
      }
      case Constraint::Kind::rsoc: {
        // (a+b, a-b, sqrt(2) x) in SOC  <=>  2ab >= ||x||^2, a,b >= 0
        const int q0 = soc_cursor;
        const LinExpr sum = c.a + c.b;
        const LinExpr dif = c.a - c.b;
        auto r0 = mapped_terms(sum);
        for (auto& [cc, v] : r0) v = -v;
        r0.emplace_back(q0, 1.0);
        push_row(std::move(r0), sum.constant());
        auto r1 = mapped_terms(dif);
        for (auto& [cc, v] : r1) v = -v;
        r1.emplace_back(q0 + 1, 1.0);
        push_row(std::move(r1), dif.constant());
        for (std::size_t i = 0; i < c.x.size(); ++i) {
          auto r = mapped_terms(c.x[i]);
          for (auto& [cc, v] : r) v = -M_SQRT2 * v;
          r.emplace_back(q0 + 2 + static_cast<int>(i), 1.0);
          push_row(std::move(r), M_SQRT2 * c.x[i].constant());
        }
        soc_cursor += 2 + static_cast<int>(c.x.size());
        break;
      }
    }
  }

  // minimize the negated objective
  sf.c = Eigen::VectorXd::Zero(ntot);
  for (const auto& [cc, v] : objective_.collect()) sf.c[col_of[cc]] -= v;
  sf.c0 = -objective_.constant();

  const IpmSolution ipm = solve_standard_form(sf, opts);

  Solution sol;
  sol.status = ipm.status;
  sol.stats = ipm.stats;
  if (ipm.status == SolveStatus::optimal ||
      ipm.status == SolveStatus::iteration_limit) {
    sol.coord_values_.resize(ncols_model, 0.0);
    for (int id = 0; id < ncols_model; ++id)
      sol.coord_values_[id] = ipm.x[col_of[id]];
    sol.psd_values_.reserve(psd_blocks_.size());
    for (std::size_t bidx = 0; bidx < psd_blocks_.size(); ++bidx) {
      const int d = psd_blocks_[bidx].dim;
      Eigen::VectorXd v(d * (d + 1) / 2);
      for (int idx = 0; idx < v.size(); ++idx)
        v[idx] = sol.coord_values_[psd_blocks_[bidx].first_coord + idx];
      sol.psd_values_.push_back(svec_to_sym(v, d));
    }
    sol.objective = sol.value(objective_);
  }
  return sol;
}

std::vector<double> ConicProgram::constraint_violations(
    const Solution& sol) const {
  std::vector<double> out;
  out.reserve(constraints_.size() + psd_blocks_.size());
  for (const auto& c : constraints_) {
    switch (c.kind) {
      case Constraint::Kind::eq:
        out.push_back(std::abs(sol.value(c.expr)));
        break;
      case Constraint::Kind::le:
        out.push_back(std::max(0.0, sol.value(c.expr)));
        break;
      case Constraint::Kind::soc: {
        double nrm2 = 0;
        for (const auto& xe : c.x) {
          const double v = sol.value(xe);
          nrm2 += v * v;
        }
        out.push_back(std::max(0.0, std::sqrt(nrm2) - sol.value(c.a)));
        break;
      }
      case Constraint::Kind::rsoc: {
        double nrm2 = 0;
        for (const auto& xe : c.x) {
          const double v = sol.value(xe);
          nrm2 += v * v;
        }
        const double a = sol.value(c.a);
        const double b = sol.value(c.b);
        double viol = std::max(0.0, nrm2 - 2.0 * a * b);
        viol = std::max({viol, -a, -b, 0.0});
        out.push_back(viol);
        break;
      }
    }
  }
  for (std::size_t bidx = 0; bidx < psd_blocks_.size(); ++bidx) {
    const Eigen::MatrixXd& m = sol.value(PsdVar{static_cast<int>(bidx), 0});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    out.push_back(std::max(0.0, -es.eigenvalues().minCoeff()));
  }
  return out;
}

double ConicProgram::max_violation(const Solution& sol) const {
  double worst = 0;
  for (double v : constraint_violations(sol)) worst = std::max(worst, v);
  return worst;
}

void ConicProgram::dump(std::ostream& os) const {
  os << "# conic program dump v1\n";
  os << "# col <id> <free|nonneg|psd block svec_index> <name>\n";
  os << "cols " << columns_.size() << "\n";
  for (std::size_t id = 0; id < columns_.size(); ++id) {
    const auto& col = columns_[id];
    os << "col " << id << ' ';
    switch (col.kind) {
      case Column::Kind::free_scalar: os << "free"; break;
      case Column::Kind::nonneg_scalar: os << "nonneg"; break;
      case Column::Kind::psd_coord:
        os << "psd " << col.psd_block << ' ' << col.svec_index;
        break;
    }
    os << ' ' << col.name << "\n";
  }
  auto put_expr = [&os](const LinExpr& e) {
    const auto terms = e.collect();
    os << terms.size();
    for (const auto& [c, v] : terms) os << ' ' << c << ' ' << v;
    os << " const " << e.constant();
  };
  os << "maximize ";
  put_expr(objective_);
  os << "\n";
  os << "constraints " << constraints_.size() << "\n";
  for (const auto& c : constraints_) {
    switch (c.kind) {
      case Constraint::Kind::eq:
        os << "eq ";
        put_expr(c.expr);
        os << "\n";
        break;
      case Constraint::Kind::le:
        os << "le ";
        put_expr(c.expr);
        os << "\n";
        break;
      case Constraint::Kind::soc:
      case Constraint::Kind::rsoc: {
        os << (c.kind == Constraint::Kind::soc ? "soc " : "rsoc ");
        os << (c.kind == Constraint::Kind::soc ? 1 : 2) + c.x.size() << "\n";
        os << "  t ";
        put_expr(c.a);
        os << "\n";
        if (c.kind == Constraint::Kind::rsoc) {
          os << "  b ";
          put_expr(c.b);
          os << "\n";
        }
        for (const auto& xe : c.x) {
          os << "  x ";
          put_expr(xe);
          os << "\n";
        }
        break;
      }
    }
  }
  os << "psd_blocks " << psd_blocks_.size() << "\n";
  for (const auto& pb : psd_blocks_)
    os << "psd dim " << pb.dim << " first_coord " << pb.first_coord << ' '
       << pb.name << "\n";
}

}  // namespace starris::conic
