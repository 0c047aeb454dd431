// SPDX-License-Identifier: Apache-2.0
//
// Homogeneous self-dual primal-dual interior-point method for
//
//   min c.x  s.t.  A x = b,  x in K,
//   K = R^nf x R^nl_+ x SOC(p_1) x ... x PSD(d_1) x ...
//
// The embedding follows the usual (x, y, z, tau, kappa) model
//   A x - b tau = 0,  A^T y + z - c tau = 0,  kappa + c.x - b.y = 0
// with Nesterov-Todd scaling per cone block and a Mehrotra
// predictor-corrector. Each Newton step reduces to an m x m Schur system
//   [ S    A_f ] [dy]    S = A_c W^2 A_c^T
//   [ A_f^T  0 ] [du],
// which keeps the cost low when most coordinates live in large PSD blocks
// (S is sized by the constraint count, not the cone dimension).

#include "starris/conic/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <cstdio>

namespace starris::conic {

int ConeDims::total() const {
  int t = n_free + n_nonneg;
  for (int p : soc) t += p;
  for (int j = 0; j < static_cast<int>(psd.size()); ++j) t += psd_svec(j);
  return t;
}

int ConeDims::degree() const {
  int d = n_nonneg + static_cast<int>(soc.size());
  for (int p : psd) d += p;
  return d;
}

Eigen::VectorXd sym_to_svec(const Eigen::MatrixXd& a) {
  const int d = static_cast<int>(a.rows());
  Eigen::VectorXd v(d * (d + 1) / 2);
  int idx = 0;
  for (int j = 0; j < d; ++j) {
    v[idx++] = a(j, j);
    for (int i = j + 1; i < d; ++i) v[idx++] = M_SQRT2 * 0.5 * (a(i, j) + a(j, i));
  }
  return v;
}

Eigen::MatrixXd svec_to_sym(const Eigen::VectorXd& v, int d) {
  Eigen::MatrixXd a(d, d);
  int idx = 0;
  for (int j = 0; j < d; ++j) {
    a(j, j) = v[idx++];
    for (int i = j + 1; i < d; ++i) {
      const double s = v[idx++] * M_SQRT1_2;
      a(i, j) = s;
      a(j, i) = s;
    }
  }
  return a;
}

namespace {

struct SocBlock {
  int off, dim;
};
struct PsdBlock {
  int off, d, sv;
};

struct Layout {
  int n = 0;
  int free_off = 0, n_free = 0;
  int lp_off = 0, n_lp = 0;
  std::vector<SocBlock> socs;
  std::vector<PsdBlock> psds;
};

Layout make_layout(const ConeDims& dims) {
  Layout lay;
  lay.n_free = dims.n_free;
  lay.lp_off = dims.n_free;
  lay.n_lp = dims.n_nonneg;
  int off = dims.n_free + dims.n_nonneg;
  for (int p : dims.soc) {
    lay.socs.push_back({off, p});
    off += p;
  }
  for (int d : dims.psd) {
    lay.psds.push_back({off, d, d * (d + 1) / 2});
    off += d * (d + 1) / 2;
  }
  lay.n = off;
  return lay;
}

// identity element of the cone part (free coordinates zero)
Eigen::VectorXd cone_identity(const Layout& lay) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(lay.n);
  e.segment(lay.lp_off, lay.n_lp).setOnes();
  for (const auto& q : lay.socs) e[q.off] = 1.0;
  for (const auto& p : lay.psds) {
    int idx = p.off;
    for (int j = 0; j < p.d; ++j) {
      e[idx] = 1.0;
      idx += p.d - j;
    }
  }
  return e;
}

// NT scaling for a second-order cone: W^2 = eta (2 v v^T - J) with
// v^T J v = 1, and W = sqrt(eta) [[v0, v1^T], [v1, I + v1 v1^T/(1+v0)]]
// (the PSD square root of 2 v v^T - J).
struct SocScaling {
  double eta = 1;
  Eigen::VectorXd v;
};

Eigen::VectorXd soc_w_apply(const SocScaling& s, const Eigen::VectorXd& u,
                            bool inverse) {
  const int p = static_cast<int>(u.size());
  const double v0 = s.v[0];
  const auto v1 = s.v.tail(p - 1);
  const double sgn = inverse ? -1.0 : 1.0;  // W^-1 uses Jv in place of v
  const double scale = inverse ? 1.0 / std::sqrt(s.eta) : std::sqrt(s.eta);
  const double dot1 = sgn * v1.dot(u.tail(p - 1));
  Eigen::VectorXd out(p);
  out[0] = v0 * u[0] + dot1;
  out.tail(p - 1) =
      u.tail(p - 1) + sgn * v1 * (u[0] + dot1 / (1.0 + v0));
  return scale * out;
}

struct PsdScaling {
  Eigen::MatrixXd wnt;        // NT point: W^2 u = wnt U wnt
  Eigen::MatrixXd g, g_inv;   // wnt^{1/2}: W u = g U g
  Eigen::MatrixXd lam;        // scaled point g Z g = g^{-1} X g^{-1}
  Eigen::MatrixXd lam_q;      // eigenbasis of lam
  Eigen::VectorXd lam_w;
};

struct Scaling {
  Eigen::VectorXd w_lp;     // sqrt(x/z)
  Eigen::VectorXd lam_lp;   // sqrt(x z)
  std::vector<SocScaling> socs;
  std::vector<PsdScaling> psds;
  Eigen::VectorXd lambda;   // scaled point as a coordinate vector
  bool ok = true;
};

double soc_det(const Eigen::VectorXd& u) {
  return u[0] * u[0] - u.tail(u.size() - 1).squaredNorm();
}

Scaling compute_scaling(const Layout& lay, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& z) {
  Scaling sc;
  sc.lambda = Eigen::VectorXd::Zero(lay.n);
  if (lay.n_lp > 0) {
    const auto xs = x.segment(lay.lp_off, lay.n_lp).array();
    const auto zs = z.segment(lay.lp_off, lay.n_lp).array();
    sc.w_lp = (xs / zs).sqrt();
    sc.lam_lp = (xs * zs).sqrt();
    sc.lambda.segment(lay.lp_off, lay.n_lp) = sc.lam_lp;
    if (!sc.w_lp.allFinite()) sc.ok = false;
  }
  for (const auto& q : lay.socs) {
    const Eigen::VectorXd xs = x.segment(q.off, q.dim);
    const Eigen::VectorXd zs = z.segment(q.off, q.dim);
    const double dx = soc_det(xs), dz = soc_det(zs);
    if (!(dx > 0) || !(dz > 0)) {
      sc.ok = false;
      sc.socs.push_back({});
      continue;
    }
    const double gx = std::sqrt(dx), gz = std::sqrt(dz);
    const Eigen::VectorXd xb = xs / gx, zb = zs / gz;
    const double cc = std::sqrt((1.0 + xb.dot(zb)) / 2.0);
    SocScaling s;
    s.eta = gx / gz;
    s.v = xb;
    s.v[0] += zb[0];
    s.v.tail(q.dim - 1) -= zb.tail(q.dim - 1);  // xb + J zb
    s.v /= 2.0 * cc;
    sc.socs.push_back(std::move(s));
    sc.lambda.segment(q.off, q.dim) =
        soc_w_apply(sc.socs.back(), zs, /*inverse=*/false);
  }
  for (const auto& p : lay.psds) {
    PsdScaling ps;
    const Eigen::MatrixXd xm = svec_to_sym(x.segment(p.off, p.sv), p.d);
    const Eigen::MatrixXd zm = svec_to_sym(z.segment(p.off, p.sv), p.d);
    Eigen::LLT<Eigen::MatrixXd> lltx(xm);
    if (lltx.info() != Eigen::Success) {
      sc.ok = false;
      sc.psds.push_back({});
      continue;
    }
    const Eigen::MatrixXd l = lltx.matrixL();
    const Eigen::MatrixXd t = l.transpose() * zm * l;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> est(t);
    if (est.info() != Eigen::Success || est.eigenvalues().minCoeff() <= 0) {
      sc.ok = false;
      sc.psds.push_back({});
      continue;
    }
    const Eigen::VectorXd ti =
        est.eigenvalues().array().rsqrt().matrix();  // t^{-1/2} spectrum
    ps.wnt = l * est.eigenvectors() * ti.asDiagonal() *
             est.eigenvectors().transpose() * l.transpose();
    ps.wnt = 0.5 * (ps.wnt + ps.wnt.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esw(ps.wnt);
    const Eigen::VectorXd sq = esw.eigenvalues().array().max(0.0).sqrt();
    ps.g = esw.eigenvectors() * sq.asDiagonal() * esw.eigenvectors().transpose();
    ps.g_inv = esw.eigenvectors() * sq.array().inverse().matrix().asDiagonal() *
               esw.eigenvectors().transpose();
    ps.lam = ps.g * zm * ps.g;
    ps.lam = 0.5 * (ps.lam + ps.lam.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esl(ps.lam);
    ps.lam_q = esl.eigenvectors();
    ps.lam_w = esl.eigenvalues();
    sc.lambda.segment(p.off, p.sv) = sym_to_svec(ps.lam);
    if (!ps.lam_w.allFinite() || ps.lam_w.minCoeff() <= 0) sc.ok = false;
    sc.psds.push_back(std::move(ps));
  }
  return sc;
}

// W u (inverse = false) or W^{-1} u (inverse = true); free coordinates pass 0.
Eigen::VectorXd apply_w(const Layout& lay, const Scaling& sc,
                        const Eigen::VectorXd& u, bool inverse) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(lay.n);
  if (lay.n_lp > 0) {
    const auto us = u.segment(lay.lp_off, lay.n_lp).array();
    if (inverse)
      out.segment(lay.lp_off, lay.n_lp) = us / sc.w_lp.array();
    else
      out.segment(lay.lp_off, lay.n_lp) = us * sc.w_lp.array();
  }
  for (std::size_t i = 0; i < lay.socs.size(); ++i) {
    const auto& q = lay.socs[i];
    out.segment(q.off, q.dim) =
        soc_w_apply(sc.socs[i], u.segment(q.off, q.dim), inverse);
  }
  for (std::size_t i = 0; i < lay.psds.size(); ++i) {
    const auto& p = lay.psds[i];
    const auto& s = sc.psds[i];
    const Eigen::MatrixXd um = svec_to_sym(u.segment(p.off, p.sv), p.d);
    const Eigen::MatrixXd& gm = inverse ? s.g_inv : s.g;
    out.segment(p.off, p.sv) = sym_to_svec(gm * um * gm);
  }
  return out;
}

// Jordan product u o v blockwise (free coordinates -> 0)
Eigen::VectorXd jordan_prod(const Layout& lay, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(lay.n);
  if (lay.n_lp > 0)
    out.segment(lay.lp_off, lay.n_lp) =
        u.segment(lay.lp_off, lay.n_lp).cwiseProduct(
            v.segment(lay.lp_off, lay.n_lp));
  for (const auto& q : lay.socs) {
    const Eigen::VectorXd us = u.segment(q.off, q.dim);
    const Eigen::VectorXd vs = v.segment(q.off, q.dim);
    out[q.off] = us.dot(vs);
    out.segment(q.off + 1, q.dim - 1) =
        us[0] * vs.tail(q.dim - 1) + vs[0] * us.tail(q.dim - 1);
  }
  for (const auto& p : lay.psds) {
    const Eigen::MatrixXd um = svec_to_sym(u.segment(p.off, p.sv), p.d);
    const Eigen::MatrixXd vm = svec_to_sym(v.segment(p.off, p.sv), p.d);
    out.segment(p.off, p.sv) =
        sym_to_svec(0.5 * (um * vm + vm * um));
  }
  return out;
}

// solve lambda o q = r blockwise using the stored scaled point
Eigen::VectorXd jordan_div(const Layout& lay, const Scaling& sc,
                           const Eigen::VectorXd& r) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(lay.n);
  if (lay.n_lp > 0)
    out.segment(lay.lp_off, lay.n_lp) =
        r.segment(lay.lp_off, lay.n_lp).cwiseQuotient(
            sc.lambda.segment(lay.lp_off, lay.n_lp));
  for (std::size_t i = 0; i < lay.socs.size(); ++i) {
    const auto& q = lay.socs[i];
    const Eigen::VectorXd lam = sc.lambda.segment(q.off, q.dim);
    const Eigen::VectorXd rs = r.segment(q.off, q.dim);
    const double det = soc_det(lam);
    const double l0 = lam[0];
    const auto l1 = lam.tail(q.dim - 1);
    const auto r1 = rs.tail(q.dim - 1);
    const double q0 = (l0 * rs[0] - l1.dot(r1)) / det;
    out[q.off] = q0;
    out.segment(q.off + 1, q.dim - 1) = (r1 - q0 * l1) / l0;
  }
  for (std::size_t i = 0; i < lay.psds.size(); ++i) {
    const auto& p = lay.psds[i];
    const auto& s = sc.psds[i];
    const Eigen::MatrixXd rm = svec_to_sym(r.segment(p.off, p.sv), p.d);
    const Eigen::MatrixXd rt = s.lam_q.transpose() * rm * s.lam_q;
    Eigen::MatrixXd qt(p.d, p.d);
    for (int a = 0; a < p.d; ++a)
      for (int bcol = 0; bcol < p.d; ++bcol)
        qt(a, bcol) = 2.0 * rt(a, bcol) / (s.lam_w[a] + s.lam_w[bcol]);
    out.segment(p.off, p.sv) =
        sym_to_svec(s.lam_q * qt * s.lam_q.transpose());
  }
  return out;
}

constexpr double kInfStep = std::numeric_limits<double>::infinity();

// smallest positive root of a t^2 + 2 b t + c = 0, +inf when none
double min_pos_root(double a, double b, double c) {
  if (std::abs(a) < 1e-300) {
    if (b >= 0) return kInfStep;
    return -c / (2.0 * b);
  }
  const double disc = b * b - a * c;
  if (disc < 0) return a > 0 ? kInfStep : 0.0;
  const double s = std::sqrt(disc);
  const double qq = -(b + (b >= 0 ? s : -s));
  double r1 = qq / a;
  double r2 = (qq != 0.0) ? c / qq : kInfStep;
  if (r1 > r2) std::swap(r1, r2);
  if (r1 > 0) return r1;
  if (r2 > 0) return r2;
  return kInfStep;
}

// largest step with x + alpha dx staying in the cone
double max_step(const Layout& lay, const Eigen::VectorXd& x,
                const Eigen::VectorXd& dx) {
  double alpha = kInfStep;
  for (int i = lay.lp_off; i < lay.lp_off + lay.n_lp; ++i)
    if (dx[i] < 0) alpha = std::min(alpha, -x[i] / dx[i]);
  for (const auto& q : lay.socs) {
    const Eigen::VectorXd xs = x.segment(q.off, q.dim);
    const Eigen::VectorXd ds = dx.segment(q.off, q.dim);
    const double a = soc_det(ds);
    const double b = xs[0] * ds[0] - xs.tail(q.dim - 1).dot(ds.tail(q.dim - 1));
    const double c = soc_det(xs);
    alpha = std::min(alpha, min_pos_root(a, b, c));
  }
  for (const auto& p : lay.psds) {
    const Eigen::MatrixXd xm = svec_to_sym(x.segment(p.off, p.sv), p.d);
    const Eigen::MatrixXd dm = svec_to_sym(dx.segment(p.off, p.sv), p.d);
    Eigen::LLT<Eigen::MatrixXd> llt(xm);
    if (llt.info() != Eigen::Success) return 0.0;
    const Eigen::MatrixXd l = llt.matrixL();
    const Eigen::MatrixXd tmp = l.triangularView<Eigen::Lower>().solve(dm);
    const Eigen::MatrixXd t =
        l.triangularView<Eigen::Lower>().solve(tmp.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

// Per-row preprocessed structure for fast W^2 transforms.
struct RowView {
  std::vector<std::pair<int, double>> lin;  // free + lp coordinates
  struct SocSeg {
    int block;
    std::vector<std::pair<int, double>> entries;  // local offsets
  };
  std::vector<SocSeg> socs;
  struct PsdSeg {
    int block;
    bool diag_only;
    std::vector<std::pair<int, double>> diag;  // (matrix index, value)
    Eigen::MatrixXd dense;
  };
  std::vector<PsdSeg> psds;
};

struct Problem {
  const StandardForm* sf;
  Layout lay;
  int m;
  std::vector<RowView> rows;
  Eigen::MatrixXd a_free;  // m x n_free
  Eigen::VectorXd row_scale;
  Eigen::VectorXd b;       // scaled
  Eigen::VectorXd c;
  double b_scale = 1.0;    // global data normalization
  double c_scale = 1.0;
};

// split row coordinates by block and classify PSD parts
Problem preprocess(const StandardForm& sf) {
  Problem pr;
  pr.sf = &sf;
  pr.lay = make_layout(sf.dims);
  pr.m = static_cast<int>(sf.rows.size());
  pr.rows.resize(pr.m);
  pr.a_free = Eigen::MatrixXd::Zero(pr.m, pr.lay.n_free);
  pr.row_scale.resize(pr.m);
  pr.b = sf.b;
  pr.c = sf.c;

  // local tables: which block a coordinate belongs to
  std::vector<int> soc_of(pr.lay.n, -1), psd_of(pr.lay.n, -1);
  for (std::size_t i = 0; i < pr.lay.socs.size(); ++i)
    for (int k = 0; k < pr.lay.socs[i].dim; ++k)
      soc_of[pr.lay.socs[i].off + k] = static_cast<int>(i);
  for (std::size_t i = 0; i < pr.lay.psds.size(); ++i)
    for (int k = 0; k < pr.lay.psds[i].sv; ++k)
      psd_of[pr.lay.psds[i].off + k] = static_cast<int>(i);
  // svec index -> (i, j)
  std::vector<std::vector<std::pair<int, int>>> ij_of(pr.lay.psds.size());
  for (std::size_t bi = 0; bi < pr.lay.psds.size(); ++bi) {
    const int d = pr.lay.psds[bi].d;
    ij_of[bi].reserve(pr.lay.psds[bi].sv);
    for (int j = 0; j < d; ++j)
      for (int i = j; i < d; ++i) ij_of[bi].emplace_back(i, j);
  }

  for (int r = 0; r < pr.m; ++r) {
    double nrm2 = 0;
    for (const auto& [col, val] : sf.rows[r]) nrm2 += val * val;
    const double scale = 1.0 / std::max(std::sqrt(nrm2), 1e-12);
    pr.row_scale[r] = scale;
    pr.b[r] *= scale;

    RowView& rv = pr.rows[r];
    std::map<int, std::map<int, double>> psd_entries;  // block -> svec -> val
    std::map<int, std::vector<std::pair<int, double>>> soc_entries;
    for (const auto& [col, raw] : sf.rows[r]) {
      const double val = raw * scale;
      if (col < pr.lay.lp_off) {
        rv.lin.emplace_back(col, val);
        pr.a_free(r, col) += val;
      } else if (col < pr.lay.lp_off + pr.lay.n_lp) {
        rv.lin.emplace_back(col, val);
      } else if (soc_of[col] >= 0) {
        soc_entries[soc_of[col]].emplace_back(
            col - pr.lay.socs[soc_of[col]].off, val);
      } else {
        psd_entries[psd_of[col]][col - pr.lay.psds[psd_of[col]].off] += val;
      }
    }
    for (auto& [blk, entries] : soc_entries)
      rv.socs.push_back({blk, std::move(entries)});

    for (auto& [blk, entries] : psd_entries) {
      RowView::PsdSeg seg;
      seg.block = blk;
      seg.diag_only = true;
      const int d = pr.lay.psds[blk].d;
      for (const auto& [sv, val] : entries) {
        const auto [ii, jj] = ij_of[blk][sv];
        if (ii != jj) seg.diag_only = false;
      }
      if (seg.diag_only) {
        for (const auto& [sv, val] : entries)
          seg.diag.emplace_back(ij_of[blk][sv].first, val);
      } else {
        seg.dense = Eigen::MatrixXd::Zero(d, d);
        for (const auto& [sv, val] : entries) {
          const auto [ii, jj] = ij_of[blk][sv];
          if (ii == jj) {
            seg.dense(ii, ii) = val;
          } else {
            seg.dense(ii, jj) = val * M_SQRT1_2;
            seg.dense(jj, ii) = val * M_SQRT1_2;
          }
        }
      }
      rv.psds.push_back(std::move(seg));
    }
  }
  // global normalization keeps tau near one on badly scaled data
  pr.b_scale = std::max(1e-8, pr.b.lpNorm<Eigen::Infinity>());
  pr.c_scale = std::max(1e-8, pr.c.lpNorm<Eigen::Infinity>());
  pr.b /= pr.b_scale;
  pr.c /= pr.c_scale;
  return pr;
}

Eigen::VectorXd a_mul(const Problem& pr, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(pr.m);
  for (int r = 0; r < pr.m; ++r) {
    double acc = 0;
    for (const auto& [col, val] : pr.sf->rows[r]) acc += val * x[col];
    out[r] = acc * pr.row_scale[r];
  }
  return out;
}

Eigen::VectorXd at_mul(const Problem& pr, const Eigen::VectorXd& y) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(pr.lay.n);
  for (int r = 0; r < pr.m; ++r) {
    const double yr = y[r] * pr.row_scale[r];
    if (yr == 0.0) continue;
    for (const auto& [col, val] : pr.sf->rows[r]) out[col] += val * yr;
  }
  return out;
}

// W^2 applied to one (preprocessed) row, written as a dense n-vector
void row_w2(const Problem& pr, const Scaling& sc, const RowView& rv,
            Eigen::VectorXd& out) {
  out.setZero();
  for (const auto& [col, val] : rv.lin) {
    if (col >= pr.lay.lp_off)
      out[col] = val * sc.w_lp[col - pr.lay.lp_off] *
                 sc.w_lp[col - pr.lay.lp_off];
    // free coordinates contribute nothing to the cone transform
  }
  for (const auto& seg : rv.socs) {
    const auto& q = pr.lay.socs[seg.block];
    Eigen::VectorXd u = Eigen::VectorXd::Zero(q.dim);
    for (const auto& [k, val] : seg.entries) u[k] = val;
    const auto& s = sc.socs[seg.block];
    Eigen::VectorXd ju = u;
    ju.tail(q.dim - 1) = -u.tail(q.dim - 1);
    out.segment(q.off, q.dim) = s.eta * (2.0 * s.v * s.v.dot(u) - ju);
  }
  for (const auto& seg : rv.psds) {
    const auto& p = pr.lay.psds[seg.block];
    const auto& s = sc.psds[seg.block];
    Eigen::MatrixXd t;
    if (seg.diag_only) {
      t = Eigen::MatrixXd::Zero(p.d, p.d);
      for (const auto& [i, val] : seg.diag)
        t.noalias() += val * (s.wnt.col(i) * s.wnt.col(i).transpose());
    } else {
      t.noalias() = s.wnt * seg.dense * s.wnt;
    }
    out.segment(p.off, p.sv) = sym_to_svec(t);
  }
}

// generic W^2 v for a dense vector
Eigen::VectorXd w2_full(const Layout& lay, const Scaling& sc,
                        const Eigen::VectorXd& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(lay.n);
  if (lay.n_lp > 0)
    out.segment(lay.lp_off, lay.n_lp) =
        v.segment(lay.lp_off, lay.n_lp).array() * sc.w_lp.array().square();
  for (std::size_t i = 0; i < lay.socs.size(); ++i) {
    const auto& q = lay.socs[i];
    const auto& s = sc.socs[i];
    const Eigen::VectorXd u = v.segment(q.off, q.dim);
    Eigen::VectorXd ju = u;
    ju.tail(q.dim - 1) = -u.tail(q.dim - 1);
    out.segment(q.off, q.dim) = s.eta * (2.0 * s.v * s.v.dot(u) - ju);
  }
  for (std::size_t i = 0; i < lay.psds.size(); ++i) {
    const auto& p = lay.psds[i];
    const auto& s = sc.psds[i];
    const Eigen::MatrixXd vm = svec_to_sym(v.segment(p.off, p.sv), p.d);
    out.segment(p.off, p.sv) = sym_to_svec(s.wnt * vm * s.wnt);
  }
  return out;
}

// sparse row . dense vector over cone coordinates only
double row_dot_cone(const Problem& pr, int r, const Eigen::VectorXd& v) {
  double acc = 0;
  for (const auto& [col, val] : pr.sf->rows[r])
    if (col >= pr.lay.lp_off) acc += val * v[col];
  return acc * pr.row_scale[r];
}

struct KktFactor {
  Eigen::LLT<Eigen::MatrixXd> llt_s;
  Eigen::LLT<Eigen::MatrixXd> llt_n;
  Eigen::MatrixXd s;       // unregularized Schur matrix
  Eigen::MatrixXd a_free;  // alias
  bool ok = false;

  // solve [S Af; Af^T 0][dy;du] = [r1;r2] with one refinement pass
  bool solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2,
             Eigen::VectorXd& dy, Eigen::VectorXd& du) const {
    const int nf = static_cast<int>(a_free.cols());
    auto solve_once = [&](const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                          Eigen::VectorXd& oy, Eigen::VectorXd& ou) {
      const Eigen::VectorXd t = llt_s.solve(q1);
      if (nf > 0) {
        ou = llt_n.solve(a_free.transpose() * t - q2);
        oy = llt_s.solve(q1 - a_free * ou);
      } else {
        ou.resize(0);
        oy = t;
      }
    };
    solve_once(r1, r2, dy, du);
    // one iterative-refinement pass against the unregularized system
    Eigen::VectorXd res1 = r1 - s * dy;
    if (nf > 0) res1 -= a_free * du;
    Eigen::VectorXd res2 =
        nf > 0 ? Eigen::VectorXd(r2 - a_free.transpose() * dy)
               : Eigen::VectorXd();
    Eigen::VectorXd cy, cu;
    solve_once(res1, nf > 0 ? res2 : Eigen::VectorXd::Zero(0), cy, cu);
    dy += cy;
    if (nf > 0) du += cu;
    return dy.allFinite() && (nf == 0 || du.allFinite());
  }
};

KktFactor factor_kkt(const Problem& pr, const Scaling& sc,
                     std::vector<Eigen::VectorXd>& w2_rows) {
  KktFactor kf;
  const int m = pr.m;
  // transformed rows
  if (static_cast<int>(w2_rows.size()) != m)
    w2_rows.assign(m, Eigen::VectorXd(pr.lay.n));
  for (int r = 0; r < m; ++r) row_w2(pr, sc, pr.rows[r], w2_rows[r]);
  // S = A_c W^2 A_c^T
  kf.s.resize(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double v = row_dot_cone(pr, i, w2_rows[j]);
      kf.s(i, j) = v;
      kf.s(j, i) = v;
    }
  }
  kf.a_free = pr.a_free;

  const double base = kf.s.diagonal().cwiseAbs().maxCoeff();
  double delta = 1e-14 * std::max(base, 1.0);
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::MatrixXd sreg = kf.s;
    sreg.diagonal().array() += delta;
    kf.llt_s.compute(sreg);
    if (kf.llt_s.info() == Eigen::Success) {
      if (pr.lay.n_free > 0) {
        Eigen::MatrixXd nmat = pr.a_free.transpose() *
                               kf.llt_s.solve(pr.a_free);
        nmat.diagonal().array() += delta;
        kf.llt_n.compute(nmat);
        if (kf.llt_n.info() != Eigen::Success) {
          delta *= 100.0;
          continue;
        }
      }
      kf.ok = true;
      return kf;
    }
    delta *= 100.0;
  }
  return kf;
}

}  // namespace

IpmSolution solve_standard_form(const StandardForm& sf,
                                const SolveOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  IpmSolution out;
  Problem pr = preprocess(sf);
  const Layout& lay = pr.lay;
  const int m = pr.m;
  const int n = lay.n;
  const double nu = static_cast<double>(std::max(sf.dims.degree(), 1));

  Eigen::VectorXd x = cone_identity(lay);
  Eigen::VectorXd z = x;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double tau = 1.0, kappa = 1.0;

  const double bnorm = pr.b.norm();
  const double cnorm = pr.c.norm();

  double best_metric = kInfStep;
  Eigen::VectorXd best_x, best_y, best_z;
  auto finish = [&](SolveStatus st, int iters, double pres, double dres,
                    double gap) {
    out.status = st;
    out.stats.iterations = iters;
    out.stats.primal_residual = pres;
    out.stats.dual_residual = dres;
    out.stats.gap = gap;
    out.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return out;
  };
  // on breakdown, fall back to the most accurate iterate seen so far
  auto finish_with_best = [&](int iters) {
    if (best_x.size() == static_cast<Eigen::Index>(n)) {
      out.x = pr.b_scale * best_x;
      out.y = pr.c_scale * best_y.cwiseProduct(pr.row_scale);
      out.z = pr.c_scale * best_z;
      const SolveStatus st = best_metric <= opts.tol ? SolveStatus::optimal
                             : best_metric <= 1e3 * opts.tol
                                 ? SolveStatus::iteration_limit
                                 : SolveStatus::numerical_failure;
      return finish(st, iters, best_metric, best_metric, best_metric);
    }
    return finish(SolveStatus::numerical_failure, iters, kInfStep, kInfStep,
                  kInfStep);
  };

  std::vector<Eigen::VectorXd> w2_rows;
  int stall = 0;
  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    const Eigen::VectorXd ax = a_mul(pr, x);
    const Eigen::VectorXd aty = at_mul(pr, y);
    const Eigen::VectorXd rp = pr.b * tau - ax;
    Eigen::VectorXd rd = pr.c * tau - aty - z;
    const double cx = pr.c.dot(x);
    const double by = pr.b.dot(y);
    const double rg = kappa + cx - by;
    const double mu = (x.dot(z) + tau * kappa) / (nu + 1.0);

    const double pres = rp.norm() / (tau * (1.0 + bnorm));
    const double dres = rd.norm() / (tau * (1.0 + cnorm));
    const double pobj = cx / tau;
    const double dobj = by / tau;
    const double gap =
        std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));

    if (opts.verbosity >= 1)
      std::printf(
          "iter %3d  mu %9.2e  pres %9.2e  dres %9.2e  gap %9.2e  tau %9.2e "
          "kappa %9.2e\n",
          iter, mu, pres, dres, gap, tau, kappa);
    const double metric = std::max({pres, dres, gap});
    if (metric < best_metric && x.allFinite() && tau > 0) {
      best_metric = metric;
      best_x = x / tau;
      best_y = y / tau;
      best_z = z / tau;
    }

    if (pres <= opts.tol && dres <= opts.tol && gap <= opts.tol) {
      out.x = (pr.b_scale / tau) * x;
      out.y = (pr.c_scale / tau) * y.cwiseProduct(pr.row_scale);
      out.z = (pr.c_scale / tau) * z;
      return finish(SolveStatus::optimal, iter, pres, dres, gap);
    }
    // infeasibility certificates
    if (by > 0) {
      const double res = (aty + z).norm() / by;
      if (res <= opts.tol * (1.0 + cnorm))
        return finish(SolveStatus::infeasible, iter, pres, dres, gap);
    }
    if (cx < 0) {
      const double res = ax.norm() / (-cx);
      if (res <= opts.tol * (1.0 + bnorm))
        return finish(SolveStatus::unbounded, iter, pres, dres, gap);
    }
    if (iter == opts.max_iters) break;

    const Scaling sc = compute_scaling(lay, x, z);
    if (!sc.ok) return finish_with_best(iter);
    const Eigen::VectorXd lam2 = jordan_prod(lay, sc.lambda, sc.lambda);
    const Eigen::VectorXd e = cone_identity(lay);

    KktFactor kf = factor_kkt(pr, sc, w2_rows);
    if (!kf.ok) return finish_with_best(iter);

    const Eigen::VectorXd w2c = w2_full(lay, sc, pr.c);
    // constant pieces of the tau column
    const Eigen::VectorXd g1 = a_mul(pr, w2c) + pr.b;
    Eigen::VectorXd g2(lay.n_free);
    for (int i = 0; i < lay.n_free; ++i) g2[i] = pr.c[i];
    Eigen::VectorXd v1y(m), v1u;
    if (!kf.solve(g1, g2, v1y, v1u)) return finish_with_best(iter);
    const Eigen::VectorXd at_v1y = at_mul(pr, v1y);

    // Newton solve for the system
    //   A dx - b dtau                  = rhs_p
    //   A^T dy + dz - c dtau          = rhs_d
    //   dkappa + c.dx - b.dy          = rhs_g
    //   lambda o (W^{-1}dx + W dz)    = rhs_comp   (passed pre-divided: ds)
    //   kappa dtau + tau dkappa       = rhs_tk
    auto newton_core = [&](const Eigen::VectorXd& rhs_p,
                           const Eigen::VectorXd& rhs_d, double rhs_g,
                           const Eigen::VectorXd& ds, double rhs_tk,
                           Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                           Eigen::VectorXd& dz, double& dtau,
                           double& dkappa) -> bool {
      // q = rhs_d_c - W^{-1} ds (cone coordinates)
      Eigen::VectorXd q = rhs_d;
      for (int i = 0; i < lay.n_free; ++i) q[i] = 0.0;
      q -= apply_w(lay, sc, ds, /*inverse=*/true);
      const Eigen::VectorXd w2q = w2_full(lay, sc, q);
      const Eigen::VectorXd u1 = rhs_p + a_mul(pr, w2q);
      Eigen::VectorXd u2(lay.n_free);
      for (int i = 0; i < lay.n_free; ++i) u2[i] = rhs_d[i];
      Eigen::VectorXd v0y(m), v0u;
      if (!kf.solve(u1, u2, v0y, v0u)) return false;
      const Eigen::VectorXd at_v0y = at_mul(pr, v0y);

      // scalar equation for dtau
      const double denom = -kappa / tau + w2c.dot(at_v1y) - pr.c.dot(w2c) +
                           (lay.n_free > 0 ? g2.dot(v1u) : 0.0) -
                           pr.b.dot(v1y);
      const double numer = rhs_g - rhs_tk / tau - w2c.dot(at_v0y) +
                           w2c.dot(q) -
                           (lay.n_free > 0 ? g2.dot(v0u) : 0.0) +
                           pr.b.dot(v0y);
      if (std::abs(denom) < 1e-300) return false;
      dtau = numer / denom;

      dy = v0y + dtau * v1y;
      Eigen::VectorXd du;
      if (lay.n_free > 0) du = v0u + dtau * v1u;
      const Eigen::VectorXd atdy = at_v0y + dtau * at_v1y;
      Eigen::VectorXd bracket = atdy - dtau * pr.c - q;
      dx = w2_full(lay, sc, bracket);
      for (int i = 0; i < lay.n_free; ++i) dx[i] = du.size() > 0 ? du[i] : 0.0;
      dz = rhs_d + dtau * pr.c - atdy;
      for (int i = 0; i < lay.n_free; ++i) dz[i] = 0.0;
      dkappa = (rhs_tk - kappa * dtau) / tau;
      return dx.allFinite() && dz.allFinite() && std::isfinite(dtau);
    };

    // one round of iterative refinement keeps the directions accurate when
    // the scaling becomes extreme near the solution
    auto newton = [&](const Eigen::VectorXd& rhs_p, const Eigen::VectorXd& rhs_d,
                      double rhs_g, const Eigen::VectorXd& rhs_comp,
                      double rhs_tk, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                      Eigen::VectorXd& dz, double& dtau,
                      double& dkappa) -> bool {
      const Eigen::VectorXd ds = jordan_div(lay, sc, rhs_comp);
      if (!newton_core(rhs_p, rhs_d, rhs_g, ds, rhs_tk, dx, dy, dz, dtau,
                       dkappa))
        return false;
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd e1 = rhs_p - (a_mul(pr, dx) - pr.b * dtau);
        Eigen::VectorXd e2 = rhs_d - (at_mul(pr, dy) + dz - pr.c * dtau);
        const double e3 = rhs_g - (dkappa + pr.c.dot(dx) - pr.b.dot(dy));
        const Eigen::VectorXd wdx = apply_w(lay, sc, dx, /*inverse=*/true);
        const Eigen::VectorXd wdz = apply_w(lay, sc, dz, /*inverse=*/false);
        const Eigen::VectorXd e4 =
            rhs_comp - jordan_prod(lay, sc.lambda, wdx + wdz);
        const double e5 = rhs_tk - (kappa * dtau + tau * dkappa);
        const double err = std::max({e1.lpNorm<Eigen::Infinity>(),
                                     e2.lpNorm<Eigen::Infinity>(),
                                     std::abs(e3), e4.lpNorm<Eigen::Infinity>(),
                                     std::abs(e5)});
        const double ref = std::max(
            {rhs_p.lpNorm<Eigen::Infinity>(), rhs_d.lpNorm<Eigen::Infinity>(),
             std::abs(rhs_g), rhs_comp.lpNorm<Eigen::Infinity>(),
             std::abs(rhs_tk), 1e-30});
        if (err <= 1e-13 * ref) break;
        Eigen::VectorXd cx, cy, cz;
        double ctau, ckappa;
        const Eigen::VectorXd cds = jordan_div(lay, sc, e4);
        if (!newton_core(e1, e2, e3, cds, e5, cx, cy, cz, ctau, ckappa)) break;
        dx += cx;
        dy += cy;
        dz += cz;
        dtau += ctau;
        dkappa += ckappa;
      }
      return true;
    };

    // predictor
    Eigen::VectorXd dxa, dya, dza;
    double dtaua, dkappaa;
    if (!newton(rp, rd, -rg, Eigen::VectorXd(-lam2), -tau * kappa, dxa, dya,
                dza, dtaua, dkappaa))
      return finish_with_best(iter);

    double alpha_aff = std::min(max_step(lay, x, dxa), max_step(lay, z, dza));
    if (dtaua < 0) alpha_aff = std::min(alpha_aff, -tau / dtaua);
    if (dkappaa < 0) alpha_aff = std::min(alpha_aff, -kappa / dkappaa);
    alpha_aff = std::min(alpha_aff, 1.0);

    const double mu_aff =
        ((x + alpha_aff * dxa).dot(z + alpha_aff * dza) +
         (tau + alpha_aff * dtaua) * (kappa + alpha_aff * dkappaa)) /
        (nu + 1.0);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::clamp(sigma, 1e-8, 0.999);

    // corrector
    const Eigen::VectorXd ua = apply_w(lay, sc, dxa, /*inverse=*/true);
    const Eigen::VectorXd va = apply_w(lay, sc, dza, /*inverse=*/false);
    const Eigen::VectorXd corr = jordan_prod(lay, ua, va);
    const Eigen::VectorXd rhs_comp = sigma * mu * e - lam2 - corr;
    const double rhs_tk = sigma * mu - tau * kappa - dtaua * dkappaa;
    const double w = 1.0 - sigma;

    Eigen::VectorXd dx, dy, dz;
    double dtau, dkappa;
    if (!newton(w * rp, Eigen::VectorXd(w * rd), -w * rg, rhs_comp, rhs_tk, dx,
                dy, dz, dtau, dkappa))
      return finish_with_best(iter);

    double alpha = std::min(max_step(lay, x, dx), max_step(lay, z, dz));
    if (dtau < 0) alpha = std::min(alpha, -tau / dtau);
    if (dkappa < 0) alpha = std::min(alpha, -kappa / dkappa);
    alpha = std::min(0.99 * alpha, 1.0);

    if (!(alpha > 1e-11)) {
      if (++stall >= 2) break;
    } else {
      stall = 0;
    }

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    tau += alpha * dtau;
    kappa += alpha * dkappa;

    if (!(tau > 1e-300) || !x.allFinite() || !z.allFinite())
      return finish_with_best(iter);
  }

  // iteration cap or stall
  return finish_with_best(opts.max_iters);
}

}  // namespace starris::conic
