// SPDX-License-Identifier: Apache-2.0
#include "starris/conic/embed.hpp"

#include <stdexcept>

namespace starris::conic {

Eigen::MatrixXd hermitian_embed(const Eigen::MatrixXcd& h,
                                double hermiticity_tol) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("hermitian_embed: matrix must be square");
  const double scale = std::max(1.0, h.norm());
  if ((h - h.adjoint()).norm() > hermiticity_tol * scale)
    throw std::invalid_argument("hermitian_embed: matrix is not Hermitian");
  const Eigen::Index m = h.rows();
  Eigen::MatrixXd s(2 * m, 2 * m);
  const Eigen::MatrixXd re = h.real();
  const Eigen::MatrixXd im = h.imag();
  s.topLeftCorner(m, m) = re;
  s.bottomRightCorner(m, m) = re;
  s.topRightCorner(m, m) = -im;
  s.bottomLeftCorner(m, m) = im;
  return s;
}

Eigen::MatrixXcd hermitian_unembed(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0)
    throw std::invalid_argument("hermitian_unembed: need an even square matrix");
  const Eigen::Index m = s.rows() / 2;
  const Eigen::MatrixXd re =
      0.5 * (s.topLeftCorner(m, m) + s.bottomRightCorner(m, m));
  Eigen::MatrixXd im = 0.5 * (s.bottomLeftCorner(m, m) - s.topRightCorner(m, m));
  Eigen::MatrixXcd h(m, m);
  h.real() = 0.5 * (re + re.transpose());
  h.imag() = 0.5 * (im - im.transpose());
  return h;
}

}  // namespace starris::conic
