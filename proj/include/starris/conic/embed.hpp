// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace starris::conic {

// Real symmetric 2Mx2M embedding [[Re, -Im], [Im, Re]] of a Hermitian
// matrix. It is PSD iff the input is PSD, its eigenvalues are those of the
// input duplicated, and tr(embed(A) embed(B)) = 2 Re tr(A B).
Eigen::MatrixXd hermitian_embed(const Eigen::MatrixXcd& h,
                                double hermiticity_tol = 1e-12);

// Inverse map. For matrices that are not exact embeddings (e.g. unstructured
// PSD solver output) the redundant halves are averaged, which preserves
// every inner product against embedded Hermitian data.
Eigen::MatrixXcd hermitian_unembed(const Eigen::MatrixXd& s);

}  // namespace starris::conic
