#pragma once

#include <vector>

#include "hwm/base.hpp"

namespace hwm::linalg {

/// Right eigenpairs of a dense complex matrix, sorted by (Re, Im) ascending.
struct Eigensystem {
  CVector values;
  CMatrix vectors;        // unit columns, same order as values
  double residual = 0.0;  // max_j ||A v_j - lambda_j v_j|| / max(1, |A|_max)
  bool near_degenerate = false;  // min eigenvalue gap < 1e-9 * scale
};

Eigensystem eig_dense(const CMatrix& a, double tol = 1e-10);

/// Eigenvalues only, sorted by (Re, Im).
CVector eigvals(const CMatrix& a);

/// Closed-form inverse of the Cauchy matrix C_ij = 1/(a_i + b_j)
/// via the product formula; no linear solve involved.
CMatrix cauchy_inverse(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Doubled matrix: 2N x 2N with block (i,j) = M_ij * I_2.
CMatrix doubled(const CMatrix& m);

struct Disc {
  cplx center;
  double radius;
};

/// Gershgorin discs (row sums).
std::vector<Disc> gershgorin(const CMatrix& m);

/// Coefficients of det(xI - M), highest power first (monic).
CVector char_poly(const CMatrix& m);

}  // namespace hwm::linalg
