#pragma once

#include <vector>

#include "hwm/base.hpp"

namespace hwm::model {

using Spin = Vec3c;
using Pole = cplx;

/// Snapshot of a rational solution: unit background, N spins, N simple
/// upper-half-plane poles. The physical field is
///   m(x) = m0 + sum_j i s_j/(x - x_j) + conj. terms,
/// so the stored spins are the ones entering the constraint and Lax algebra.
struct Configuration {
  Vec3 m0 = Vec3(0, 0, 1);
  std::vector<Spin> spins;
  std::vector<Pole> poles;

  int size() const { return static_cast<int>(spins.size()); }
  void validate(double m0_tol = 1e-12) const;
};

struct ConstraintReport {
  std::vector<double> nilpotency;            // |s_j . s_j|
  std::vector<double> orthogonality;         // |s_j . B_j|, canonical field
  std::vector<double> orthogonality_intro;   // same with the plain-m0 field variant
  double max_residual = 0.0;                 // max over nilpotency and canonical orthogonality
};

constexpr double kConstraintTol = 1e-9;

/// Pauli representation A = s . sigma (bijective on traceless 2x2).
CMatrix to_pauli(const Spin& s);
Spin from_pauli(const CMatrix& a);

/// Canonical local field
///   B_j = i m0 - sum_{k!=j} s_k/(x_j-x_k) + sum_k conj(s_k)/(x_j - conj(x_k)),
/// whose k=j conjugate term equals conj(s_j)/(2i Im x_j).
Vec3c local_field(const Configuration& cfg, int j);

/// Intro-form variant (diagnostic only): m0 + sum_{k!=j} s_k/(x_j-x_k) + conj sum.
Vec3c local_field_intro(const Configuration& cfg, int j);

ConstraintReport constraint_residuals(const Configuration& cfg);

/// Pole velocities fixed by the constraints:
///   xdot_j = (s_j x conj(s_j))/|s_j|^2 . B_j.
std::vector<cplx> velocity_from_constraints(const Configuration& cfg);

/// Pointwise field value m(x) at real x (imaginary part checked and dropped).
Vec3 evaluate(const Configuration& cfg, double x);

}  // namespace hwm::model
