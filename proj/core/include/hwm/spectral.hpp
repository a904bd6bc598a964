#pragma once

#include <optional>
#include <vector>

#include "hwm/base.hpp"
#include "hwm/dynamics.hpp"
#include "hwm/linalg.hpp"
#include "hwm/model.hpp"

namespace hwm::spectral {

/// Diagonal factors of a rank-1 nilpotent 2x2 matrix A = e xi^T
/// (equivalently A = E H F with E = diag(e), F = diag(xi), H the all-ones
/// matrix). Normalized so |e| = |xi| and the first nonzero entry of e is
/// real positive.
struct HalfSpin {
  Eigen::Vector2cd e;
  Eigen::Vector2cd xi;
};

HalfSpin halfspin_decompose(const CMatrix& a);

/// Lax matrices in the symmetric-branch form:
///   S_ij = sqrt(-2 s_i . s_j) (principal branch), S_ii = 0
///   L_ij = S_ij/(x_i - x_j),  L_ii = xdot_i
///   B_ij = L_ij/(x_i - x_j),  B_ii = 0
struct LaxData {
  CMatrix L, B, S, X;
};

LaxData build_matsuno(const model::Configuration& cfg, const std::vector<cplx>& velocities,
                      int anchor = -1);
LaxData build_matsuno(const dynamics::State& state, int anchor = -1);

/// Half-spin Lax matrix
///   L_jk = delta_jk xdot_j + (1 - delta_jk) i (xi_j . e_k)/(x_j - x_k),
/// built from factors of the Pauli matrices of the stored spins. The i keeps
/// its characteristic polynomial equal to the symmetric-branch form's.
CMatrix build_L(const model::Configuration& cfg, const std::vector<cplx>& velocities,
                const std::vector<HalfSpin>& halfspins);

/// Frozen t=0 data powering the resolvent formula.
struct ExplicitData {
  std::vector<HalfSpin> halfspins;
  CMatrix X0;  // diag(x_j)
  CMatrix L0;  // half-spin L
  double sign = -1.0;  // calibrated at build against the direct pole sum
};

ExplicitData make_explicit(const model::Configuration& cfg);
ExplicitData make_explicit(const model::Configuration& cfg, const std::vector<cplx>& velocities);

/// Resolvent formula: returns sum_j A_j(t)/(x - x_j(t)) as a 2x2 matrix,
/// A_j the Pauli matrices of the stored spins.
CMatrix explicit_pi_minus(const ExplicitData& data, double t, cplx x);

/// Poles of the solution at time t: eigenvalues of X0 + t L0, sorted (Re, Im).
CVector poles_at(const ExplicitData& data, double t);

struct Spectrum {
  CVector values;
  bool nonsingular = false;
};

Spectrum spectrum(const CMatrix& l, double gap_tol);

/// Per-sample Lax matrices along a trajectory: one anchor for the whole
/// series, with diagonal +-1 gauge flips applied for continuity whenever an
/// anchor-row branch crosses the principal cut. The flips are similarity
/// transforms, so spectra are untouched; they make the entrywise series
/// smooth for finite differencing.
std::vector<LaxData> lax_series(const dynamics::Trajectory& traj);

/// Max finite-difference Lax residual ||dL/dt - [B,L]||_max over interior
/// samples of a uniform-stride trajectory (branch-aligned).
double lax_residual(const dynamics::Trajectory& traj);

}  // namespace hwm::spectral
