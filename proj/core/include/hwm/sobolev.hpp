#pragma once

#include <variant>
#include <vector>

#include "hwm/base.hpp"
#include "hwm/model.hpp"

namespace hwm::sobolev {

/// One negative-frequency term c/(x - p), Im p > 0. The physical function a
/// profile represents is sum_j c_j/(x-p_j) plus the conjugate partner; the
/// constant background is excluded from all norms.
struct Term {
  Vec3c coeff;
  cplx pole;
};

struct RationalProfile {
  std::vector<Term> terms;

  void validate() const;
  static RationalProfile from_configuration(const model::Configuration& cfg);
};

struct L2Kind {};
struct HalfDotKind {};
struct HkKind {
  int k = 1;
};
using NormKind = std::variant<L2Kind, HalfDotKind, HkKind>;

/// <c_i/(x-p_i), c_j/(x-p_j)>_{L2} = 2 i pi (c_i . conj(c_j)) / (p_i - conj(p_j)).
cplx inner_l2(const Term& a, const Term& b);

/// ||d^k/dx^k (c/(x-p))||^2_{L2}
///   = (k!)^2 |c|^2 / Im(p)^{2k+1} * sqrt(pi) Gamma(k+1/2) / Gamma(k+1).
double hk_diag(const Term& a, int k);

/// <d^k f_i, d^k f_j>_{L2} by the order-(k+1) residue:
///   2 i pi (-1)^k (2k)! (c_i . conj(c_j)) / (p_i - conj(p_j))^{2k+1}.
/// Reduces to inner_l2 at k = 0.
cplx hk_inner(const Term& a, const Term& b, int k);

/// Squared Hdot^{1/2} norm of the difference of the two physical fields
/// (conjugate partners included):
///   -4 pi sum_{j,k} sigma_j sigma_k <c_j, c_k> / (p_j - conj(p_k))^2
/// over the signed union of the profiles.
double norm_diff_half(const RationalProfile& a, const RationalProfile& b);

/// Squared norm of the profile's Pi_- part (L2, Hk) or of the full physical
/// field (HalfDot), by adaptive quadrature; independent of the closed forms.
double quadrature_oracle(const RationalProfile& profile, const NormKind& kind,
                         double abs_tol = 1e-10);

/// Closed-form counterpart of quadrature_oracle (pairwise sums).
double closed_norm(const RationalProfile& profile, const NormKind& kind);

}  // namespace hwm::sobolev
