#include "hwm/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace hwm {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateNodes: return "DegenerateNodes";
    case ErrorCode::NotTraceless: return "NotTraceless";
    case ErrorCode::NotNilpotent: return "NotNilpotent";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::ZeroSpin: return "ZeroSpin";
    case ErrorCode::PoleCollision: return "PoleCollision";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ResolventSingular: return "ResolventSingular";
    case ErrorCode::SingularSpectrum: return "SingularSpectrum";
    case ErrorCode::WitnessInvalid: return "WitnessInvalid";
    case ErrorCode::MatchingAmbiguous: return "MatchingAmbiguous";
    case ErrorCode::OffsetNotUpperHalf: return "OffsetNotUpperHalf";
    case ErrorCode::NoOrthogonalDirection: return "NoOrthogonalDirection";
    case ErrorCode::BranchDegenerate: return "BranchDegenerate";
    case ErrorCode::ZeroTransverse: return "ZeroTransverse";
    case ErrorCode::SpeedUnit: return "SpeedUnit";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace hwm

namespace hwm::linalg {

namespace {

bool lex_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

Eigensystem eig_dense(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) fail(ErrorCode::InvalidInput, "eig_dense needs a square matrix");
  if (!all_finite(a)) fail(ErrorCode::InvalidInput, "eig_dense: non-finite entries");
  const Eigen::Index n = a.rows();

  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::NonConvergence, "complex eigensolver did not converge");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return lex_less(solver.eigenvalues()(i), solver.eigenvalues()(j));
  });

  Eigensystem es;
  es.values.resize(n);
  es.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    es.values(k) = solver.eigenvalues()(order[k]);
    es.vectors.col(k) = solver.eigenvectors().col(order[k]).normalized();
  }

  const double scale = std::max(1.0, max_abs(a));
  double res = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    res = std::max(res, (a * es.vectors.col(k) - es.values(k) * es.vectors.col(k)).norm());
  es.residual = res / scale;
  if (es.residual > tol)
    fail(ErrorCode::NonConvergence, "eigen residual " + std::to_string(es.residual) +
                                        " above tolerance " + std::to_string(tol));

  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      gap = std::min(gap, std::abs(es.values(i) - es.values(j)));
  es.near_degenerate = (n > 1 && gap < 1e-9 * scale);
  return es;
}

CVector eigvals(const CMatrix& a) {
  if (a.rows() != a.cols()) fail(ErrorCode::InvalidInput, "eigvals needs a square matrix");
  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::NonConvergence, "complex eigensolver did not converge");
  CVector v = solver.eigenvalues();
  std::sort(v.data(), v.data() + v.size(), lex_less);
  return v;
}

CMatrix cauchy_inverse(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const size_t n = a.size();
  if (b.size() != n || n == 0) fail(ErrorCode::InvalidInput, "cauchy_inverse: size mismatch");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (std::abs(a[j] + b[i]) == 0.0)
        fail(ErrorCode::DegenerateNodes, "a_j + b_i vanishes");
      if (i < j && (std::abs(a[i] - a[j]) == 0.0 || std::abs(b[i] - b[j]) == 0.0))
        fail(ErrorCode::DegenerateNodes, "repeated node");
    }

  // inv(C)_{ij} = prod_k (a_j+b_k)(a_k+b_i) /
  //   [ (a_j+b_i) prod_{k!=j}(a_j-a_k) prod_{k!=i}(b_i-b_k) ]
  CMatrix inv(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      cplx num = 1.0, den = a[j] + b[i];
      for (size_t k = 0; k < n; ++k) {
        num *= (a[j] + b[k]) * (a[k] + b[i]);
        if (k != j) den *= a[j] - a[k];
        if (k != i) den *= b[i] - b[k];
      }
      inv(i, j) = num / den;
    }
  return inv;
}

CMatrix doubled(const CMatrix& m) {
  if (m.rows() != m.cols()) fail(ErrorCode::InvalidInput, "doubled needs a square matrix");
  const Eigen::Index n = m.rows();
  CMatrix d = CMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      d(2 * i, 2 * j) = m(i, j);
      d(2 * i + 1, 2 * j + 1) = m(i, j);
    }
  return d;
}

std::vector<Disc> gershgorin(const CMatrix& m) {
  if (m.rows() != m.cols()) fail(ErrorCode::InvalidInput, "gershgorin needs a square matrix");
  std::vector<Disc> discs(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (j != i) r += std::abs(m(i, j));
    discs[i] = {m(i, i), r};
  }
  return discs;
}

CVector char_poly(const CMatrix& m) {
  // From the spectrum; N is small and a Schur pass is already exact enough.
  CVector roots = eigvals(m);
  const Eigen::Index n = roots.size();
  CVector coeff = CVector::Zero(n + 1);
  coeff(0) = 1.0;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = k + 1; i >= 1; --i)
      coeff(i) -= roots(k) * coeff(i - 1);
  return coeff;
}

}  // namespace hwm::linalg
