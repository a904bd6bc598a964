#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace hwm {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Dot products on C^3. The spin algebra uses the bilinear dot (no conjugation);
// norms and Sobolev pairings use the hermitian one.
inline cplx bdot(const Vec3c& a, const Vec3c& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

inline cplx hdot(const Vec3c& a, const Vec3c& b) {
  return a(0) * std::conj(b(0)) + a(1) * std::conj(b(1)) + a(2) * std::conj(b(2));
}

inline Vec3c cross(const Vec3c& a, const Vec3c& b) {
  return Vec3c(a(1) * b(2) - a(2) * b(1),
               a(2) * b(0) - a(0) * b(2),
               a(0) * b(1) - a(1) * b(0));
}

inline double norm(const Vec3c& a) { return std::sqrt(std::real(hdot(a, a))); }

inline bool all_finite(const CMatrix& m) { return m.allFinite(); }

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

enum class ErrorCode {
  NonConvergence,
  DegenerateNodes,
  NotTraceless,
  NotNilpotent,
  ZeroMatrix,
  ZeroSpin,
  PoleCollision,
  StepFailure,
  InsufficientSamples,
  ResolventSingular,
  SingularSpectrum,
  WitnessInvalid,
  MatchingAmbiguous,
  OffsetNotUpperHalf,
  NoOrthogonalDirection,
  BranchDegenerate,
  ZeroTransverse,
  SpeedUnit,
  NoConvergence,
  QuadratureBudgetExceeded,
  InvalidInput,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hwm
