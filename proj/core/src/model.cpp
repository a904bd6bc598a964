#include "hwm/model.hpp"

#include <cmath>

namespace hwm::model {

namespace {
constexpr cplx kI{0.0, 1.0};
}

void Configuration::validate(double m0_tol) const {
  if (spins.size() != poles.size())
    fail(ErrorCode::InvalidInput, "spin/pole count mismatch");
  if (spins.empty()) fail(ErrorCode::InvalidInput, "empty configuration");
  if (std::abs(m0.norm() - 1.0) > m0_tol)
    fail(ErrorCode::InvalidInput, "background m0 is not a unit vector");
  for (size_t j = 0; j < poles.size(); ++j) {
    if (!(poles[j].imag() > 0.0))
      fail(ErrorCode::InvalidInput, "pole " + std::to_string(j) + " not in the upper half-plane");
    for (size_t k = j + 1; k < poles.size(); ++k)
      if (poles[j] == poles[k]) fail(ErrorCode::InvalidInput, "repeated pole");
  }
}

CMatrix to_pauli(const Spin& s) {
  CMatrix a(2, 2);
  a(0, 0) = s(2);
  a(0, 1) = s(0) - kI * s(1);
  a(1, 0) = s(0) + kI * s(1);
  a(1, 1) = -s(2);
  return a;
}

Spin from_pauli(const CMatrix& a) {
  if (a.rows() != 2 || a.cols() != 2) fail(ErrorCode::InvalidInput, "from_pauli needs 2x2");
  if (std::abs(a(0, 0) + a(1, 1)) > 1e-12 * std::max(1.0, max_abs(a)))
    fail(ErrorCode::NotTraceless, "trace " + std::to_string(std::abs(a(0, 0) + a(1, 1))));
  Spin s;
  s(0) = (a(0, 1) + a(1, 0)) / 2.0;
  s(1) = (a(1, 0) - a(0, 1)) / (2.0 * kI);
  s(2) = (a(0, 0) - a(1, 1)) / 2.0;
  return s;
}

Vec3c local_field(const Configuration& cfg, int j) {
  const int n = cfg.size();
  Vec3c b = kI * cfg.m0.cast<cplx>();
  for (int k = 0; k < n; ++k) {
    if (k != j) b -= cfg.spins[k] / (cfg.poles[j] - cfg.poles[k]);
    b += cfg.spins[k].conjugate() / (cfg.poles[j] - std::conj(cfg.poles[k]));
  }
  return b;
}

Vec3c local_field_intro(const Configuration& cfg, int j) {
  const int n = cfg.size();
  Vec3c b = cfg.m0.cast<cplx>();
  for (int k = 0; k < n; ++k) {
    if (k != j) b += cfg.spins[k] / (cfg.poles[j] - cfg.poles[k]);
    b += cfg.spins[k].conjugate() / (cfg.poles[j] - std::conj(cfg.poles[k]));
  }
  return b;
}

ConstraintReport constraint_residuals(const Configuration& cfg) {
  ConstraintReport rep;
  const int n = cfg.size();
  rep.nilpotency.resize(n);
  rep.orthogonality.resize(n);
  rep.orthogonality_intro.resize(n);
  for (int j = 0; j < n; ++j) {
    rep.nilpotency[j] = std::abs(bdot(cfg.spins[j], cfg.spins[j]));
    rep.orthogonality[j] = std::abs(bdot(cfg.spins[j], local_field(cfg, j)));
    rep.orthogonality_intro[j] = std::abs(bdot(cfg.spins[j], local_field_intro(cfg, j)));
    rep.max_residual = std::max(rep.max_residual, rep.nilpotency[j]);
    rep.max_residual = std::max(rep.max_residual, rep.orthogonality[j]);
  }
  return rep;
}

std::vector<cplx> velocity_from_constraints(const Configuration& cfg) {
  const int n = cfg.size();
  std::vector<cplx> v(n);
  for (int j = 0; j < n; ++j) {
    const double n2 = std::real(hdot(cfg.spins[j], cfg.spins[j]));
    if (n2 <= 0.0) fail(ErrorCode::ZeroSpin, "spin " + std::to_string(j) + " vanishes");
    v[j] = bdot(cross(cfg.spins[j], cfg.spins[j].conjugate()), local_field(cfg, j)) / n2;
  }
  return v;
}

Vec3 evaluate(const Configuration& cfg, double x) {
  Vec3c m = cfg.m0.cast<cplx>();
  for (int j = 0; j < cfg.size(); ++j) {
    const Vec3c c = kI * cfg.spins[j];
    m += c / (x - cfg.poles[j]) + c.conjugate() / (x - std::conj(cfg.poles[j]));
  }
  // conjugate pairing makes the sum real; anything beyond rounding is a bug
  double imag = 0.0;
  for (int i = 0; i < 3; ++i) imag = std::max(imag, std::abs(m(i).imag()));
  if (imag > 1e-13 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    fail(ErrorCode::InvalidInput, "field value has imaginary part " + std::to_string(imag));
  return m.real();
}

}  // namespace hwm::model
