#include "hwm/constructor.hpp"

#include <cmath>

namespace hwm::constructor {

namespace {
constexpr cplx kI{0.0, 1.0};
}

void Targets::validate() const {
  if (w.empty()) fail(ErrorCode::InvalidInput, "no target speeds");
  if (!(epsilon > 0)) fail(ErrorCode::InvalidInput, "epsilon must be positive");
  for (size_t j = 0; j < w.size(); ++j) {
    if (std::abs(std::abs(w[j]) - 1.0) < 1e-12)
      fail(ErrorCode::SpeedUnit, "target speed " + std::to_string(w[j]) + " has unit modulus");
    if (std::abs(w[j]) > 1.0)
      fail(ErrorCode::InvalidInput, "target speed exceeds 1 in modulus");
    for (size_t k = j + 1; k < w.size(); ++k)
      if (w[j] == w[k]) fail(ErrorCode::InvalidInput, "repeated target speed");
  }
  if (spacing && !(*spacing > 0)) fail(ErrorCode::InvalidInput, "spacing must be positive");
}

double Targets::nu() const {
  if (w.size() < 2) return std::numeric_limits<double>::infinity();
  double nu = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < w.size(); ++j)
    for (size_t k = j + 1; k < w.size(); ++k) nu = std::min(nu, std::abs(w[j] - w[k]));
  return nu;
}

model::Configuration approximate_ic(const Targets& targets, double spacing) {
  targets.validate();
  model::Configuration cfg;
  cfg.m0 = Vec3(0, 0, 1);
  for (double wj : targets.w) {
    // one-soliton closure: s = (2 e^{i th}, 2 e^{-i th}, gamma),
    // cos 2th = -(1-w^2)/(1+w^2) <= 0 so gamma = 2 sqrt(2|cos 2th|) is real
    // and s.s = 0; the sign of th selects the signed speed -cot(th) = w.
    const double c2t = -(1.0 - wj * wj) / (1.0 + wj * wj);
    double theta = 0.5 * std::acos(c2t);
    if (wj > 0) theta = -theta;
    const double gamma = 2.0 * std::sqrt(2.0 * std::abs(c2t));
    model::Spin s(2.0 * std::exp(kI * theta), 2.0 * std::exp(-kI * theta), gamma);
    const double n2 = std::real(hdot(s, s));
    cfg.spins.push_back(s);
    cfg.poles.push_back(cplx(spacing * wj, n2 / (2.0 * gamma)));
  }
  return cfg;
}

Functionals functional_F(const std::vector<cplx>& poles, const std::vector<model::Spin>& h) {
  const int n = static_cast<int>(poles.size());
  if (static_cast<int>(h.size()) != n) fail(ErrorCode::InvalidInput, "size mismatch");
  model::Configuration cfg;
  cfg.spins = h;
  cfg.poles = poles;
  Functionals f;
  f.F.resize(n);
  f.Ftilde.resize(n);
  for (int j = 0; j < n; ++j) {
    f.F[j] = model::local_field(cfg, j);
    f.Ftilde[j] = f.F[j] - kI * cfg.m0.cast<cplx>();
  }
  return f;
}

std::vector<Vec3c> t_step(const std::vector<model::Spin>& spins, const std::vector<cplx>& poles) {
  const int n = static_cast<int>(poles.size());
  const Functionals f = functional_F(poles, spins);
  std::vector<Vec3c> t(n);
  for (int j = 0; j < n; ++j) {
    const Vec3c& s = spins[j];
    const cplx r = bdot(s, f.F[j]);
    const double ix = poles[j].imag();
    const double perp2 = std::norm(s(0)) + std::norm(s(1));
    if (perp2 < 1e-24 * std::real(hdot(s, s)))
      fail(ErrorCode::ZeroTransverse, "spin " + std::to_string(j) + " parallel to m0");

    // unknowns z = (Re t1, Im t1, Re t2, Im t2, rho) with t3 = iR + rho/Ix;
    // rows: s.t = 0 (2) and Re(hdot(t, s)) = rho (1); minimum-norm solve.
    Eigen::Matrix<double, 3, 5> m;
    Eigen::Vector3d rhs;
    const cplx s1 = s(0), s2 = s(1), s3 = s(2);
    m << s1.real(), -s1.imag(), s2.real(), -s2.imag(), (s3 / ix).real(),
         s1.imag(),  s1.real(), s2.imag(),  s2.real(), (s3 / ix).imag(),
         s1.real(),  s1.imag(), s2.real(),  s2.imag(), (std::conj(s3) / ix).real() - 1.0;
    const cplx c0 = s3 * (kI * r);
    rhs << -c0.real(), -c0.imag(), -std::real(std::conj(s3) * (kI * r));
    const Eigen::Matrix<double, 5, 1> z =
        m.bdcSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(rhs);
    t[j] = Vec3c(cplx(z(0), z(1)), cplx(z(2), z(3)), kI * r + z(4) / ix);
  }
  return t;
}

std::vector<Vec3c> h_step(const std::vector<model::Spin>& spins, const std::vector<Vec3c>& t,
                          const std::vector<cplx>& poles) {
  const int n = static_cast<int>(poles.size());
  std::vector<model::Spin> st(n);
  for (int j = 0; j < n; ++j) st[j] = spins[j] + t[j];
  const Functionals f = functional_F(poles, st);

  std::vector<Vec3c> h(n);
  for (int j = 0; j < n; ++j) {
    Vec3c k(f.F[j](1), -f.F[j](0), cplx(0, 0));
    const double kn = norm(k);
    if (kn < 1e-14 * std::max(1.0, norm(f.F[j])))
      fail(ErrorCode::NoOrthogonalDirection, "field has no transverse part at " + std::to_string(j));
    k /= kn;
    const cplx a = bdot(k, k);
    if (std::abs(a) < 1e-12)
      fail(ErrorCode::BranchDegenerate, "isotropic transverse direction at " + std::to_string(j));
    const cplx b = 2.0 * bdot(k, st[j]);
    const cplx c = bdot(t[j], t[j]) + 2.0 * bdot(spins[j], t[j]);
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    const cplx r1 = (-b + disc) / (2.0 * a);
    const cplx r2 = (-b - disc) / (2.0 * a);
    // smaller correction; computed through the root product when it is the
    // cancellation-prone one
    cplx p;
    if (std::abs(r1) <= std::abs(r2)) {
      p = (std::abs(r2) > 0) ? (c / a) / r2 : r1;
    } else {
      p = (std::abs(r1) > 0) ? (c / a) / r1 : r2;
    }
    h[j] = p * k;
  }
  return h;
}

BuildResult fixpoint(const Targets& targets, double tol, int max_iter) {
  targets.validate();
  const int n = static_cast<int>(targets.w.size());
  const double nu = targets.nu();

  double spacing = targets.spacing
                       ? *targets.spacing
                       : std::max(1e2 * n * 10.0 / (std::min(nu, 1.0) * targets.epsilon), 1e3);

  for (int doubling = 0; doubling <= 8; ++doubling) {
    model::Configuration cfg = approximate_ic(targets, spacing);
    BuildReport report;
    report.d_used = spacing;
    report.doublings = doubling;

    auto residual = [&]() {
      double r = 0.0;
      const Functionals f = functional_F(cfg.poles, cfg.spins);
      for (int j = 0; j < n; ++j) r = std::max(r, std::abs(bdot(cfg.spins[j], f.F[j])));
      return r;
    };

    report.residual_history.push_back(residual());
    bool converged = report.residual_history.back() < tol;
    for (int l = 0; l < max_iter && !converged; ++l) {
      const std::vector<Vec3c> t = t_step(cfg.spins, cfg.poles);
      const std::vector<Vec3c> hc = h_step(cfg.spins, t, cfg.poles);
      for (int j = 0; j < n; ++j) cfg.spins[j] += t[j] + hc[j];
      report.residual_history.push_back(residual());
      report.iterations = l + 1;
      const size_t m = report.residual_history.size();
      if (m >= 3) {
        const double ratio = report.residual_history[m - 1] /
                             std::max(report.residual_history[m - 2], 1e-300);
        report.geometric_ratio = std::max(report.geometric_ratio, std::min(ratio, 1e3));
        if (ratio > 1.0 && report.residual_history[m - 1] > 1e-6) break;  // diverging
      }
      converged = report.residual_history.back() < tol;
    }

    if (converged) {
      const std::vector<cplx> v = model::velocity_from_constraints(cfg);
      bool speeds_ok = true;
      report.final_speed_errors.resize(n);
      for (int j = 0; j < n; ++j) {
        report.final_speed_errors[j] = std::abs(v[j] - targets.w[j]);
        if (report.final_speed_errors[j] > 12.0 * targets.epsilon) speeds_ok = false;
      }
      if (speeds_ok) return {std::move(cfg), std::move(report)};
    }
    spacing *= 2.0;
  }
  fail(ErrorCode::NoConvergence, "fixpoint did not converge within 8 spacing doublings");
}

}  // namespace hwm::constructor
