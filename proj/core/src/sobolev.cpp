#include "hwm/sobolev.hpp"

#include <cmath>
#include <functional>

namespace hwm::sobolev {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// ---- adaptive Gauss-Kronrod (G7, K15) on finite intervals ----

constexpr double kKronrodNodes[8] = {
    0.00000000000000000, 0.20778495500789847, 0.40584515137739717, 0.58608723546769113,
    0.74153118559939444, 0.86486442335976907, 0.94910791234275852, 0.99145537112081264};
constexpr double kKronrodWeights[8] = {
    0.20948214108472783, 0.20443294007529889, 0.19035057806478541, 0.16900472663926790,
    0.14065325971552592, 0.10479001032225018, 0.06309209262997855, 0.02293532201052922};
constexpr double kGaussWeights[4] = {
    0.41795918367346939, 0.38183005050511894, 0.27970539148927667, 0.12948496616886969};

struct Panel {
  double a, b, value, error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double kron = 0.0, gauss = 0.0;
  const double f0 = f(c);
  kron += kKronrodWeights[0] * f0;
  gauss += kGaussWeights[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double fp = f(c + h * kKronrodNodes[i]);
    const double fm = f(c - h * kKronrodNodes[i]);
    kron += kKronrodWeights[i] * (fp + fm);
    if (i % 2 == 0) gauss += kGaussWeights[i / 2] * (fp + fm);
  }
  const double value = kron * h;
  const double err = std::abs((kron - gauss) * h);
  return {a, b, value, std::pow(200.0 * err, 1.5)};
}

double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                int max_panels = 4000) {
  std::vector<Panel> panels{gk15(f, a, b)};
  while (true) {
    double total = 0.0, err = 0.0;
    size_t worst = 0;
    for (size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].error;
      if (panels[i].error > panels[worst].error) worst = i;
    }
    if (err < abs_tol) return total;
    if (static_cast<int>(panels.size()) >= max_panels)
      fail(ErrorCode::QuadratureBudgetExceeded,
           "error " + std::to_string(err) + " after " + std::to_string(panels.size()) + " panels");
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    panels[worst] = gk15(f, p.a, mid);
    panels.push_back(gk15(f, mid, p.b));
  }
}

}  // namespace

void RationalProfile::validate() const {
  for (const auto& t : terms)
    if (!(t.pole.imag() > 0)) fail(ErrorCode::InvalidInput, "profile pole not in upper half-plane");
}

RationalProfile RationalProfile::from_configuration(const model::Configuration& cfg) {
  RationalProfile p;
  p.terms.reserve(cfg.size());
  for (int j = 0; j < cfg.size(); ++j)
    p.terms.push_back({kI * cfg.spins[j], cfg.poles[j]});  // physical coefficient i s_j
  return p;
}

cplx inner_l2(const Term& a, const Term& b) {
  return 2.0 * kI * kPi * hdot(a.coeff, b.coeff) / (a.pole - std::conj(b.pole));
}

double hk_diag(const Term& a, int k) {
  if (k < 0) fail(ErrorCode::InvalidInput, "negative derivative order");
  const double n2 = std::real(hdot(a.coeff, a.coeff));
  // sqrt(pi) Gamma(k+1/2)/Gamma(k+1) = pi (2k)! / (4^k (k!)^2)
  const double gamma_ratio = kPi * factorial(2 * k) / (std::pow(4.0, k) * factorial(k) * factorial(k));
  return factorial(k) * factorial(k) * n2 / std::pow(a.pole.imag(), 2 * k + 1) * gamma_ratio;
}

cplx hk_inner(const Term& a, const Term& b, int k) {
  if (k < 0) fail(ErrorCode::InvalidInput, "negative derivative order");
  const cplx denom = std::pow(a.pole - std::conj(b.pole), 2 * k + 1);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return 2.0 * kI * kPi * sign * factorial(2 * k) * hdot(a.coeff, b.coeff) / denom;
}

double norm_diff_half(const RationalProfile& a, const RationalProfile& b) {
  a.validate();
  b.validate();
  std::vector<std::pair<Term, double>> joint;
  for (const auto& t : a.terms) joint.push_back({t, 1.0});
  for (const auto& t : b.terms) joint.push_back({t, -1.0});
  cplx total = 0.0;
  for (const auto& [ti, si] : joint)
    for (const auto& [tj, sj] : joint)
      total += -4.0 * kPi * si * sj * hdot(ti.coeff, tj.coeff) /
               ((ti.pole - std::conj(tj.pole)) * (ti.pole - std::conj(tj.pole)));
  return std::max(total.real(), 0.0);
}

double closed_norm(const RationalProfile& profile, const NormKind& kind) {
  if (std::holds_alternative<HalfDotKind>(kind)) {
    return norm_diff_half(profile, RationalProfile{});
  }
  const int k = std::holds_alternative<L2Kind>(kind) ? 0 : std::get<HkKind>(kind).k;
  cplx total = 0.0;
  for (const auto& ti : profile.terms)
    for (const auto& tj : profile.terms) total += hk_inner(ti, tj, k);
  return total.real();
}

double quadrature_oracle(const RationalProfile& profile, const NormKind& kind, double abs_tol) {
  profile.validate();
  if (profile.terms.empty()) return 0.0;

  double coeff_sum = 0.0, min_im = std::numeric_limits<double>::infinity();
  double re_lo = std::numeric_limits<double>::infinity();
  double re_hi = -std::numeric_limits<double>::infinity();
  for (const auto& t : profile.terms) {
    coeff_sum += norm(t.coeff);
    min_im = std::min(min_im, t.pole.imag());
    re_lo = std::min(re_lo, t.pole.real());
    re_hi = std::max(re_hi, t.pole.real());
  }

  if (std::holds_alternative<HalfDotKind>(kind)) {
    // Fourier side: full field including conjugate partner,
    //   4 pi Int_0^inf u |sum_j c_j e^{i u p_j}|^2 du,
    // integrand decaying like e^{-2 u min_im}.
    auto g = [&](double u) {
      Vec3c v = Vec3c::Zero();
      for (const auto& t : profile.terms) v += t.coeff * std::exp(kI * (u * t.pole));
      return 4.0 * kPi * u * std::real(hdot(v, v));
    };
    // truncation: tail < coeff_sum^2 * 4pi * Int_U^inf u e^{-2 min_im u} du
    double upper = 1.0;
    auto tail = [&](double u) {
      return 4.0 * kPi * coeff_sum * coeff_sum * std::exp(-2.0 * min_im * u) *
             (u / (2.0 * min_im) + 1.0 / (4.0 * min_im * min_im));
    };
    while (tail(upper) > 0.25 * abs_tol && upper < 1e6) upper *= 1.5;
    return adaptive(g, 0.0, upper, 0.5 * abs_tol);
  }

  const int k = std::holds_alternative<L2Kind>(kind) ? 0 : std::get<HkKind>(kind).k;
  const double fk = factorial(k);
  auto f = [&](double x) {
    Vec3c v = Vec3c::Zero();
    for (const auto& t : profile.terms) v += fk * t.coeff / std::pow(x - t.pole, k + 1);
    return std::real(hdot(v, v));
  };
  // |f|^2 <= (k! coeff_sum)^2 / dist^{2k+2}; integrate the center directly and
  // the tails under x -> center +- 1/u to keep infinity at a finite endpoint
  const double center_lo = re_lo - 10.0 * (1.0 + min_im);
  const double center_hi = re_hi + 10.0 * (1.0 + min_im);
  double total = adaptive(f, center_lo, center_hi, 0.5 * abs_tol);
  auto tail_hi = [&](double u) {  // x = center_hi + (1-u)/u, u in (0,1]
    if (u <= 0.0) return 0.0;
    const double x = center_hi + (1.0 - u) / u;
    return f(x) / (u * u);
  };
  auto tail_lo = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double x = center_lo - (1.0 - u) / u;
    return f(x) / (u * u);
  };
  total += adaptive(tail_hi, 0.0, 1.0, 0.25 * abs_tol);
  total += adaptive(tail_lo, 0.0, 1.0, 0.25 * abs_tol);
  return total;
}

}  // namespace hwm::sobolev
