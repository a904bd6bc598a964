#include "hwm/spectral.hpp"

#include <cmath>

namespace hwm::spectral {

namespace {
constexpr cplx kI{0.0, 1.0};
}

HalfSpin halfspin_decompose(const CMatrix& a) {
  if (a.rows() != 2 || a.cols() != 2) fail(ErrorCode::InvalidInput, "halfspin needs 2x2");
  const double scale = max_abs(a);
  if (scale == 0.0) fail(ErrorCode::ZeroMatrix, "zero spin matrix");
  if (max_abs(a * a) > 1e-10 * scale * scale)
    fail(ErrorCode::NotNilpotent, "matrix square does not vanish");

  // rank-1: e = dominant column, xi from the dominant row of that column
  const int col = (std::abs(a(0, 0)) + std::abs(a(1, 0)) >= std::abs(a(0, 1)) + std::abs(a(1, 1)))
                      ? 0
                      : 1;
  Eigen::Vector2cd e = a.col(col);
  const int row = (std::abs(e(0)) >= std::abs(e(1))) ? 0 : 1;
  Eigen::Vector2cd xi(a(row, 0) / e(row), a(row, 1) / e(row));

  const double c = std::sqrt(xi.norm() / e.norm());
  e *= c;
  xi /= c;
  const int lead = (std::abs(e(0)) > 1e-300) ? 0 : 1;
  const cplx phase = e(lead) / std::abs(e(lead));
  e /= phase;
  xi *= phase;
  return {e, xi};
}

LaxData build_matsuno(const model::Configuration& cfg, const std::vector<cplx>& velocities,
                      int anchor) {
  const int n = cfg.size();
  if (static_cast<int>(velocities.size()) != n)
    fail(ErrorCode::InvalidInput, "velocity count mismatch");
  LaxData lax;
  lax.S = CMatrix::Zero(n, n);
  lax.L = CMatrix::Zero(n, n);
  lax.B = CMatrix::Zero(n, n);
  lax.X = CMatrix::Zero(n, n);

  if (anchor < 0) {
    // default anchor: the spin whose pairings with the others are best
    // conditioned
    anchor = 0;
    double best = -1.0;
    for (int a = 0; a < n; ++a) {
      double worst = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k)
        if (k != a) worst = std::min(worst, std::abs(bdot(cfg.spins[a], cfg.spins[k])));
      if (worst > best) {
        best = worst;
        anchor = a;
      }
    }
  }

  // anchor row and column: symmetric principal branch of sqrt(-2 s_a.s_k);
  // remaining entries are pinned by the closed 3-cycles through the anchor,
  //   S_aj S_jk S_ka = 2 det[s_a, s_j, s_k],
  // which keeps every pair product at -2 s_j.s_k (Gram identity for
  // nilpotent spins) and is the assignment the Lax equation propagates.
  for (int k = 0; k < n; ++k) {
    if (k == anchor) continue;
    lax.S(anchor, k) = std::sqrt(-2.0 * bdot(cfg.spins[anchor], cfg.spins[k]));
    lax.S(k, anchor) = lax.S(anchor, k);
  }
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k || j == anchor || k == anchor) continue;
      const cplx denom = lax.S(anchor, j) * lax.S(k, anchor);
      const cplx det = bdot(cross(cfg.spins[anchor], cfg.spins[j]), cfg.spins[k]);
      if (std::abs(denom) > 1e-14 * std::max(1.0, std::abs(det))) {
        lax.S(j, k) = 2.0 * det / denom;
      } else {
        // orthogonal anchor pairings (e.g. mutually parallel nilpotent
        // spins): fall back to the principal branch
        lax.S(j, k) = std::sqrt(-2.0 * bdot(cfg.spins[j], cfg.spins[k]));
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    lax.L(i, i) = velocities[i];
    lax.X(i, i) = cfg.poles[i];
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const cplx dx = cfg.poles[i] - cfg.poles[j];
      lax.L(i, j) = lax.S(i, j) / dx;
      lax.B(i, j) = lax.L(i, j) / dx;  // branch-consistent: no second square root
    }
  }
  return lax;
}

LaxData build_matsuno(const dynamics::State& state, int anchor) {
  model::Configuration cfg;
  cfg.spins = state.spins;
  cfg.poles = state.poles;
  return build_matsuno(cfg, state.pole_velocities, anchor);
}

CMatrix build_L(const model::Configuration& cfg, const std::vector<cplx>& velocities,
                const std::vector<HalfSpin>& halfspins) {
  const int n = cfg.size();
  CMatrix l = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    l(j, j) = velocities[j];
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const cplx dot = halfspins[j].xi(0) * halfspins[k].e(0) + halfspins[j].xi(1) * halfspins[k].e(1);
      l(j, k) = kI * dot / (cfg.poles[j] - cfg.poles[k]);
    }
  }
  return l;
}

ExplicitData make_explicit(const model::Configuration& cfg) {
  return make_explicit(cfg, model::velocity_from_constraints(cfg));
}

namespace {

CMatrix resolvent_sum(const ExplicitData& data, double t, cplx x, double sign) {
  const Eigen::Index n = data.X0.rows();
  const CMatrix r = (data.X0 + t * data.L0 - x * CMatrix::Identity(n, n)).inverse();
  CMatrix m = CMatrix::Zero(2, 2);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      m += r(j, k) * (data.halfspins[j].e * data.halfspins[k].xi.transpose());
  return sign * m;
}

}  // namespace

ExplicitData make_explicit(const model::Configuration& cfg, const std::vector<cplx>& velocities) {
  cfg.validate();
  ExplicitData data;
  data.halfspins.reserve(cfg.size());
  for (int j = 0; j < cfg.size(); ++j)
    data.halfspins.push_back(halfspin_decompose(model::to_pauli(cfg.spins[j])));
  data.X0 = CMatrix::Zero(cfg.size(), cfg.size());
  for (int j = 0; j < cfg.size(); ++j) data.X0(j, j) = cfg.poles[j];
  data.L0 = build_L(cfg, velocities, data.halfspins);

  // fix the overall sign once against the direct pole sum at t = 0
  double re_mean = 0.0, im_max = 0.0;
  for (const auto& p : cfg.poles) {
    re_mean += p.real() / cfg.size();
    im_max = std::max(im_max, p.imag());
  }
  const cplx probe(re_mean + 0.37, 2.0 * im_max + 3.7);
  CMatrix direct = CMatrix::Zero(2, 2);
  for (int j = 0; j < cfg.size(); ++j)
    direct += model::to_pauli(cfg.spins[j]) / (probe - cfg.poles[j]);
  const double err_minus = max_abs(resolvent_sum(data, 0.0, probe, -1.0) - direct);
  const double err_plus = max_abs(resolvent_sum(data, 0.0, probe, +1.0) - direct);
  data.sign = (err_minus <= err_plus) ? -1.0 : 1.0;
  return data;
}

CMatrix explicit_pi_minus(const ExplicitData& data, double t, cplx x) {
  const CVector poles = poles_at(data, t);
  for (Eigen::Index j = 0; j < poles.size(); ++j)
    if (std::abs(x - poles(j)) < 1e-10)
      fail(ErrorCode::ResolventSingular, "evaluation point within 1e-10 of a pole");
  return resolvent_sum(data, t, x, data.sign);
}

CVector poles_at(const ExplicitData& data, double t) {
  return linalg::eigvals(data.X0 + t * data.L0);
}

Spectrum spectrum(const CMatrix& l, double gap_tol) {
  Spectrum sp;
  sp.values = linalg::eigvals(l);
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sp.values.size(); ++i)
    for (Eigen::Index j = i + 1; j < sp.values.size(); ++j)
      gap = std::min(gap, std::abs(sp.values(i) - sp.values(j)));
  sp.nonsingular = (sp.values.size() < 2) || gap > gap_tol;
  return sp;
}

std::vector<LaxData> lax_series(const dynamics::Trajectory& traj) {
  std::vector<LaxData> series;
  series.reserve(traj.samples.size());
  if (traj.samples.empty()) return series;

  // one anchor for the whole series
  model::Configuration first;
  first.spins = traj.samples.front().state.spins;
  first.poles = traj.samples.front().state.poles;
  int anchor = 0;
  double best = -1.0;
  const int n = first.size();
  for (int a = 0; a < n; ++a) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k)
      if (k != a) worst = std::min(worst, std::abs(bdot(first.spins[a], first.spins[k])));
    if (worst > best) {
      best = worst;
      anchor = a;
    }
  }

  for (const auto& sample : traj.samples) {
    LaxData lax = build_matsuno(sample.state, anchor);
    if (!series.empty()) {
      // diagonal +-1 gauge continuity: a principal-cut crossing on an
      // anchor-row entry shows up as a sign flip of row+column j
      const LaxData& prev = series.back();
      std::vector<double> tau(n, 1.0);
      for (int j = 0; j < n; ++j) {
        if (j == anchor) continue;
        if (std::abs(lax.S(anchor, j) - prev.S(anchor, j)) >
            std::abs(lax.S(anchor, j) + prev.S(anchor, j)))
          tau[j] = -1.0;
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double g = tau[i] * tau[j];
          lax.S(i, j) *= g;
          lax.L(i, j) *= g;
          lax.B(i, j) *= g;
        }
    }
    series.push_back(std::move(lax));
  }
  return series;
}

double lax_residual(const dynamics::Trajectory& traj) {
  if (traj.samples.size() < 3) fail(ErrorCode::InsufficientSamples, "need >= 3 samples");
  const double h = traj.samples[1].t - traj.samples[0].t;
  for (size_t i = 1; i + 1 < traj.samples.size(); ++i) {
    const double hi = traj.samples[i + 1].t - traj.samples[i].t;
    if (std::abs(hi - h) > 1e-9 * std::abs(h))
      fail(ErrorCode::InsufficientSamples, "non-uniform sample stride");
  }
  const std::vector<LaxData> series = lax_series(traj);
  double worst = 0.0;
  for (size_t i = 1; i + 1 < series.size(); ++i) {
    const CMatrix ldot = (series[i + 1].L - series[i - 1].L) / (2.0 * h);
    const CMatrix comm = series[i].B * series[i].L - series[i].L * series[i].B;
    worst = std::max(worst, max_abs(ldot - comm));
  }
  return worst;
}

}  // namespace hwm::spectral
