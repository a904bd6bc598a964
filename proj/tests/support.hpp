#pragma once

#include <random>

#include "hwm/constructor.hpp"
#include "hwm/dynamics.hpp"
#include "hwm/linalg.hpp"
#include "hwm/model.hpp"
#include "hwm/spectral.hpp"

namespace hwm::testing {

inline Vec3c random_spin(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return Vec3c(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
}

/// Random nilpotent spin: u + i v with |u| = |v|, u.v = 0 makes (u+iv)^2 = 0.
inline Vec3c random_nilpotent_spin(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::Vector3d u(g(rng), g(rng), g(rng));
  Eigen::Vector3d w(g(rng), g(rng), g(rng));
  Eigen::Vector3d v = w - w.dot(u) / u.squaredNorm() * u;
  v *= u.norm() / v.norm();
  return u.cast<cplx>() + cplx(0, 1) * v.cast<cplx>();
}

inline constructor::BuildResult build(const std::vector<double>& w, double spacing,
                                      double epsilon = 0.01) {
  constructor::Targets t;
  t.w = w;
  t.epsilon = epsilon;
  t.spacing = spacing;
  return constructor::fixpoint(t);
}

/// A constraint-valid configuration whose solitons interact near t = 0:
/// build at a comfortable spacing, locate the closest-approach epoch from the
/// eigenvalues of X(0) + t L(0), flow backward there and recenter.
inline dynamics::State interacting_state(const std::vector<double>& w, double spacing,
                                         double epoch_offset = 0.0) {
  const auto built = build(w, spacing);
  const auto initial = dynamics::State::from_configuration(built.configuration);
  const auto expl = spectral::make_explicit(built.configuration, initial.pole_velocities);

  double t_star = 0.0, best = std::numeric_limits<double>::infinity();
  const int steps = 3000;
  for (int i = 0; i <= steps; ++i) {
    const double t = -2.0 * spacing * i / steps;
    const CVector ev = spectral::poles_at(expl, t);
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < ev.size(); ++a)
      for (Eigen::Index b = a + 1; b < ev.size(); ++b)
        gap = std::min(gap, std::abs(ev(a) - ev(b)));
    if (gap < best) {
      best = gap;
      t_star = t;
    }
  }

  dynamics::TrajectoryOptions opts;
  opts.t_begin = 0.0;
  opts.t_end = t_star + epoch_offset;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-12;
  opts.max_step = 50.0;
  opts.sample_stride = std::abs(opts.t_end) + 1.0;  // endpoint only
  const auto traj = dynamics::integrate(initial, built.configuration.m0, opts);

  dynamics::State st = traj.samples.front().state;  // earliest time of the backward run
  double mean_re = 0.0;
  for (const auto& p : st.poles) mean_re += p.real() / st.size();
  for (auto& p : st.poles) p -= mean_re;

  // squeeze integration roundoff out of the nilpotency: move each spin onto
  // the null cone along conj(s), solving conj(c) r^2 + 2|s|^2 r + c = 0 for
  // the small root (c = s.s)
  for (auto& spin : st.spins) {
    for (int pass = 0; pass < 2; ++pass) {
      const cplx c = bdot(spin, spin);
      const double n2 = std::real(hdot(spin, spin));
      if (std::abs(c) < 1e-300) break;
      const cplx disc = std::sqrt(n2 * n2 - std::conj(c) * c);
      const cplx denom = n2 + disc;
      const cplx r = -c / denom;
      spin += r * spin.conjugate();
    }
  }
  st.pole_velocities = model::velocity_from_constraints(st.to_configuration(Vec3(0, 0, 1)));
  return st;
}

/// Exact traveling fixture: parallel nilpotent spins (so every s_i . s_j = 0)
/// with equal real velocities. Not constraint-valid, but invariant under the
/// flow: S = B = 0 and L = v I for all times. The base spin (1, i, 0) has an
/// exactly representable null square, so the S entries vanish in floating
/// point rather than at the sqrt(roundoff) scale.
inline dynamics::State traveling_state(double v = 0.35, double separation = 6.0) {
  dynamics::State st;
  const Vec3c s(cplx(1.25, 0), cplx(0, 1.25), cplx(0, 0));
  st.spins = {s, cplx(0.6, 0.8) * s};
  st.poles = {cplx(-separation / 2, 1.3), cplx(separation / 2, 2.1)};
  st.pole_velocities = {v, v};
  return st;
}

/// Max over a of the distance to the nearest element of b (multiset drift,
/// robust to ordering swaps of symmetric spectra).
inline double spectrum_drift(const CVector& a, const CVector& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < b.size(); ++j) best = std::min(best, std::abs(a(i) - b(j)));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace hwm::testing
