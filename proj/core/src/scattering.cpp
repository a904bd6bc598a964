#include "hwm/scattering.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "hwm/linalg.hpp"

namespace hwm::scattering {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ScatterStats alpha_stats(const dynamics::State& state) {
  ScatterStats st;
  st.n = state.size();
  for (const auto& s : state.spins) st.S = std::max(st.S, norm(s));
  if (st.n < 2) {
    st.nu = kInf;
    st.D = kInf;
    st.alpha = kInf;
    return st;
  }
  st.nu = kInf;
  st.D = kInf;
  for (int j = 0; j < st.n; ++j)
    for (int k = j + 1; k < st.n; ++k) {
      st.nu = std::min(st.nu,
                       std::abs(state.pole_velocities[j].real() - state.pole_velocities[k].real()));
      st.D = std::min(st.D, std::abs(state.poles[j].real() - state.poles[k].real()));
    }
  st.alpha = (st.nu == 0.0) ? -kInf : st.D - 16.0 * st.n * st.S / st.nu;
  return st;
}

std::optional<Witness> witness_from_alpha(const ScatterStats& stats) {
  if (!(stats.alpha > 0.0)) return std::nullopt;
  if (stats.alpha == kInf) return Witness{0.0, 2.0 * stats.S, kInf};  // free soliton
  Witness w;
  w.kappa = 8.0 / stats.nu;
  w.sprime = 2.0 * stats.S;
  w.eta = stats.nu / 2.0;
  const double slack = 1e-12 * std::max(1.0, stats.nu);
  const bool ok1 = stats.nu + slack >= 4.0 / w.kappa + w.eta;
  const bool ok2 = w.sprime > stats.S + 2.0 * stats.n * w.sprime * w.sprime / (w.eta * stats.D);
  const bool ok3 =
      stats.D * stats.D >= 2.0 * stats.n * w.sprime * w.sprime * w.kappa / w.eta;
  if (!(ok1 && ok2 && ok3))
    fail(ErrorCode::WitnessInvalid, "alpha > 0 but witness inequalities fail");
  return w;
}

BoundsReport bounds_check(const dynamics::Trajectory& traj, const Witness& w,
                          const dynamics::State& initial) {
  if (traj.samples.empty()) fail(ErrorCode::InsufficientSamples, "empty trajectory");
  const int n = initial.size();
  BoundsReport rep;
  rep.worst_separation_rate = kInf;
  rep.worst_speed_drift = 0.0;
  rep.worst_spin_norm = 0.0;
  rep.worst_im_margin = kInf;

  // (alpha) pairwise Re-separation rate between consecutive samples
  if (n >= 2) {
    for (size_t i = 0; i + 1 < traj.samples.size(); ++i) {
      const auto& a = traj.samples[i];
      const auto& b = traj.samples[i + 1];
      const double dt = b.t - a.t;
      if (dt <= 0) continue;
      for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          const double da = std::abs(a.state.poles[j].real() - a.state.poles[k].real());
          const double db = std::abs(b.state.poles[j].real() - b.state.poles[k].real());
          const double rate = (db - da) / dt;
          if (rate < rep.worst_separation_rate) {
            rep.worst_separation_rate = rate;
            rep.violating_pair = {j, k};
          }
        }
    }
  }
  rep.separation_ok = (n < 2) || rep.worst_separation_rate >= w.eta * (1.0 - 1e-9);
  if (rep.separation_ok) rep.violating_pair.reset();

  // (beta), (gamma), (delta)
  const double im_prefactor =
      std::exp(-4.0 * n * w.sprime / (w.eta * std::max(alpha_stats(initial).D, 1e-300))) /
      (1.0 + n * w.sprime / std::max(alpha_stats(initial).D, 1e-300));
  for (const auto& sample : traj.samples) {
    for (int j = 0; j < n; ++j) {
      rep.worst_speed_drift =
          std::max(rep.worst_speed_drift, std::abs(sample.state.pole_velocities[j].real() -
                                                   initial.pole_velocities[j].real()));
      rep.worst_spin_norm = std::max(rep.worst_spin_norm, norm(sample.state.spins[j]));
      const double bound = (alpha_stats(initial).D == kInf)
                               ? 0.0
                               : norm(initial.spins[j]) / std::sqrt(2.0) * im_prefactor;
      rep.worst_im_margin =
          std::min(rep.worst_im_margin, sample.state.poles[j].imag() - bound);
    }
  }
  rep.speed_drift_ok = rep.worst_speed_drift <= 2.0 / w.kappa + 1e-12;
  rep.spins_ok = rep.worst_spin_norm <= w.sprime * (1.0 + 1e-9);
  rep.im_floor_ok = rep.worst_im_margin >= 0.0;
  return rep;
}

AsymptoticData asymptotic_data(const spectral::ExplicitData& data, double gap_tol) {
  const Eigen::Index n = data.L0.rows();
  Eigen::ComplexEigenSolver<CMatrix> solver(data.L0, true);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NonConvergence, "eig of L0 failed");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    const cplx a = solver.eigenvalues()(i), b = solver.eigenvalues()(j);
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  CVector lam(n);
  CMatrix p(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    lam(k) = solver.eigenvalues()(order[k]);
    p.col(k) = solver.eigenvectors().col(order[k]);
  }
  double gap = kInf;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) gap = std::min(gap, std::abs(lam(i) - lam(j)));
  if (n > 1 && gap <= gap_tol)
    fail(ErrorCode::SingularSpectrum, "eigenvalue gap " + std::to_string(gap));

  const CMatrix pinv = p.inverse();
  const CMatrix g = pinv * data.X0 * p;

  AsymptoticData asym;
  asym.v.resize(n);
  asym.a.resize(n);
  asym.b.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    asym.v[j] = lam(j).real();
    asym.a[j] = g(j, j);
    if (!(asym.a[j].imag() > 0)) asym.offsets_upper_half = false;

    // R_j = (sum_i P_ij E_i H) (sum_k (P^{-1})_jk F_k); no leading minus with
    // the calibrated resolvent sign.
    Eigen::Vector2cd lead = Eigen::Vector2cd::Zero();
    for (Eigen::Index i = 0; i < n; ++i) lead += p(i, j) * data.halfspins[i].e;
    Eigen::Vector2cd trail = Eigen::Vector2cd::Zero();
    for (Eigen::Index k = 0; k < n; ++k) trail += pinv(j, k) * data.halfspins[k].xi;
    CMatrix r = (-data.sign) * (lead * trail.transpose());
    asym.b[j] = model::from_pauli(r);
  }
  return asym;
}

model::Configuration asymptotic_profile(const AsymptoticData& asym, const Vec3& m0, double t) {
  model::Configuration cfg;
  cfg.m0 = m0;
  const int n = static_cast<int>(asym.v.size());
  for (int j = 0; j < n; ++j) {
    if (!(asym.a[j].imag() > 0))
      fail(ErrorCode::OffsetNotUpperHalf, "offset " + std::to_string(j) + " not above the axis");
    cfg.spins.push_back(asym.b[j]);
    cfg.poles.push_back(asym.a[j] + asym.v[j] * t);
  }
  return cfg;
}

ConvergenceMetrics convergence_metrics(const dynamics::Trajectory& traj,
                                       const AsymptoticData& asym, const Vec3& m0) {
  const int n = static_cast<int>(asym.v.size());
  ConvergenceMetrics out;
  for (const auto& sample : traj.samples) {
    if (sample.state.size() != n) fail(ErrorCode::InvalidInput, "size mismatch");
    ConvergenceSample cs;
    cs.t = sample.t;

    // match poles to v_j t + a_j by proximity
    std::vector<int> match(n, -1);
    std::vector<bool> used(n, false);
    for (int j = 0; j < n; ++j) {
      double best = kInf, second = kInf;
      int arg = -1;
      for (int i = 0; i < n; ++i) {
        if (used[i]) continue;
        const double d = std::abs(sample.state.poles[i] - (asym.a[j] + asym.v[j] * cs.t));
        if (d < best) {
          second = best;
          best = d;
          arg = i;
        } else {
          second = std::min(second, d);
        }
      }
      if (arg < 0 || second - best < 1e-12)
        fail(ErrorCode::MatchingAmbiguous, "pole matching ambiguous at t=" + std::to_string(cs.t));
      match[j] = arg;
      used[arg] = true;
    }

    cs.max_spin_gap = 0.0;
    cs.max_pole_gap = 0.0;
    for (int j = 0; j < n; ++j) {
      cs.max_spin_gap = std::max(cs.max_spin_gap, norm(Vec3c(sample.state.spins[match[j]] - asym.b[j])));
      cs.max_pole_gap = std::max(
          cs.max_pole_gap, std::abs(sample.state.poles[match[j]] - (asym.a[j] + asym.v[j] * cs.t)));
    }

    const auto prof_m =
        sobolev::RationalProfile::from_configuration(sample.state.to_configuration(m0));
    const auto prof_g =
        sobolev::RationalProfile::from_configuration(asymptotic_profile(asym, m0, cs.t));
    cs.hhalf_diff = sobolev::norm_diff_half(prof_m, prof_g);
    out.samples.push_back(cs);
  }

  // log-log best-fit slopes over the positive-|t| samples
  auto fit = [&](auto getter) {
    std::vector<double> lx, ly;
    for (const auto& cs : out.samples) {
      const double val = getter(cs);
      if (std::abs(cs.t) > 1e-9 && val > 1e-300) {
        lx.push_back(std::log(std::abs(cs.t)));
        ly.push_back(std::log(val));
      }
    }
    if (lx.size() < 2) return 0.0;
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
      num += (lx[i] - mx) * (ly[i] - my);
      den += (lx[i] - mx) * (lx[i] - mx);
    }
    return den > 0 ? num / den : 0.0;
  };
  out.spin_gap_decay_exponent = fit([](const ConvergenceSample& c) { return c.max_spin_gap; });
  out.pole_gap_decay_exponent = fit([](const ConvergenceSample& c) { return c.max_pole_gap; });
  return out;
}

TravelingReport traveling_report(const std::vector<std::pair<double, spectral::LaxData>>& series,
                                 double tol_scale) {
  if (series.empty()) fail(ErrorCode::InsufficientSamples, "empty Lax series");
  const Eigen::Index n = series.front().second.L.rows();
  TravelingReport rep;

  // velocity estimate: mean of diag(L) at the first sample
  cplx vsum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) vsum += series.front().second.L(j, j);
  const double v = (vsum / static_cast<double>(n)).real();
  rep.velocity = v;

  double xscale = 0.0;
  for (const auto& [t, lax] : series) xscale = std::max(xscale, max_abs(lax.X));
  rep.tolerance = tol_scale * (1.0 + xscale);

  const CMatrix eye = CMatrix::Identity(n, n);
  const CVector x0_char = linalg::char_poly(series.front().second.X);
  double h1_residual = 0.0;
  for (const auto& [t, lax] : series) {
    for (Eigen::Index j = 0; j < n; ++j)
      rep.pt_residual = std::max(
          rep.pt_residual, std::abs(lax.X(j, j) - series.front().second.X(j, j) - v * (t - series.front().first)));
    rep.ct_residuals[0] = std::max(rep.ct_residuals[0], max_abs(lax.L - v * eye));
    rep.ct_residuals[1] = std::max(rep.ct_residuals[1], max_abs(lax.B));
    rep.ct_residuals[2] = std::max(rep.ct_residuals[2], max_abs(lax.S));
    rep.l_diag_residual = std::max(rep.l_diag_residual, max_abs(lax.L - v * eye));

    // H1: X ~ X + alpha [B,X]; characteristic coefficients are polynomials of
    // degree <= N in alpha, so agreement at N+1 sample values implies identity.
    const CMatrix bx = lax.B * lax.X - lax.X * lax.B;
    const CVector ref = linalg::char_poly(lax.X);
    for (int a = 1; a <= static_cast<int>(n) + 1; ++a) {
      const CVector ca = linalg::char_poly(lax.X + static_cast<double>(a) * bx);
      for (Eigen::Index i = 0; i < ca.size(); ++i) {
        const double scale = std::pow(1.0 + xscale, static_cast<double>(i));
        h1_residual = std::max(h1_residual, std::abs(ca(i) - ref(i)) / scale);
      }
    }
  }
  rep.h1_ok = h1_residual <= rep.tolerance;

  // H2: |Xdot - v I| via finite differences of the pole tracks
  double h2_residual = 0.0;
  for (size_t i = 0; i + 1 < series.size(); ++i) {
    const double dt = series[i + 1].first - series[i].first;
    if (dt == 0) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      const cplx xdot = (series[i + 1].second.X(j, j) - series[i].second.X(j, j)) / dt;
      h2_residual = std::max(h2_residual, std::abs(xdot - v));
    }
  }
  rep.h2_ok = series.size() < 2 || h2_residual <= rep.tolerance;

  const bool traveling = rep.pt_residual <= rep.tolerance &&
                         rep.ct_residuals[0] <= rep.tolerance &&
                         rep.ct_residuals[1] <= rep.tolerance &&
                         rep.ct_residuals[2] <= rep.tolerance &&
                         rep.l_diag_residual <= rep.tolerance && rep.h1_ok && rep.h2_ok;
  rep.verdict = traveling ? TravelingReport::Verdict::Traveling
                          : TravelingReport::Verdict::NotTraveling;
  return rep;
}

TravelingReport traveling_report(const dynamics::Trajectory& traj, double tol_scale) {
  const std::vector<spectral::LaxData> lax = spectral::lax_series(traj);
  std::vector<std::pair<double, spectral::LaxData>> series;
  series.reserve(lax.size());
  for (size_t i = 0; i < lax.size(); ++i) series.push_back({traj.samples[i].t, lax[i]});
  return traveling_report(series, tol_scale);
}

}  // namespace hwm::scattering
