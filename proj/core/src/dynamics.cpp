#include "hwm/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace hwm::dynamics {

const char* to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::Completed: return "Completed";
    case TrajectoryStatus::PoleCollision: return "PoleCollision";
    case TrajectoryStatus::ImaginaryFloor: return "ImaginaryFloor";
    case TrajectoryStatus::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

State State::from_configuration(const model::Configuration& cfg) {
  cfg.validate();
  State st;
  st.spins = cfg.spins;
  st.poles = cfg.poles;
  st.pole_velocities = model::velocity_from_constraints(cfg);
  return st;
}

model::Configuration State::to_configuration(const Vec3& m0) const {
  model::Configuration cfg;
  cfg.m0 = m0;
  cfg.spins = spins;
  cfg.poles = poles;
  return cfg;
}

void TrajectoryOptions::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0) || !(max_step > 0) || !(sample_stride > 0))
    fail(ErrorCode::InvalidInput, "trajectory tolerances must be positive");
}

Derivative rhs(const State& state, double collision_floor) {
  const int n = state.size();
  Derivative d;
  d.dspins.assign(n, Vec3c::Zero());
  d.dpoles = state.pole_velocities;
  d.dvelocities.assign(n, cplx(0, 0));
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const cplx dx = state.poles[j] - state.poles[k];
      if (std::abs(dx) <= collision_floor)
        fail(ErrorCode::PoleCollision, "poles " + std::to_string(j) + "," + std::to_string(k));
      const cplx dx2 = dx * dx;
      const cplx dx3 = dx2 * dx;
      const Vec3c cr = cross(state.spins[j], state.spins[k]);
      const cplx dot = bdot(state.spins[j], state.spins[k]);
      d.dspins[j] += -2.0 * cr / dx2;
      d.dspins[k] += 2.0 * cr / dx2;  // s_k x s_j = -cr, same dx^2
      d.dvelocities[j] += 4.0 * dot / dx3;
      d.dvelocities[k] += -4.0 * dot / dx3;  // odd power flips with dx -> -dx
    }
  }
  return d;
}

namespace {

// Flat packing: y = [s_1..s_N (3N), x_1..x_N, xdot_1..xdot_N], all complex.
CVector pack(const State& st) {
  const int n = st.size();
  CVector y(5 * n);
  for (int j = 0; j < n; ++j) {
    y.segment<3>(3 * j) = st.spins[j];
    y(3 * n + j) = st.poles[j];
    y(4 * n + j) = st.pole_velocities[j];
  }
  return y;
}

State unpack(const CVector& y, int n) {
  State st;
  st.spins.resize(n);
  st.poles.resize(n);
  st.pole_velocities.resize(n);
  for (int j = 0; j < n; ++j) {
    st.spins[j] = y.segment<3>(3 * j);
    st.poles[j] = y(3 * n + j);
    st.pole_velocities[j] = y(4 * n + j);
  }
  return st;
}

CVector eval_rhs(const CVector& y, int n, double collision_floor, long long& evals) {
  ++evals;
  const State st = unpack(y, n);
  const Derivative d = rhs(st, collision_floor);
  CVector f(5 * n);
  for (int j = 0; j < n; ++j) {
    f.segment<3>(3 * j) = d.dspins[j];
    f(3 * n + j) = d.dpoles[j];
    f(4 * n + j) = d.dvelocities[j];
  }
  return f;
}

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// 4th-order error weights (b5 - b4hat)
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

struct StepResult {
  CVector y;
  CVector f_end;  // FSAL
  double error;   // scaled error norm
};

StepResult dp5_step(const CVector& y, const CVector& f0, double h, int n,
                    double collision_floor, double rel_tol, double abs_tol,
                    long long& evals) {
  const CVector k1 = f0;
  const CVector k2 = eval_rhs(y + h * (A21 * k1), n, collision_floor, evals);
  const CVector k3 = eval_rhs(y + h * (A31 * k1 + A32 * k2), n, collision_floor, evals);
  const CVector k4 = eval_rhs(y + h * (A41 * k1 + A42 * k2 + A43 * k3), n, collision_floor, evals);
  const CVector k5 =
      eval_rhs(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), n, collision_floor, evals);
  const CVector k6 = eval_rhs(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5), n,
                              collision_floor, evals);
  StepResult r;
  r.y = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
  r.f_end = eval_rhs(r.y, n, collision_floor, evals);
  const CVector err =
      h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * r.f_end);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double sc = abs_tol + rel_tol * std::max(std::abs(y(i)), std::abs(r.y(i)));
    const double e = std::abs(err(i)) / sc;
    acc += e * e;
  }
  r.error = std::sqrt(acc / static_cast<double>(y.size()));
  return r;
}

double initial_step(const CVector& y, const CVector& f, double max_step) {
  const double ny = y.norm(), nf = f.norm();
  double h = (nf > 1e-300) ? 0.01 * std::max(ny, 1.0) / nf : 1e-3;
  return std::max(std::min(h, max_step), 1e-12);
}

}  // namespace

Trajectory integrate(const State& initial, const Vec3& m0, const TrajectoryOptions& opts) {
  opts.validate();
  const int n = initial.size();
  const double dir = (opts.t_end >= opts.t_begin) ? 1.0 : -1.0;
  const double span = std::abs(opts.t_end - opts.t_begin);

  Trajectory traj;
  auto record = [&](double t, const State& st) {
    traj.samples.push_back({t, st});
    traj.monitors.push_back(model::constraint_residuals(st.to_configuration(m0)));
    for (int j = 0; j < n; ++j) {
      traj.min_im = std::min(traj.min_im, st.poles[j].imag());
      for (int k = j + 1; k < n; ++k)
        traj.min_pair_distance =
            std::min(traj.min_pair_distance, std::abs(st.poles[j] - st.poles[k]));
    }
  };

  CVector y = pack(initial);
  CVector f = eval_rhs(y, n, opts.collision_floor, traj.rhs_evaluations);
  record(opts.t_begin, initial);
  if (span == 0.0) return traj;

  double t = 0.0;  // elapsed |time| from t_begin
  double h = std::min(initial_step(y, f, opts.max_step), std::min(span, opts.sample_stride));
  double next_sample = opts.sample_stride;
  double prev_error = 1.0;
  const double h_min = opts.max_step / 1e9;

  auto event_check = [&](const State& st) -> TrajectoryStatus {
    for (int j = 0; j < n; ++j) {
      if (st.poles[j].imag() < opts.im_floor) return TrajectoryStatus::ImaginaryFloor;
      for (int k = j + 1; k < n; ++k)
        if (std::abs(st.poles[j] - st.poles[k]) <= opts.collision_floor)
          return TrajectoryStatus::PoleCollision;
    }
    return TrajectoryStatus::Completed;
  };

  while (t < span && traj.status == TrajectoryStatus::Completed) {
    h = std::min({h, opts.max_step, span - t});
    if (next_sample > t) h = std::min(h, next_sample - t);
    bool step_ok = false;
    StepResult res;
    while (!step_ok && traj.status == TrajectoryStatus::Completed) {
      try {
        res = dp5_step(y, f, dir * h, n, opts.collision_floor, opts.rel_tol, opts.abs_tol,
                       traj.rhs_evaluations);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::PoleCollision) throw;
        traj.status = TrajectoryStatus::PoleCollision;
        break;
      }
      if (res.error <= 1.0) {
        step_ok = true;
      } else {
        h *= std::max(0.2, 0.9 * std::pow(res.error, -0.25));
        if (h < h_min) traj.status = TrajectoryStatus::StepFailure;
      }
    }
    if (!step_ok) break;
    t += h;
    if (span - t <= 1e-12 * span) t = span;  // snap the endpoint
    y = res.y;
    f = res.f_end;

    const State st = unpack(y, n);
    const TrajectoryStatus ev = event_check(st);
    if (ev != TrajectoryStatus::Completed) {
      record(opts.t_begin + dir * t, st);
      traj.status = ev;
      break;
    }
    if (t >= next_sample - 1e-12 * span || t >= span) {
      record(opts.t_begin + dir * t, st);
      while (next_sample <= t + 1e-12 * span) next_sample += opts.sample_stride;
    }

    // PI controller (order 5); boundary-clamped steps may be tiny, so only
    // the rejection loop decides step failure
    const double err = std::max(res.error, 1e-10);
    double fac = 0.9 * std::pow(err, -0.14) * std::pow(prev_error, 0.08);
    fac = std::clamp(fac, 0.2, 5.0);
    h = std::max(h * fac, h_min);
    prev_error = err;
  }
  if (dir < 0) {
    std::reverse(traj.samples.begin(), traj.samples.end());
    std::reverse(traj.monitors.begin(), traj.monitors.end());
  }
  return traj;
}

MonitorSummary monitor_report(const Trajectory& traj) {
  if (traj.samples.empty()) fail(ErrorCode::InsufficientSamples, "empty trajectory");
  MonitorSummary s{};
  s.min_pair_distance = traj.min_pair_distance;
  s.min_im = traj.min_im;
  s.status = traj.status;
  s.max_spin_norm = 0.0;
  s.max_constraint_residual = 0.0;
  for (const auto& rep : traj.monitors)
    s.max_constraint_residual = std::max(s.max_constraint_residual, rep.max_residual);
  for (const auto& smp : traj.samples)
    for (const auto& spin : smp.state.spins)
      s.max_spin_norm = std::max(s.max_spin_norm, norm(spin));

  const int n = traj.samples.front().state.size();
  if (n < 2 || traj.samples.size() < 2) {
    s.min_separation_rate = std::numeric_limits<double>::infinity();
    return s;
  }
  // worst-case per-pair growth rate of |Re x_j - Re x_k| between samples
  double rate = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i];
    const auto& b = traj.samples[i + 1];
    const double dt = b.t - a.t;
    if (dt == 0.0) continue;
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double da = std::abs(a.state.poles[j].real() - a.state.poles[k].real());
        const double db = std::abs(b.state.poles[j].real() - b.state.poles[k].real());
        rate = std::min(rate, (db - da) / dt);
      }
  }
  s.min_separation_rate = rate;
  return s;
}

}  // namespace hwm::dynamics
