#pragma once

#include <vector>

#include "hwm/base.hpp"
#include "hwm/model.hpp"

namespace hwm::dynamics {

/// Phase-space point of the spin/pole system: (s_j, x_j, xdot_j).
struct State {
  std::vector<model::Spin> spins;
  std::vector<cplx> poles;
  std::vector<cplx> pole_velocities;

  int size() const { return static_cast<int>(spins.size()); }

  static State from_configuration(const model::Configuration& cfg);
  model::Configuration to_configuration(const Vec3& m0) const;
};

struct Derivative {
  std::vector<Vec3c> dspins;
  std::vector<cplx> dpoles;
  std::vector<cplx> dvelocities;
};

/// Equations of motion for the stored spins:
///   sdot_j  = -2 sum_{k!=j} (s_j x s_k) / (x_j - x_k)^2
///   xddot_j =  4 sum_{k!=j} (s_j . s_k) / (x_j - x_k)^3
/// (sign conventions frozen by the constraint-preservation and matrix-form
/// golden tests; see tests/test_dynamics.cpp).
Derivative rhs(const State& state, double collision_floor = 0.0);

enum class TrajectoryStatus { Completed, PoleCollision, ImaginaryFloor, StepFailure };

const char* to_string(TrajectoryStatus s);

struct TrajectoryOptions {
  double t_begin = 0.0;
  double t_end = 10.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 1e6;
  double sample_stride = 0.5;
  double collision_floor = 1e-6;
  double im_floor = 1e-9;

  void validate() const;
};

struct Sample {
  double t;
  State state;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<model::ConstraintReport> monitors;  // one per sample
  double min_pair_distance = std::numeric_limits<double>::infinity();
  double min_im = std::numeric_limits<double>::infinity();
  TrajectoryStatus status = TrajectoryStatus::Completed;
  long long rhs_evaluations = 0;
};

/// Adaptive Dormand-Prince 5(4) with PI step control. Samples land exactly on
/// t_begin + k*sample_stride (plus the endpoint); integration runs backward
/// when t_end < t_begin, in which case samples are reversed afterwards so the
/// series is increasing in t. Terminates early with a status on pole
/// collision or on a pole dropping below im_floor.
Trajectory integrate(const State& initial, const Vec3& m0, const TrajectoryOptions& opts);

struct MonitorSummary {
  double min_pair_distance;
  double min_im;
  double max_spin_norm;
  double max_constraint_residual;
  double min_separation_rate;  // +inf sentinel for N=1
  TrajectoryStatus status;
};

MonitorSummary monitor_report(const Trajectory& traj);

}  // namespace hwm::dynamics
