#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hwm/base.hpp"
#include "hwm/dynamics.hpp"
#include "hwm/model.hpp"
#include "hwm/sobolev.hpp"
#include "hwm/spectral.hpp"

namespace hwm::scattering {

/// Local scattering statistics of a state:
///   S = max_j |s_j|, nu = min pairwise |Re xdot_j - Re xdot_k|,
///   D = min pairwise |Re x_j - Re x_k|, alpha = D - 16 N S / nu.
struct ScatterStats {
  double S = 0.0;
  double nu = 0.0;
  double D = 0.0;
  double alpha = 0.0;
  int n = 0;
};

ScatterStats alpha_stats(const dynamics::State& state);

/// Witness triple (kappa = 8/nu, S' = 2S, eta = nu/2) certifying the
/// bootstrap inequalities when alpha > 0.
struct Witness {
  double kappa = 0.0;
  double sprime = 0.0;
  double eta = 0.0;
};

std::optional<Witness> witness_from_alpha(const ScatterStats& stats);

/// Trajectory-wide checks of the four certified properties.
struct BoundsReport {
  bool separation_ok = false;   // d/dt |Re x_j - Re x_k| >= eta (all pairs, all samples)
  bool speed_drift_ok = false;  // |Re xdot_j(t) - Re xdot_j(0)| <= 2/kappa
  bool spins_ok = false;        // |s_j(t)| <= S'
  bool im_floor_ok = false;     // Im x_j(t) >= (|s_j(0)|/sqrt 2) e^{-4NS'/(eta D)} / (1 + N S'/D)
  double worst_separation_rate = 0.0;
  double worst_speed_drift = 0.0;
  double worst_spin_norm = 0.0;
  double worst_im_margin = 0.0;  // min over samples of Im x_j - bound_j
  std::optional<std::pair<int, int>> violating_pair;

  bool all_ok() const { return separation_ok && speed_drift_ok && spins_ok && im_floor_ok; }
};

BoundsReport bounds_check(const dynamics::Trajectory& traj, const Witness& w,
                          const dynamics::State& initial);

/// Limit data of the scattering profile g(t,x) = m0 + sum b_j/(x - a_j - v_j t) + conj.
struct AsymptoticData {
  std::vector<double> v;        // sorted ascending
  std::vector<cplx> a;
  std::vector<model::Spin> b;
  bool offsets_upper_half = true;
};

AsymptoticData asymptotic_data(const spectral::ExplicitData& data, double gap_tol = 1e-9);

/// The profile as a Configuration at time t (poles a_j + v_j t, spins b_j).
model::Configuration asymptotic_profile(const AsymptoticData& asym, const Vec3& m0, double t);

struct ConvergenceSample {
  double t;
  double hhalf_diff;      // squared Hdot^{1/2} distance m(t) vs g(t)
  double max_spin_gap;    // max_j |s_j(t) - b_j|
  double max_pole_gap;    // max_j |x_j(t) - v_j t - a_j|
};

struct ConvergenceMetrics {
  std::vector<ConvergenceSample> samples;
  double spin_gap_decay_exponent = 0.0;  // log-log slope over the sampled window
  double pole_gap_decay_exponent = 0.0;
};

ConvergenceMetrics convergence_metrics(const dynamics::Trajectory& traj,
                                       const AsymptoticData& asym, const Vec3& m0);

struct TravelingReport {
  double pt_residual = 0.0;                    // max |x_j(t) - x_j(0) - v t|
  std::array<double, 3> ct_residuals{0, 0, 0};  // max (|L - vI|, |B|, |S|)
  double l_diag_residual = 0.0;                // max |L(t) - v I|
  bool h1_ok = false;
  bool h2_ok = false;
  enum class Verdict { Traveling, NotTraveling, Inconclusive } verdict = Verdict::Inconclusive;
  double tolerance = 0.0;
  double velocity = 0.0;
};

TravelingReport traveling_report(const std::vector<std::pair<double, spectral::LaxData>>& series,
                                 double tol_scale = 1e-8);

TravelingReport traveling_report(const dynamics::Trajectory& traj, double tol_scale = 1e-8);

}  // namespace hwm::scattering
