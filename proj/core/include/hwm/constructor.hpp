#pragma once

#include <optional>
#include <vector>

#include "hwm/base.hpp"
#include "hwm/model.hpp"

namespace hwm::constructor {

/// Build request: distinct target speeds, spectrum tolerance, optional
/// initial spacing scale (auto-selected and auto-raised when absent).
struct Targets {
  std::vector<double> w;
  double epsilon = 0.01;
  std::optional<double> spacing;  // D

  void validate() const;
  double nu() const;  // min pairwise speed separation
};

struct BuildReport {
  std::vector<double> residual_history;
  double geometric_ratio = 0.0;  // max successive ratio after the first step
  std::vector<double> final_speed_errors;
  double d_used = 0.0;
  int iterations = 0;
  int doublings = 0;
};

/// Decoupled-limit initial data: spins from the one-soliton closure at each
/// target speed (exactly nilpotent), poles at D*w_j with the closing height.
model::Configuration approximate_ic(const Targets& targets, double spacing);

/// Constraint functionals over a spin vector H at fixed poles:
///   F(H)_j = i m0 - sum_{k!=j} h_k/(x_j-x_k)
///            + sum_{k!=j} conj(h_k)/(x_j-conj(x_k)) + conj(h_j)/(2i Im x_j)
/// and Ftilde = F - i m0.
struct Functionals {
  std::vector<Vec3c> F;
  std::vector<Vec3c> Ftilde;
};

Functionals functional_F(const std::vector<cplx>& poles, const std::vector<model::Spin>& h);

/// Linear correction: the minimum-norm t_j solving the linearized constraint
///   i t3 - i Re(t . conj(s_j))/Im x_j = -(s_j . F_j)
/// together with first-order nilpotency preservation s_j . t_j = 0.
std::vector<Vec3c> t_step(const std::vector<model::Spin>& spins, const std::vector<cplx>& poles);

/// Nilpotency restoration: h_j = p_j k_j with k_j = (k1,k2,0) bilinearly
/// orthogonal to F(S+T)_j and p_j the smaller root of
///   (k.k) p^2 + 2 k.(s+t) p + (t.t + 2 s.t) = 0.
std::vector<Vec3c> h_step(const std::vector<model::Spin>& spins, const std::vector<Vec3c>& t,
                          const std::vector<cplx>& poles);

struct BuildResult {
  model::Configuration configuration;
  BuildReport report;
};

BuildResult fixpoint(const Targets& targets, double tol = 1e-12, int max_iter = 60);

}  // namespace hwm::constructor
