#include <doctest.h>

#include <random>

#include "hwm/constructor.hpp"
#include "hwm/scattering.hpp"
#include "support.hpp"

using namespace hwm;
using constructor::Targets;

namespace {

Targets make_targets(std::vector<double> w, double spacing) {
  Targets t;
  t.w = std::move(w);
  t.epsilon = 0.01;
  t.spacing = spacing;
  return t;
}

double constraint_residual(const model::Configuration& cfg) {
  return model::constraint_residuals(cfg).max_residual;
}

}  // namespace

TEST_CASE("approximate_ic fixed points of the one-soliton closure") {
  // w = 0: s = (2i, -2i, 2 sqrt 2), Im x = 2 sqrt 2
  auto cfg = constructor::approximate_ic(make_targets({0.0}, 100.0), 100.0);
  CHECK(norm(Vec3c(cfg.spins[0] - Vec3c(cplx(0, 2), cplx(0, -2), 2.0 * std::sqrt(2.0)))) <= 1e-14);
  CHECK(cfg.poles[0].imag() == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(cfg.poles[0].real() == 0.0);
  CHECK(std::abs(bdot(cfg.spins[0], cfg.spins[0])) <= 1e-14);
  CHECK(std::abs(model::velocity_from_constraints(cfg)[0]) <= 1e-14);

  // w = 1/sqrt(3): |s|^2 = 12, Im x = 3, signed speed reproduced exactly;
  // theta flips sign for positive targets so the first component conjugates
  const double w = 1.0 / std::sqrt(3.0);
  cfg = constructor::approximate_ic(make_targets({w}, 100.0), 100.0);
  CHECK(norm(Vec3c(cfg.spins[0] - Vec3c(cplx(1, -std::sqrt(3.0)), cplx(1, std::sqrt(3.0)), 2.0))) <=
        1e-13);
  CHECK(cfg.poles[0].imag() == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(std::abs(bdot(cfg.spins[0], cfg.spins[0])) <= 1e-13);
  const cplx v = model::velocity_from_constraints(cfg)[0];
  CHECK(std::abs(v - w) <= 1e-13);

  // constraint (ii) closes exactly for a single soliton
  CHECK(constraint_residual(cfg) <= 1e-13);
}

TEST_CASE("approximate_ic rejects unit speeds, spins stay below 10") {
  CHECK_THROWS_AS((void)constructor::fixpoint(make_targets({1.0, 0.2}, 100.0)), Error);
  CHECK_THROWS_AS((void)constructor::fixpoint(make_targets({-1.0}, 100.0)), Error);

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cfg = constructor::approximate_ic(make_targets({u(rng)}, 500.0), 500.0);
    CHECK(norm(cfg.spins[0]) <= 10.0);
  }
}

TEST_CASE("functional_F basics") {
  const auto cfg = constructor::approximate_ic(make_targets({-0.3, 0.4}, 800.0), 800.0);

  // H = 0: F_j = i m0
  const auto zero = constructor::functional_F(cfg.poles, {Vec3c(0, 0, 0), Vec3c(0, 0, 0)});
  for (int j = 0; j < 2; ++j) {
    CHECK(norm(Vec3c(zero.F[j] - Vec3c(0, 0, cplx(0, 1)))) <= 1e-15);
    CHECK(norm(zero.Ftilde[j]) <= 1e-15);
  }

  // F - Ftilde = i m0 exactly, for random H
  std::mt19937_64 rng(67);
  std::vector<model::Spin> h = {testing::random_spin(rng), testing::random_spin(rng)};
  const auto f = constructor::functional_F(cfg.poles, h);
  for (int j = 0; j < 2; ++j)
    CHECK(norm(Vec3c(f.F[j] - f.Ftilde[j] - Vec3c(0, 0, cplx(0, 1)))) <= 1e-15);

  // single-soliton: F_1 = i m0 + conj(h)/(2i Im x)
  const auto one = constructor::approximate_ic(make_targets({0.2}, 300.0), 300.0);
  const auto f1 = constructor::functional_F(one.poles, {h[0]});
  const Vec3c expect = Vec3c(0, 0, cplx(0, 1)) +
                       Vec3c(h[0].conjugate() / (cplx(0, 2) * one.poles[0].imag()));
  CHECK(norm(Vec3c(f1.F[0] - expect)) <= 1e-15);
}

TEST_CASE("t_step: zero residual gives zero correction") {
  // N=1 approximate data closes exactly, so T must vanish
  const auto one = constructor::approximate_ic(make_targets({0.35}, 300.0), 300.0);
  const auto t = constructor::t_step(one.spins, one.poles);
  CHECK(norm(t[0]) <= 1e-14);
}

TEST_CASE("t_step: bound and residual contraction at one step") {
  const auto cfg = constructor::approximate_ic(make_targets({-0.5, 0.5}, 1000.0), 1000.0);
  const auto f0 = constructor::functional_F(cfg.poles, cfg.spins);
  double res0 = 0.0, smax = 0.0;
  for (int j = 0; j < 2; ++j) {
    res0 = std::max(res0, std::abs(bdot(cfg.spins[j], f0.F[j])));
    smax = std::max(smax, norm(cfg.spins[j]));
  }
  const auto t = constructor::t_step(cfg.spins, cfg.poles);
  double tmax = 0.0;
  for (const auto& tj : t) tmax = std::max(tmax, norm(tj));
  CHECK(tmax <= (2.0 + smax) * res0);  // |T| <= (K + |S|) |S.F(S)| with K = 2

  std::vector<model::Spin> st(2);
  for (int j = 0; j < 2; ++j) st[j] = cfg.spins[j] + t[j];
  const auto f1 = constructor::functional_F(cfg.poles, st);
  double res1 = 0.0;
  for (int j = 0; j < 2; ++j) res1 = std::max(res1, std::abs(bdot(st[j], f1.F[j])));
  // contraction factor <= 4 N |S|(K+|S|)/(D nu)
  const double bound = 4.0 * 2 * smax * (2.0 + smax) / (1000.0 * 1.0);
  CHECK(res1 <= bound * res0 * 1.5);
}

TEST_CASE("h_step: fixed point and exact nilpotency restoration") {
  const auto cfg = constructor::approximate_ic(make_targets({-0.5, 0.5}, 1000.0), 1000.0);
  // T = 0 with nilpotent S: constant term vanishes, so p = 0 and H = 0
  const std::vector<Vec3c> zero(2, Vec3c(0, 0, 0));
  const auto h0 = constructor::h_step(cfg.spins, zero, cfg.poles);
  CHECK(norm(h0[0]) <= 1e-14);
  CHECK(norm(h0[1]) <= 1e-14);

  // random small perturbations: (s + t + h)^2 = 0 exactly
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec3c> t = {testing::random_spin(rng, 1e-3), testing::random_spin(rng, 1e-3)};
    const auto h = constructor::h_step(cfg.spins, t, cfg.poles);
    for (int j = 0; j < 2; ++j) {
      const Vec3c s_new = cfg.spins[j] + t[j] + h[j];
      CHECK(std::abs(bdot(s_new, s_new)) <= 1e-13);
      // orthogonality to the field keeps the linear correction intact
      const auto f = constructor::functional_F(
          cfg.poles, {cfg.spins[0] + t[0], cfg.spins[1] + t[1]});
      CHECK(std::abs(bdot(h[j], f.F[j])) <= 1e-12 * std::max(1.0, norm(h[j]) * norm(f.F[j])));
    }
  }
}

TEST_CASE("h_step picks the smaller root") {
  const auto cfg = constructor::approximate_ic(make_targets({-0.4, 0.3}, 900.0), 900.0);
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec3c> t = {testing::random_spin(rng, 1e-2), testing::random_spin(rng, 1e-2)};
    const auto h = constructor::h_step(cfg.spins, t, cfg.poles);
    // reconstruct both roots and confirm |p| chosen is the smaller
    std::vector<model::Spin> st = {cfg.spins[0] + t[0], cfg.spins[1] + t[1]};
    const auto f = constructor::functional_F(cfg.poles, st);
    for (int j = 0; j < 2; ++j) {
      Vec3c k(f.F[j](1), -f.F[j](0), 0.0);
      k /= norm(k);
      const cplx a = bdot(k, k), b = 2.0 * bdot(k, st[j]);
      const cplx c = bdot(t[j], t[j]) + 2.0 * bdot(cfg.spins[j], t[j]);
      const cplx disc = std::sqrt(b * b - 4.0 * a * c);
      const double p1 = std::abs((-b + disc) / (2.0 * a));
      const double p2 = std::abs((-b - disc) / (2.0 * a));
      CHECK(norm(h[j]) <= std::min(p1, p2) * (1.0 + 1e-9) + 1e-30);
    }
  }
}

TEST_CASE("fixpoint: N=1 immediate, N=2 and N=3 acceptance targets") {
  const auto one = constructor::fixpoint(make_targets({0.25}, 0.0 + 500.0));
  CHECK(one.report.residual_history.back() <= 1e-13);
  CHECK(one.report.iterations <= 1);

  const auto two = testing::build({-0.5, 0.5}, 2000.0);
  CHECK(constraint_residual(two.configuration) <= 1e-10);
  CHECK(two.report.geometric_ratio < 0.5);
  for (double e : two.report.final_speed_errors) CHECK(e <= 12 * 0.01);

  const auto three = testing::build({-0.6, 0.0, 0.6}, 3000.0);
  CHECK(constraint_residual(three.configuration) <= 1e-10);
  CHECK(three.report.geometric_ratio < 0.5);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(bdot(three.configuration.spins[j],
                                                  three.configuration.spins[j])) <= 1e-12);
}

TEST_CASE("fixpoint: every iterate stays nilpotent and |s| <= 10") {
  const auto built = testing::build({-0.6, 0.0, 0.6}, 2500.0);
  for (const auto& s : built.configuration.spins) {
    CHECK(std::abs(bdot(s, s)) <= 1e-12);
    CHECK(norm(s) <= 10.0);
  }
}

TEST_CASE("fixpoint: built configurations satisfy the instant-scattering criterion") {
  const auto built = testing::build({-0.5, 0.5}, 2000.0);
  const auto st = dynamics::State::from_configuration(built.configuration);
  const auto stats = scattering::alpha_stats(st);
  CHECK(stats.alpha > 0.0);
}

TEST_CASE("fixpoint: contraction ratio scales like 1/D") {
  // slope of log(ratio) vs log(D) should be about -1
  std::vector<double> ds = {1000.0, 2000.0, 4000.0, 8000.0};
  std::vector<double> ratios;
  for (double d : ds) {
    const auto r = testing::build({-0.5, 0.5}, d).report;
    REQUIRE(r.residual_history.size() >= 3);
    ratios.push_back(r.residual_history[2] / r.residual_history[1]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < ds.size(); ++i) {
    const double x = std::log(ds[i]), y = std::log(ratios[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double n = static_cast<double>(ds.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.3));
}

TEST_CASE("fixpoint: auto spacing selection converges without an explicit D") {
  Targets t;
  t.w = {-0.5, 0.5};
  t.epsilon = 0.01;
  const auto built = constructor::fixpoint(t);
  CHECK(constraint_residual(built.configuration) <= 1e-10);
  CHECK(built.report.d_used >= 1000.0);
}

TEST_CASE("fixpoint: residual history decreases after the first step") {
  const auto rep = testing::build({-0.5, 0.5}, 2000.0).report;
  for (size_t i = 1; i + 1 < rep.residual_history.size(); ++i)
    CHECK(rep.residual_history[i + 1] < rep.residual_history[i]);
}
