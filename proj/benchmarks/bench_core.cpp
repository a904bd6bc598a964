#include <benchmark/benchmark.h>

#include <random>

#include "hwm/constructor.hpp"
#include "hwm/dynamics.hpp"
#include "hwm/linalg.hpp"
#include "hwm/sobolev.hpp"
#include "hwm/spectral.hpp"

using namespace hwm;

namespace {

CMatrix random_matrix(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(u(rng), u(rng));
  return m;
}

constructor::BuildResult built_pair() {
  constructor::Targets t;
  t.w = {-0.5, 0.5};
  t.epsilon = 0.01;
  t.spacing = 1200.0;
  return constructor::fixpoint(t);
}

}  // namespace

static void BM_eig_dense(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const CMatrix m = random_matrix(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(linalg::eig_dense(m, 1e-8));
}
BENCHMARK(BM_eig_dense)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

static void BM_cauchy_inverse(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<cplx> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = cplx(i, 0.3 + i);
    b[i] = cplx(0.5 * i + 0.2, 1.0 - 0.1 * i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(linalg::cauchy_inverse(a, b));
}
BENCHMARK(BM_cauchy_inverse)->Arg(4)->Arg(8);

static void BM_constructor_fixpoint(benchmark::State& state) {
  constructor::Targets t;
  t.w = {-0.6, 0.0, 0.6};
  t.epsilon = 0.01;
  t.spacing = 3000.0;
  for (auto _ : state) benchmark::DoNotOptimize(constructor::fixpoint(t));
}
BENCHMARK(BM_constructor_fixpoint);

static void BM_integrate_pair(benchmark::State& state) {
  const auto built = built_pair();
  const auto initial = dynamics::State::from_configuration(built.configuration);
  dynamics::TrajectoryOptions opts;
  opts.t_end = 10.0;
  opts.sample_stride = 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(dynamics::integrate(initial, built.configuration.m0, opts));
}
BENCHMARK(BM_integrate_pair);

static void BM_explicit_pi_minus(benchmark::State& state) {
  const auto built = built_pair();
  const auto data = spectral::make_explicit(built.configuration);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.1;
    benchmark::DoNotOptimize(spectral::explicit_pi_minus(data, t, cplx(0.3, 4.0)));
  }
}
BENCHMARK(BM_explicit_pi_minus);

static void BM_norm_diff_half(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  sobolev::RationalProfile a, b;
  for (int j = 0; j < 4; ++j) {
    a.terms.push_back({Vec3c(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng))),
                       cplx(g(rng), 1.0 + j)});
    b.terms.push_back({Vec3c(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng))),
                       cplx(g(rng), 2.0 + j)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(sobolev::norm_diff_half(a, b));
}
BENCHMARK(BM_norm_diff_half);

static void BM_quadrature_oracle(benchmark::State& state) {
  sobolev::RationalProfile p;
  p.terms.push_back({Vec3c(1.0, cplx(0, 1), 0.5), cplx(0.4, 1.2)});
  p.terms.push_back({Vec3c(0.3, 0.7, cplx(1, -1)), cplx(-1.1, 0.8)});
  for (auto _ : state)
    benchmark::DoNotOptimize(sobolev::quadrature_oracle(p, sobolev::HalfDotKind{}, 1e-10));
}
BENCHMARK(BM_quadrature_oracle);

BENCHMARK_MAIN();
