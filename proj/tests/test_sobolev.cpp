#include <doctest.h>

#include <random>

#include "hwm/sobolev.hpp"
#include "support.hpp"

using namespace hwm;
using sobolev::HalfDotKind;
using sobolev::HkKind;
using sobolev::L2Kind;
using sobolev::RationalProfile;
using sobolev::Term;

namespace {

constexpr double kPi = 3.14159265358979323846;

RationalProfile random_profile(std::mt19937_64& rng, int max_terms = 4) {
  std::uniform_real_distribution<double> re(-3.0, 3.0);
  std::uniform_real_distribution<double> im(0.1, 10.0);
  RationalProfile p;
  const int n = 1 + static_cast<int>(rng() % max_terms);
  for (int j = 0; j < n; ++j) p.terms.push_back({testing::random_spin(rng), cplx(re(rng), im(rng))});
  return p;
}

}  // namespace

TEST_CASE("inner_l2 closed values") {
  const Term t{Vec3c(1, 0, 0), cplx(0, 1)};
  CHECK(inner_l2(t, t).real() == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(std::abs(inner_l2(t, t).imag()) <= 1e-16);

  // hermitian-orthogonal coefficients
  const Term a{Vec3c(1, cplx(0, 1), 0), cplx(0, 1)};
  const Term b{Vec3c(1, cplx(0, -1), 0), cplx(1, 2)};  // <a,b> = 1 + i*conj(-i) = 1 - 1 = 0
  CHECK(std::abs(inner_l2(a, b)) <= 1e-15);
}

TEST_CASE("hk_diag exact low orders and gamma recursion") {
  const Term t{Vec3c(1, 0, 0), cplx(0, 1)};
  CHECK(sobolev::hk_diag(t, 0) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(sobolev::hk_diag(t, 1) == doctest::Approx(kPi / 2.0).epsilon(1e-12));

  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    const Term r{testing::random_spin(rng), cplx(-1.3, 0.4 + 2.0 * (trial % 5))};
    for (int k = 0; k <= 5; ++k) {
      const double ratio = sobolev::hk_diag(r, k + 1) / sobolev::hk_diag(r, k);
      const double expect = (k + 1.0) * (k + 0.5) / (r.pole.imag() * r.pole.imag());
      CHECK(ratio == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("hk_inner reduces to inner_l2 and decays with separation") {
  std::mt19937_64 rng(83);
  const Term a{testing::random_spin(rng), cplx(0.3, 1.2)};
  const Term b{testing::random_spin(rng), cplx(-0.9, 0.7)};
  CHECK(std::abs(sobolev::hk_inner(a, b, 0) - inner_l2(a, b)) <= 1e-15);

  const Term far{b.coeff, b.pole + 1e6};
  for (int k = 1; k <= 3; ++k) {
    const double cross = std::abs(sobolev::hk_inner(a, far, k));
    const double diag = std::sqrt(sobolev::hk_diag(a, k) * sobolev::hk_diag(far, k));
    CHECK(cross <= 1e-5 * diag);
  }
}

TEST_CASE("closed forms agree with the quadrature oracle") {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 60; ++trial) {
    const RationalProfile p = random_profile(rng);
    for (int k = 0; k <= 3; ++k) {
      const sobolev::NormKind kind =
          (k == 0) ? sobolev::NormKind(L2Kind{}) : sobolev::NormKind(HkKind{k});
      const double closed = sobolev::closed_norm(p, kind);
      const double oracle = sobolev::quadrature_oracle(p, kind, 1e-10);
      CHECK(std::abs(closed - oracle) <= 1e-7 * std::max(1.0, std::abs(closed)));
    }
    const double closed_half = sobolev::closed_norm(p, HalfDotKind{});
    const double oracle_half = sobolev::quadrature_oracle(p, HalfDotKind{}, 1e-10);
    CHECK(std::abs(closed_half - oracle_half) <= 1e-7 * std::max(1.0, std::abs(closed_half)));
  }
}

TEST_CASE("quadrature_oracle trivial cases and homogeneity") {
  RationalProfile empty;
  CHECK(sobolev::quadrature_oracle(empty, L2Kind{}) == 0.0);

  std::mt19937_64 rng(91);
  RationalProfile p = random_profile(rng, 2);
  const double base = sobolev::quadrature_oracle(p, L2Kind{}, 1e-11);
  RationalProfile scaled = p;
  for (auto& t : scaled.terms) t.coeff *= cplx(2.0, 1.0);  // |c|^2 = 5
  const double bigger = sobolev::quadrature_oracle(scaled, L2Kind{}, 1e-10);
  CHECK(bigger == doctest::Approx(5.0 * base).epsilon(1e-7));
}

TEST_CASE("norm_diff_half: zero, single-term value, symmetry, positivity") {
  std::mt19937_64 rng(93);
  const RationalProfile p = random_profile(rng);
  CHECK(sobolev::norm_diff_half(p, p) <= 1e-12);

  RationalProfile a, b;
  a.terms.push_back({Vec3c(1, 0, 0), cplx(0, 1)});
  CHECK(sobolev::norm_diff_half(a, b) == doctest::Approx(kPi).epsilon(1e-14));

  const RationalProfile q = random_profile(rng);
  const double ab = sobolev::norm_diff_half(p, q);
  CHECK(ab == doctest::Approx(sobolev::norm_diff_half(q, p)).epsilon(1e-13));
  CHECK(ab >= 0.0);
}

TEST_CASE("norm_diff_half matches the Fourier-side oracle") {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 20; ++trial) {
    const RationalProfile p = random_profile(rng, 3);
    const double closed = sobolev::norm_diff_half(p, RationalProfile{});
    const double oracle = sobolev::quadrature_oracle(p, HalfDotKind{}, 1e-10);
    CHECK(std::abs(closed - oracle) <= 1e-7 * std::max(1.0, closed));
  }
}

TEST_CASE("norm_diff_half triangle inequality") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const RationalProfile a = random_profile(rng, 2);
    const RationalProfile b = random_profile(rng, 2);
    const RationalProfile c = random_profile(rng, 2);
    const double ac = std::sqrt(sobolev::norm_diff_half(a, c));
    const double ab = std::sqrt(sobolev::norm_diff_half(a, b));
    const double bc = std::sqrt(sobolev::norm_diff_half(b, c));
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("translation invariance of all norms") {
  std::mt19937_64 rng(103);
  const RationalProfile p = random_profile(rng, 3);
  RationalProfile q = p;
  for (auto& t : q.terms) t.pole += 17.3;  // common real shift
  for (int k = 0; k <= 2; ++k) {
    const sobolev::NormKind kind = (k == 0) ? sobolev::NormKind(L2Kind{}) : sobolev::NormKind(HkKind{k});
    CHECK(std::abs(sobolev::closed_norm(p, kind) - sobolev::closed_norm(q, kind)) <=
          1e-10 * std::max(1.0, sobolev::closed_norm(p, kind)));
  }
  CHECK(std::abs(sobolev::closed_norm(p, HalfDotKind{}) - sobolev::closed_norm(q, HalfDotKind{})) <=
        1e-10 * std::max(1.0, sobolev::closed_norm(p, HalfDotKind{})));
}

TEST_CASE("profiles reject lower half-plane poles") {
  RationalProfile bad;
  bad.terms.push_back({Vec3c(1, 0, 0), cplx(0, -1)});
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("quadrature budget is enforced") {
  RationalProfile p;
  p.terms.push_back({Vec3c(1, 0, 0), cplx(0, 1e-3)});  // near-singular peak
  CHECK_THROWS_AS((void)sobolev::quadrature_oracle(p, L2Kind{}, 1e-30), Error);
}
