#include <stdexcept>
#include <cmath>
#include <random>
#include <vector>

#include "curvflow/errors.hpp"
#include "curvflow/identity_suite.hpp"
#include "curvflow/symfunc.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvflow;
using symfunc::CurvatureVector;

TEST_CASE("sigma on small vectors") {
  CHECK(symfunc::sigma(CurvatureVector{1, 1, 1}, 2) == 3.0);
  CHECK(symfunc::sigma(CurvatureVector{1, 2, 3}, 2) == 11.0);
  CHECK(symfunc::sigma(CurvatureVector{-4.5, 2, 3}, 0) == 1.0);
  CHECK_THROWS_AS(symfunc::sigma(CurvatureVector{1, 2, 3}, 4), std::domain_error);
  CHECK_THROWS_AS(symfunc::sigma(CurvatureVector{1, 2, 3}, -1), std::domain_error);
}

TEST_CASE("curvature vector rejects bad input") {
  CHECK_THROWS(CurvatureVector{1.0});
  CHECK_THROWS(CurvatureVector{1.0, NAN});
  const auto s = CurvatureVector{1, 3, 2}.sorted_descending();
  CHECK(s[0] == 3.0);
  CHECK(s[2] == 1.0);
}

TEST_CASE("sigma agrees with subset enumeration") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int n = 2; n <= 8; ++n)
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> v(n);
      for (auto& x : v) x = g(rng);
      const auto all = symfunc::sigma_all(v);
      for (int m = 0; m <= n; ++m) {
        const double ref = oracle::sigma_subsets(v, m);
        const double scale = symfunc::sigma_scale(v, m);
        CHECK(std::abs(symfunc::sigma(v, m) - ref) <= 1e-13 * scale);
        CHECK(std::abs(all[m] - ref) <= 1e-13 * scale);
      }
    }
}

TEST_CASE("sigma with excluded entries") {
  const CurvatureVector l{1, 2, 3};
  CHECK(symfunc::sigma_excl(l, 1, {1}) == 4.0);
  CHECK(symfunc::sigma_excl(l, 1, {0, 2}) == 2.0);
  CHECK(symfunc::sigma_excl(CurvatureVector{5, 7}, 0, {0}) == 1.0);
  CHECK_THROWS_AS(symfunc::sigma_excl(l, 1, {3}), std::domain_error);
  CHECK_THROWS_AS(symfunc::sigma_excl(l, 3, {0}), std::domain_error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> v(6);
  for (auto& x : v) x = u(rng);
  const CurvatureVector lam(v);
  for (int m = 0; m <= 4; ++m) {
    CHECK(symfunc::sigma_excl(lam, m, {2}) == doctest::Approx(oracle::sigma_subsets(v, m, {2})).epsilon(1e-12));
    CHECK(symfunc::sigma_excl(lam, m, {1, 4}) ==
          doctest::Approx(oracle::sigma_subsets(v, m, {1, 4})).epsilon(1e-12));
  }
}

TEST_CASE("cone membership") {
  CHECK(symfunc::gamma_cone_contains(CurvatureVector{1, 1, 1}, 3).contained);
  CHECK_FALSE(symfunc::gamma_cone_contains(CurvatureVector{-1, -1, -1}, 1).contained);
  CHECK_FALSE(symfunc::gamma_cone_contains(CurvatureVector{3, 1, -1}, 2).contained);
  CHECK(symfunc::gamma_cone_contains(CurvatureVector{3, 1, -1}, 1).contained);
  CHECK(symfunc::gamma_cone_contains(CurvatureVector{3, 1, -1}, 1).k == 1);
  // sigma_2 = 0 exactly: on the boundary, in the closure only
  CHECK_FALSE(symfunc::gamma_cone_contains(CurvatureVector{1, 1, -0.5}, 2).contained);
  CHECK(symfunc::closed_cone_contains(CurvatureVector{1, 1, -0.5}, 2));
}

TEST_CASE("quotient at the identity and under scaling") {
  const auto q = symfunc::quotient(CurvatureVector{1, 1, 1}, 1);
  CHECK(q.F == doctest::Approx(1.0));
  CHECK(q.c == doctest::Approx(1.0));
  CHECK(q.traceGrad == doctest::Approx(1.0));
  for (int n = 2; n <= 6; ++n)
    for (int k = 0; k < n; ++k) {
      std::vector<double> v(n, 2.5);
      CHECK(symfunc::quotient(v, k).F == doctest::Approx(2.5 * symfunc::c_nk(n, k)));
    }
  CHECK(symfunc::c_nk(4, 0) == 4.0);
  CHECK(symfunc::c_nk(3, 2) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("quotient rejects sigma_k <= 0") {
  CHECK_THROWS_AS(symfunc::quotient(CurvatureVector{1, 1, -0.5}, 2), ConeViolation);
  CHECK_THROWS_AS(symfunc::quotient(CurvatureVector{-1, -1, -1}, 1), ConeViolation);
}

TEST_CASE("quotient gradient against subset enumeration, n = 4, k = 2") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const auto v = identity::sample_cone(rng, 4, 3);
    const auto q = symfunc::quotient(v, 2);
    const auto ref = oracle::quotient_gradient(v, 2);
    double trace = 0.0;
    for (int i = 0; i < 4; ++i) {
      CHECK(q.gradDiag[i] == doctest::Approx(ref[i]).epsilon(1e-10));
      trace += ref[i];
    }
    CHECK(trace >= symfunc::c_nk(4, 2) - 1e-12);
    CHECK(trace <= 2.0 + 1e-12);
  }
}

TEST_CASE("quotient gradient against central differences") {
  std::mt19937_64 rng(9);
  for (int n : {3, 5}) {
    const int k = n - 2;
    const auto v = identity::sample_cone(rng, n, k + 1);
    const auto q = symfunc::quotient(v, k);
    for (int i = 0; i < n; ++i) {
      const double h = 1e-6 * (1.0 + std::abs(v[i]));
      auto vp = v, vm = v;
      vp[i] += h;
      vm[i] -= h;
      const double fd = (symfunc::quotient(vp, k).F - symfunc::quotient(vm, k).F) / (2 * h);
      CHECK(q.gradDiag[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("Newton-MacLaurin gap") {
  CHECK(symfunc::newton_maclaurin_gap(CurvatureVector{1, 1, 1}, 3, 1, 2, 0) == doctest::Approx(0.0));
  // (2,1,1): sigma_1 = 4, sigma_2 = 5; gap = 4/3 - sqrt(5/3)
  const double direct = (4.0 / 3.0) - std::sqrt(oracle::sigma_subsets({2, 1, 1}, 2) / 3.0);
  CHECK(direct > 0.0);
  CHECK(symfunc::newton_maclaurin_gap(CurvatureVector{2, 1, 1}, 2, 0, 1, 0) == doctest::Approx(direct));
  CHECK(symfunc::newton_maclaurin_gap(CurvatureVector{1, 2, 3}, 3, 1, 2, 1) >= 0.0);
  CHECK_THROWS_AS(symfunc::newton_maclaurin_gap(CurvatureVector{1, 2, 3}, 2, 2, 1, 0), std::domain_error);
  CHECK_THROWS_AS(symfunc::newton_maclaurin_gap(CurvatureVector{1, -3, -3}, 2, 0, 1, 0), ConeViolation);
}

TEST_CASE("gradient trace gaps") {
  const auto [a, b] = symfunc::quotient_trace_gaps(CurvatureVector{1, 1, 1}, 1);
  CHECK(std::abs(a) < 1e-14);
  CHECK(std::abs(b) < 1e-14);
  const auto [c, d] = symfunc::quotient_trace_gaps(CurvatureVector{2, 1, 1}, 1);
  CHECK(c > 0.0);
  CHECK(d > 0.0);
  // closed-form gaps for (2,1,1), k = 1 from subset sums
  const std::vector<double> v{2, 1, 1};
  const auto g = oracle::quotient_gradient(v, 1);
  const double F = oracle::sigma_subsets(v, 2) / oracle::sigma_subsets(v, 1);
  CHECK(c == doctest::Approx(g[0] * 4 + g[1] + g[2] - F * F));
  CHECK(d == doctest::Approx(g[0] + g[1] + g[2] - 1.0));
}

TEST_CASE("pairwise summation parts") {
  const auto id = symfunc::pairwise_sum_parts(CurvatureVector{1, 1, 1, 1}, 2);
  CHECK(std::abs(id.nDef) < 1e-13);
  CHECK(std::abs(id.nSum) < 1e-13);
  CHECK(id.pinch == 0.0);
  const auto p = symfunc::pairwise_sum_parts(CurvatureVector{1, 2}, 1);  // sorted internally
  CHECK(p.nDef == doctest::Approx(1.0));
  CHECK(p.nSum == doctest::Approx(1.0));
  CHECK(p.pinch == doctest::Approx(0.25));
  CHECK_THROWS_AS(symfunc::pairwise_sum_parts(CurvatureVector{1, -2, 3}, 1), ConeViolation);

  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const auto v = identity::sample_positive(rng, 5, 1e3);
    const auto parts = symfunc::pairwise_sum_parts(CurvatureVector(v), 3);
    // independent evaluation of N_def from subset sums
    const double s2 = oracle::sigma_subsets(v, 2), s3 = oracle::sigma_subsets(v, 3),
                 s4 = oracle::sigma_subsets(v, 4);
    const double nDef = 3 * 2 * s3 * s3 - 4 * 3 * s4 * s2;
    const double scale = 6 * s3 * s3 + 12 * s4 * s2;
    CHECK(std::abs(parts.nDef - nDef) <= 1e-12 * scale);
    CHECK(std::abs(parts.nSum - nDef) <= 1e-12 * scale);
    CHECK(parts.nDef >= -1e-12 * scale);
  }
}

TEST_CASE("sigma Hessian against central differences of sigma") {
  const CurvatureVector l{1.3, 0.7, 2.1, 0.4};
  // off-diagonal perturbations enter sigma_m through the 2x2 minors
  for (int m = 2; m <= 4; ++m) {
    CHECK(symfunc::sigma_hessian(l, m, 0, 0, 2, 2) ==
          doctest::Approx(oracle::sigma_subsets({1.3, 0.7, 2.1, 0.4}, m - 2, {0, 2})));
    CHECK(symfunc::sigma_hessian(l, m, 1, 3, 3, 1) ==
          doctest::Approx(-oracle::sigma_subsets({1.3, 0.7, 2.1, 0.4}, m - 2, {1, 3})));
    CHECK(symfunc::sigma_hessian(l, m, 0, 1, 2, 3) == 0.0);
    CHECK(symfunc::sigma_hessian(l, m, 1, 1, 1, 1) == 0.0);
  }
  // d^2/dt^2 sigma_2(diag(l) + t E) for E = e_0 e_1^T + e_1 e_0^T equals 2 * (-sigma_0) = -2
  const double t = 1e-4;
  auto sigma2_sym = [&](double s) {
    // sigma_2 of a symmetric matrix = sum of principal 2x2 minors
    const double a[4] = {1.3, 0.7, 2.1, 0.4};
    double total = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) total += a[i] * a[j] - ((i == 0 && j == 1) ? s * s : 0.0);
    return total;
  };
  const double fd = (sigma2_sym(t) - 2 * sigma2_sym(0) + sigma2_sym(-t)) / (t * t);
  CHECK(fd == doctest::Approx(symfunc::sigma_hessian(l, 2, 0, 1, 1, 0) + symfunc::sigma_hessian(l, 2, 1, 0, 0, 1)));
}

TEST_CASE("homogeneity") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> v(7);
  for (auto& x : v) x = g(rng);
  auto w = v;
  for (auto& x : w) x *= -1.7;
  for (int m = 0; m <= 7; ++m)
    CHECK(symfunc::sigma(w, m) == doctest::Approx(std::pow(-1.7, m) * symfunc::sigma(v, m)).epsilon(1e-12));
}
