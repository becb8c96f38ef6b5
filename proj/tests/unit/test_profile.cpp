#include <stdexcept>
#include <cmath>
#include <numbers>

#include "curvflow/errors.hpp"
#include "curvflow/profile.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvflow;
using std::numbers::pi;

TEST_CASE("polar nodes and sphere areas") {
  const auto t = polar_nodes(5);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == pi);
  CHECK(t[2] == doctest::Approx(pi / 2));
  for (int d = 0; d <= 9; ++d) CHECK(sphere_area(d) == doctest::Approx(oracle::sphere_area(d)).epsilon(1e-14));
}

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(RadialProfile::constant(2, 9, pi / 2), InvalidProfile);
  CHECK_THROWS_AS(RadialProfile::constant(2, 9, 0.0), InvalidProfile);
  CHECK_THROWS_AS(RadialProfile::constant(1, 9, 0.5), InvalidProfile);
  CHECK_THROWS_AS(RadialProfile(2, {0.0, 1.0, pi}, {0.5, 0.5, 0.5}), InvalidProfile);
  CHECK_THROWS_AS(RadialProfile(2, {0.0, pi}, {0.5}), InvalidProfile);
  CHECK_NOTHROW(RadialProfile::perturbed(3, 17, 0.8, 0.05, 2));
}

TEST_CASE("differentiation of constant and cosine profiles") {
  const auto c = differentiate(RadialProfile::constant(2, 33, 0.7));
  for (double v : c.first) CHECK(v == 0.0);
  for (double v : c.second) CHECK(std::abs(v) < 1e-12);
  CHECK_THROWS_AS(differentiate_even(std::vector<double>{1, 2, 3, 4}, 0.1), InvalidProfile);

  const auto p = RadialProfile::perturbed(2, 129, 0.8, 0.05, 1);
  const auto d = differentiate(p);
  const double h = p.spacing();
  for (std::size_t j = 0; j < p.size(); ++j)
    CHECK(d.first[j] == doctest::Approx(-0.05 * std::sin(p.theta()[j])).scale(1).epsilon(h * h));
  CHECK(d.first.front() == 0.0);
  CHECK(d.first.back() == 0.0);
}

TEST_CASE("second-order convergence of differences on cos 2 theta") {
  double prev1 = 0, prev2 = 0;
  for (std::size_t N : {33, 65, 129, 257}) {
    const auto p = RadialProfile::perturbed(2, N, 0.8, 0.05, 2);
    const auto d = differentiate(p);
    double e1 = 0, e2 = 0;
    for (std::size_t j = 0; j < N; ++j) {
      const double t = p.theta()[j];
      e1 = std::max(e1, std::abs(d.first[j] + 0.1 * std::sin(2 * t)));
      e2 = std::max(e2, std::abs(d.second[j] + 0.2 * std::cos(2 * t)));
    }
    if (prev1 > 0) {
      CHECK(prev1 / e1 == doctest::Approx(4.0).epsilon(0.05));
      CHECK(prev2 / e2 == doctest::Approx(4.0).epsilon(0.05));
    }
    prev1 = e1;
    prev2 = e2;
  }
}

TEST_CASE("pole limit of the angular difference operator") {
  // v = cos(2t): cot(t) v'(t) = -4 cos^2(t), so the first ring sits 4h^2 above the limit
  const std::size_t N = 201;
  const double h = pi / (N - 1);
  std::vector<double> v(N);
  for (std::size_t j = 0; j < N; ++j) v[j] = std::cos(2 * h * j);
  const auto d = differentiate_even(v, h);
  const double interiorLimit = std::cos(h) / std::sin(h) * (v[2] - v[0]) / (2 * h);
  CHECK(d.poleLimitNorth == doctest::Approx(-4.0).epsilon(1e-3));
  CHECK(std::abs(d.poleLimitNorth - interiorLimit) < 5 * h * h);
  CHECK(d.poleLimitSouth == doctest::Approx(-4.0).epsilon(1e-3));
}

TEST_CASE("polar weights integrate sin^{n-1}") {
  for (int n = 2; n <= 5; ++n) {
    const auto w = polar_weights(n, 65);
    double s = 0;
    for (double x : w) s += x;
    CHECK(s * sphere_area(n - 1) == doctest::Approx(oracle::sphere_area(n)).epsilon(1e-13));
    // cos^2 is even about both poles; exact value by Simpson
    const auto t = polar_nodes(65);
    double q = 0;
    for (std::size_t j = 0; j < 65; ++j) q += w[j] * std::cos(t[j]) * std::cos(t[j]);
    const double ref = oracle::simpson([n](double x) { return std::cos(x) * std::cos(x) * std::pow(std::sin(x), n - 1); },
                                       0.0, pi, 20000);
    CHECK(q == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("cosine series interpolates and differentiates") {
  const auto t = polar_nodes(33);
  std::vector<double> f(33);
  for (std::size_t j = 0; j < 33; ++j) f[j] = std::exp(std::cos(t[j]));
  const CosineSeries s(f);
  for (double x : {0.0, 0.3, 1.234, 2.9, pi}) {
    CHECK(s.value(x) == doctest::Approx(std::exp(std::cos(x))).epsilon(1e-13));
    CHECK(s.derivative(x) == doctest::Approx(-std::sin(x) * std::exp(std::cos(x))).epsilon(1e-11).scale(1));
    const double d2 = (std::sin(x) * std::sin(x) - std::cos(x)) * std::exp(std::cos(x));
    CHECK(s.second_derivative(x) == doctest::Approx(d2).epsilon(1e-10).scale(1));
  }
}
