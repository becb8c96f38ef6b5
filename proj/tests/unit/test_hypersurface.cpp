#include <stdexcept>
#include <cmath>
#include <numbers>

#include "curvflow/errors.hpp"
#include "curvflow/hypersurface.hpp"
#include "curvflow/sphere_grid.hpp"
#include "curvflow/symfunc.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvflow;
using namespace curvflow::hypersurface;
using std::numbers::pi;

TEST_CASE("geodesic sphere geometry") {
  for (int n : {2, 3, 5})
    for (double r : {0.3, 0.8, 1.4}) {
      const auto s = geometry(RadialProfile::constant(n, 33, r), n - 1);
      for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK(s.u[j] == doctest::Approx(std::sin(r)).epsilon(1e-14));
        CHECK(s.lambda1[j] == doctest::Approx(1 / std::tan(r)).epsilon(1e-13));
        CHECK(s.lambdaAng[j] == doctest::Approx(1 / std::tan(r)).epsilon(1e-13));
        CHECK(s.F[j] == doctest::Approx(symfunc::c_nk(n, n - 1) / std::tan(r)).epsilon(1e-13));
        CHECK(s.omegaSpeed[j] == doctest::Approx(1.0).epsilon(1e-15));
      }
    }
  const auto s = geometry(RadialProfile::constant(2, 9, pi / 4), 1);
  for (double a : s.areaWeight) CHECK(a == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cone violation carries the node index") {
  const auto p = RadialProfile::perturbed(2, 129, 0.8, 0.3, 6);
  try {
    (void)geometry(p, 1);
    FAIL("expected a cone violation");
  } catch (const ConeViolation& e) {
    CHECK(e.node() < p.size());
  }
}

TEST_CASE("axisymmetric and full-tensor backends agree") {
  const std::size_t N = 257;
  const auto p = RadialProfile::perturbed(2, N, 0.8, 0.05, 2);
  const auto s = geometry(p, 1);
  const auto grid = SphereGrid2D::sample(N, 16, [](double t, double) { return 0.8 + 0.05 * std::cos(2 * t); });
  const auto full = geometry_full_s2(grid);
  double worst = 0.0;
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t m : {0u, 5u}) {
      const auto& node = full.at(j, m);
      const double hi = std::max(s.lambda1[j], s.lambdaAng[j]);
      const double lo = std::min(s.lambda1[j], s.lambdaAng[j]);
      worst = std::max({worst, std::abs(node.u - s.u[j]), std::abs(node.lambdaMax - hi),
                        std::abs(node.lambdaMin - lo), std::abs(node.areaWeight - s.areaWeight[j])});
    }
  CHECK(worst < 1e-5);
}

TEST_CASE("full-tensor backend on constant and non-axisymmetric data") {
  const auto c = geometry_full_s2(SphereGrid2D::sample(33, 12, [](double, double) { return 0.6; }));
  for (const auto& node : c.nodes) {
    CHECK(node.lambdaMax == doctest::Approx(1 / std::tan(0.6)).epsilon(1e-12));
    CHECK(node.lambdaMin == doctest::Approx(1 / std::tan(0.6)).epsilon(1e-12));
  }
  const auto g = geometry_full_s2(SphereGrid2D::sample(65, 64, [](double t, double f) {
    return 0.8 + 0.03 * std::sin(t) * std::sin(t) * std::cos(2 * f) + 0.02 * std::cos(t);
  }));
  CHECK(weingarten_asymmetry(g) < 1e-10);
}

TEST_CASE("quadrature of the area element") {
  for (double r : {0.4, 1.1}) {
    const auto s = geometry(RadialProfile::constant(2, 512, r), 1);
    std::vector<double> one(s.size(), 1.0), odd(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) odd[j] = std::cos(s.theta[j]);
    CHECK(integrate(s, one) == doctest::Approx(4 * pi * std::sin(r) * std::sin(r)).epsilon(1e-8));
    CHECK(std::abs(integrate(s, odd)) < 1e-12);
    CHECK(integrate(s, std::vector<double>(s.size(), 0.0)) == 0.0);
  }
  CHECK_THROWS(integrate(geometry(RadialProfile::constant(2, 33, 0.5), 1), std::vector<double>(5, 1.0)));

  // perturbed graph area against a Simpson oracle on the analytic profile
  const auto p = RadialProfile::perturbed(2, 513, 0.8, 0.05, 2);
  const auto s = geometry(p, 1);
  const double ref = oracle::graph_area_n2([](double t) { return 0.8 + 0.05 * std::cos(2 * t); },
                                           [](double t) { return -0.1 * std::sin(2 * t); });
  CHECK(integrate(s, std::vector<double>(s.size(), 1.0)) == doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("volume") {
  CHECK(4 * pi * sin_power_integral(2, pi / 2) == doctest::Approx(pi * pi).epsilon(1e-14));
  CHECK(sin_power_integral(3, 0.0) == 0.0);
  for (int n = 0; n <= 8; ++n)
    for (double r : {0.02, 0.1, 0.5, 0.999, 1.001, 1.4}) {
      const double ref = oracle::simpson([n](double t) { return std::pow(std::sin(t), n); }, 0.0, r);
      CHECK(sin_power_integral(n, r) == doctest::Approx(ref).epsilon(1e-12));
    }
  for (int n = 2; n <= 6; ++n)
    for (double r : {0.2, 0.9, 1.5})
      CHECK(sphere_area(n) * sin_power_integral(n, r) == doctest::Approx(oracle::ball_volume(n, r)).epsilon(1e-11));
  for (double r : {0.05, 0.7, 1.5})
    CHECK(volume(RadialProfile::constant(2, 65, r)) ==
          doctest::Approx(2 * pi * (r - std::sin(r) * std::cos(r))).epsilon(1e-12));
  CHECK(volume(RadialProfile::constant(2, 65, 1e-3)) < 1e-8);

  // perturbed body, nested Simpson oracle
  const auto p = RadialProfile::perturbed(2, 257, 0.8, 0.05, 2);
  const double ref = 2 * pi * oracle::simpson([](double t) {
    const double rho = 0.8 + 0.05 * std::cos(2 * t);
    return std::sin(t) * oracle::simpson([](double x) { return std::sin(x) * std::sin(x); }, 0.0, rho, 200);
  }, 0.0, pi, 2000);
  CHECK(volume(p) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("Minkowski residuals") {
  for (int n : {2, 3, 4})
    for (int m = 0; m < n; ++m)
      CHECK(minkowski_residual(geometry(RadialProfile::constant(n, 33, 0.7), n - 1), m) < 1e-10);

  for (int m : {0, 1}) {
    double prev = 0;
    for (std::size_t N : {65, 129, 257}) {
      const double r = minkowski_residual(geometry(RadialProfile::perturbed(2, N, 0.8, 0.05, 2), 1), m);
      if (prev > 0) CHECK(std::log2(prev / r) > 1.9);
      prev = r;
    }
  }
  const auto s = geometry(RadialProfile::perturbed(3, 512, 0.7, 0.03, 3), 2);
  CHECK(minkowski_residual(s, 2) < 1e-4);
}

TEST_CASE("omega disambiguation selects exactly one candidate") {
  const auto s = geometry(RadialProfile::perturbed(2, 257, 0.8, 0.05, 2), 1);
  const auto w = omega_disambiguation(s);
  CHECK(w.residualPhiOverOmega < 1e-8);
  CHECK(w.residualOmegaOverPhi > 1e-3);
}

TEST_CASE("pole rules") {
  const auto p = RadialProfile::perturbed(2, 129, 0.8, 0.05, 2);
  const auto u = geometry(p, 1, PoleRule::umbilic);
  const auto o = geometry(p, 1, PoleRule::operatorLimit);
  CHECK(u.lambda1.front() == doctest::Approx(u.lambdaAng.front()).epsilon(1e-14));
  CHECK(u.lambda1.back() == doctest::Approx(u.lambdaAng.back()).epsilon(1e-14));
  const double h = p.spacing();
  CHECK(std::abs(o.lambdaAng.front() - u.lambdaAng.front()) < 10 * h * h);
  for (std::size_t j = 1; j + 1 < p.size(); ++j) CHECK(o.lambdaAng[j] == u.lambdaAng[j]);
}
