#include <stdexcept>
#include <cmath>
#include <numbers>
#include <random>

#include "curvflow/dualflow.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/symfunc.hpp"
#include "doctest.h"

using namespace curvflow;
using namespace curvflow::dual;
using std::numbers::pi;

TEST_CASE("gamma transform") {
  CHECK(std::tan(0.5 * (pi / 2)) == doctest::Approx(1.0));
  CHECK(gamma_of(1e-12) < -25.0);
  CHECK_THROWS_AS(gamma_of(pi / 2), std::domain_error);
  CHECK_THROWS_AS(gamma_of(0.0), std::domain_error);
  CHECK_THROWS_AS(rho_of(-1.0), std::domain_error);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(1e-3, pi / 2 - 1e-3);
  for (int i = 0; i < 1000; ++i) {
    const double r = u(rng);
    CHECK(std::abs(rho_of(std::exp(gamma_of(r))) - r) <= 1e-14);
  }
  const auto g = gamma_transform(RadialProfile::perturbed(2, 17, 0.8, 0.05, 2));
  CHECK(g.rhoTilde[0] == doctest::Approx(std::tan(0.425)));
  CHECK(g.gamma[0] == doctest::Approx(std::log(std::tan(0.425))));
}

TEST_CASE("decomposition identity") {
  CHECK(decomposition_residual(RadialProfile::constant(3, 33, 0.6)) <= 1e-12);
  for (int n : {2, 3, 5}) {
    const auto p = RadialProfile::perturbed(n, 256, 0.8, 0.05, 2);
    CHECK(decomposition_residual(p) <= 1e-10);
    CHECK(min_eig_h_tilde(p) > 0.0);
  }
}

TEST_CASE("closure of a constant support function") {
  const std::vector<double> u(33, 0.4);
  const auto s = support_closure(2, u);
  for (std::size_t j = 0; j < s.size(); ++j) {
    CHECK(s.rhoTilde[j] == doctest::Approx(0.4));
    CHECK(s.omegaDual[j] == doctest::Approx(1.0));
    CHECK(s.hTilde1[j] == doctest::Approx(1 / 0.4));
    CHECK(s.hTildeAng[j] == doctest::Approx(1 / 0.4));
    CHECK(s.phi[j] * s.phi[j] + s.phiPrime[j] * s.phiPrime[j] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.theta[j] == doctest::Approx(s.psi[j]));
  }
}

TEST_CASE("closure failures") {
  std::vector<double> u(33, 0.4);
  u[5] = -0.1;
  CHECK_THROWS_AS(support_closure(2, u), InvalidProfile);
  const auto psi = polar_nodes(65);
  std::vector<double> w(65);
  for (std::size_t j = 0; j < 65; ++j) w[j] = 0.4 + 0.05 * std::cos(6 * psi[j]);
  try {
    (void)support_closure(2, w);
    FAIL("expected convexity loss");
  } catch (const ConvexityLoss& e) {
    CHECK(e.node() < 65);
  }
}

TEST_CASE("closure round trips") {
  for (int n : {2, 3}) {
    const auto p = RadialProfile::perturbed(n, 257, 0.8, 0.05, 2);
    CHECK(closure_roundtrip_error(p) <= 1e-8);
    CHECK(closure_roundtrip_error_grid(p, 257) <= 1e-8);
  }
  const auto p = RadialProfile::perturbed(2, 129, 0.7, 0.04, 3);
  const auto s = support_closure(2, import_support(p, 129));
  const auto back = export_profile(s, 129);
  double e = 0;
  for (std::size_t j = 0; j < p.size(); ++j) e = std::max(e, std::abs(back.rho()[j] - p.rho()[j]));
  CHECK(e < 1e-8);
}

TEST_CASE("pointwise import agrees with the grid closure at shared points") {
  const auto p = RadialProfile::perturbed(2, 129, 0.8, 0.05, 2);
  const auto imp = import_pointwise(p);
  for (std::size_t j = 0; j < p.size(); ++j) {
    CHECK(imp.uTilde[j] > 0.0);
    CHECK(imp.W1[j] > 0.0);
    CHECK(imp.WAng[j] > 0.0);
  }
  CHECK(imp.psi.front() == 0.0);
  CHECK(imp.psi.back() == doctest::Approx(pi));
}

TEST_CASE("G vanishes on spheres for every k") {
  for (int n : {2, 3, 4})
    for (double s : {0.2, 0.7, 0.95}) {
      const auto st = support_closure(n, std::vector<double>(33, s));
      for (int k = 0; k < n; ++k)
        for (double g : g_operator(st, k)) CHECK(std::abs(g) < 1e-14);
    }
}

TEST_CASE("G transports the primal speed") {
  for (int k : {0, 1}) {
    double prev = 0;
    for (std::size_t N : {65, 129, 257}) {
      const double r = speed_transport_residual(RadialProfile::perturbed(2, N, 0.8, 0.05, 2), k, N);
      if (prev > 0) CHECK(std::log2(prev / r) > 1.9);
      prev = r;
    }
  }
}

TEST_CASE("primal view matches the spherical geometry") {
  const auto s = support_closure(3, std::vector<double>(33, std::tan(0.45)));
  const auto v = primal_view(s, 1);
  for (std::size_t j = 0; j < s.size(); ++j) {
    CHECK(v.lambda1[j] == doctest::Approx(1 / std::tan(0.9)).epsilon(1e-12));
    CHECK(v.u[j] == doctest::Approx(std::sin(0.9)).epsilon(1e-12));
    CHECK(std::abs(v.f[j]) < 1e-13);
  }
  const auto q = dual_quermass(s, v);
  for (int m = -1; m <= 3; ++m)
    CHECK(q[m] == doctest::Approx(quermass::sphere_quermass(3, m, 0.9)).epsilon(1e-10));
}

TEST_CASE("dual step on spheres and oversized steps") {
  const std::vector<double> u(33, 0.5);
  const auto v = step(2, u, 1e-3, 1);
  for (std::size_t j = 0; j < u.size(); ++j) CHECK(std::abs(v[j] - u[j]) < 1e-15);
  const auto p = RadialProfile::perturbed(2, 129, 0.8, 0.05, 2);
  CHECK_THROWS_AS(step(2, import_support(p, 129), 10.0, 1), flow::StepRejected);
}

TEST_CASE("dual run: sphere start and short comparison with the primal run") {
  flow::FlowConfig c;
  c.N = 65;
  c.initialShape = flow::InitialShape::geodesic_sphere(0.8);
  const auto s = dual_run(c);
  CHECK(s.trace.reason == flow::Termination::converged);
  CHECK(s.trace.records.size() == 1);
  CHECK_FALSE(s.trace.breakdownTime.has_value());

  c.initialShape = flow::InitialShape::perturbed_mode(0.8, 0.05, 2);
  c.tMax = 0.5;
  c.sampleInterval = 0.1;
  const auto d = dual_run(c);
  const auto pr = flow::run(c);
  CHECK(d.trace.reason == flow::Termination::timeLimit);
  CHECK(d.trace.violationCounts.empty());
  CHECK(d.trace.minWMargin > 0.0);
  const auto cmp = compare_traces(pr.trace, d.trace);
  CHECK(cmp.compared == 6);
  CHECK(cmp.lastCommonTime == doctest::Approx(0.5));
  CHECK(cmp.maxQuermass < 1e-3);
  CHECK(cmp.maxRhoBounds < 1e-3);
}
