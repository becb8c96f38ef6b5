#include "curvflow/quermass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "curvflow/symfunc.hpp"

namespace curvflow::quermass {

using std::numbers::pi;

QuermassVector::QuermassVector(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(n + 2))
    throw std::invalid_argument("QuermassVector: need n+2 values");
}

QuermassVector assemble(int n, double volume, const std::vector<double>& integrals) {
  if (integrals.size() != static_cast<std::size_t>(n + 1))
    throw std::invalid_argument("assemble: need n+1 curvature integrals");
  std::vector<double> A(static_cast<std::size_t>(n + 2));
  auto at = [&](int m) -> double& { return A[static_cast<std::size_t>(m + 1)]; };
  at(-1) = volume;
  at(0) = integrals[0];
  at(1) = integrals[1] + n * volume;
  for (int m = 2; m <= n; ++m)
    at(m) = integrals[m] + static_cast<double>(n - m + 1) / (m - 1) * at(m - 2);
  return QuermassVector(n, std::move(A));
}

namespace {

std::vector<double> curvature_integrals(const hypersurface::GeometryState& state) {
  const int n = state.n;
  const std::size_t N = state.size();
  std::vector<std::vector<double>> nodal(static_cast<std::size_t>(n + 1), std::vector<double>(N));
  for (std::size_t j = 0; j < N; ++j) {
    const auto s = symfunc::sigma_all(state.curvatures(j).values());
    for (int m = 0; m <= n; ++m) nodal[m][j] = s[m];
  }
  std::vector<double> out(static_cast<std::size_t>(n + 1));
  for (int m = 0; m <= n; ++m) out[m] = hypersurface::integrate(state, nodal[m]);
  return out;
}

double volume_from_state(const hypersurface::GeometryState& state) {
  const auto w = polar_weights(state.n, state.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j)
    acc += w[j] * hypersurface::sin_power_integral(state.n, state.rho[j]);
  return sphere_area(state.n - 1) * acc;
}

}  // namespace

QuermassVector quermass_vector(const hypersurface::GeometryState& state,
                               const RadialProfile& profile) {
  if (profile.size() != state.size() || profile.n() != state.n)
    throw std::invalid_argument("quermass_vector: state/profile mismatch");
  return assemble(state.n, hypersurface::volume(profile), curvature_integrals(state));
}

QuermassVector quermass_vector(const hypersurface::GeometryState& state) {
  return assemble(state.n, volume_from_state(state), curvature_integrals(state));
}

double sphere_quermass(int n, int m, double r) {
  if (n < 1 || m < -1 || m > n) throw std::domain_error("sphere_quermass: index out of range");
  if (!(r >= 0.0 && r <= pi / 2)) throw std::domain_error("sphere_quermass: r out of [0, pi/2]");
  const double area = sphere_area(n);
  const double vol = area * hypersurface::sin_power_integral(n, r);
  std::vector<double> integrals(static_cast<std::size_t>(n + 1));
  for (int j = 0; j <= n; ++j)
    integrals[j] = area * symfunc::binomial(n, j) * std::pow(std::sin(r), n - j) *
                   std::pow(std::cos(r), j);
  return assemble(n, vol, integrals)[m];
}

namespace {

void check_monotone(int n, int k) {
  constexpr int samples = 256;
  double prev = sphere_quermass(n, k, 0.0);
  for (int i = 1; i <= samples; ++i) {
    const double r = pi / 2 * static_cast<double>(i) / samples;
    const double v = sphere_quermass(n, k, r);
    if (!(v > prev))
      throw std::logic_error("xi: r -> A_" + std::to_string(k) + "(r) is not strictly increasing "
                             "for n = " + std::to_string(n));
    prev = v;
  }
}

}  // namespace

double sphere_radius_for(int n, int k, double target) {
  if (k < -1 || k > n) throw std::domain_error("sphere_radius_for: k out of range");
  check_monotone(n, k);
  double lo = 0.0, hi = pi / 2;
  const double flo = sphere_quermass(n, k, lo);
  const double fhi = sphere_quermass(n, k, hi);
  if (!(target > flo && target < fhi))
    throw std::range_error("xi: target A_" + std::to_string(k) + " outside the attainable range");
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sphere_quermass(n, k, mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  // One secant refinement inside the final bracket.
  const double a = sphere_quermass(n, k, lo) - target;
  const double b = sphere_quermass(n, k, hi) - target;
  return (b != a) ? std::clamp(lo - a * (hi - lo) / (b - a), lo, hi) : 0.5 * (lo + hi);
}

double xi(int n, int l, int k, double target) {
  if (!(l >= -1 && l < k && k <= n)) throw std::domain_error("xi: need -1 <= l < k <= n");
  return sphere_quermass(n, l, sphere_radius_for(n, k, target));
}

bool AuditReport::any_flagged() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const AuditEntry& e) { return e.flagged || !e.error.empty(); });
}

double AuditReport::min_gap(bool provenOnly) const {
  double g = INFINITY;
  for (const auto& e : entries)
    if (e.error.empty() && (!provenOnly || e.proven)) g = std::min(g, e.gap);
  return g;
}

AuditReport audit_inequalities(const QuermassVector& q, int flowK) {
  const int n = q.n();
  AuditReport report;
  report.flowK = flowK;
  for (int k = 0; k <= n - 1; ++k) {
    for (int l = -1; l < k; ++l) {
      AuditEntry e;
      e.l = l;
      e.k = k;
      e.Al = q[l];
      e.proven = (l == -1);
      try {
        e.xiValue = xi(n, l, k, q[k]);
        e.gap = e.xiValue - e.Al;
        const double scale = std::max(std::abs(e.Al), std::abs(e.xiValue));
        e.flagged = e.gap < -1e-6 * scale;
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
      report.entries.push_back(e);
    }
  }
  return report;
}

}  // namespace curvflow::quermass
