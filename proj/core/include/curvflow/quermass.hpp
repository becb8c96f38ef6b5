#pragma once

// Quermassintegrals of convex bodies in S^{n+1}:
//   A_{-1} = Vol, A_0 = |M|, A_1 = int s_1 + n Vol,
//   A_m = int s_m + (n-m+1)/(m-1) A_{m-2},  2 <= m <= n,
// their closed forms on geodesic spheres, and the comparison functions
// xi_{l,k} that send A_k of a body to A_l of the geodesic sphere sharing it.

#include <string>
#include <vector>

#include "curvflow/hypersurface.hpp"
#include "curvflow/profile.hpp"

namespace curvflow::quermass {

class QuermassVector {
 public:
  QuermassVector() = default;
  QuermassVector(int n, std::vector<double> values);  // values[m+1] = A_m

  int n() const { return n_; }
  /// A_m for -1 <= m <= n.
  double operator[](int m) const { return values_.at(static_cast<std::size_t>(m + 1)); }
  const std::vector<double>& values() const { return values_; }

 private:
  int n_ = 0;
  std::vector<double> values_;
};

/// Volume from the profile, curvature integrals from the state.
QuermassVector quermass_vector(const hypersurface::GeometryState& state,
                               const RadialProfile& profile);
/// Same, with the volume integrated from the radii stored in the state.
QuermassVector quermass_vector(const hypersurface::GeometryState& state);

/// Assemble A_{-1..n} from the volume and the curvature integrals
/// curvatureIntegrals[m] = int_M s_m dmu, m = 0..n.
QuermassVector assemble(int n, double volume, const std::vector<double>& curvatureIntegrals);

/// A_m of the geodesic sphere of radius r in S^{n+1}, 0 < r < pi/2
/// (r = 0 and r = pi/2 are accepted as limits).
double sphere_quermass(int n, int m, double r);

/// xi_{l,k}(target): the A_l of the geodesic sphere whose A_k equals target.
/// Throws std::range_error if the target is not attained on (0, pi/2) and
/// std::logic_error if r -> A_k(r) is not strictly increasing (k = n, where
/// A_n is constant, always lands here).
double xi(int n, int l, int k, double targetAk);

/// Radius r* with sphere_quermass(n, k, r*) == target (same errors as xi).
double sphere_radius_for(int n, int k, double targetAk);

struct AuditEntry {
  int l = 0;
  int k = 0;
  double Al = 0.0;
  double xiValue = 0.0;
  double gap = 0.0;       // xi_{l,k}(A_k) - A_l
  bool proven = false;    // l == -1: Vol <= xi(A_k) holds for every convex body
  bool flagged = false;   // gap < -1e-6 * scale
  std::string error;      // non-empty when xi could not be evaluated
};

struct AuditReport {
  int flowK = 0;
  std::vector<AuditEntry> entries;

  bool any_flagged() const;
  double min_gap(bool provenOnly) const;
};

/// All pairs -1 <= l < k' <= n-1. Pairs with k' = n are left out: A_n is the
/// same for every geodesic sphere, so xi_{l,n} is undefined.
AuditReport audit_inequalities(const QuermassVector& q, int flowK);

}  // namespace curvflow::quermass
