#pragma once

// Randomized property suite over the symmetric-function algebra: the
// expansion identities, the ordering and product bounds on Garding cones, the
// generalized Newton-MacLaurin gaps, the trace bounds for the gradient of
// F = sigma_{k+1}/sigma_k, and the pairwise summation identity with its
// comparability ratio. Deterministic given the seed.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace curvflow::identity {

struct SuiteConfig {
  int nMin = 2;
  int nMax = 8;
  std::size_t samples = 10000;  // per (n, k) or (n, m)
  std::uint64_t seed = 0;
  double relTol = 1e-12;       // polynomial identities and bounds
  double quotientTol = 1e-10;  // quantities built from F and its gradient
  double maxSpread = 1e3;      // lambda_1 / lambda_n bound for the ratio study
};

struct CheckResult {
  std::string name;
  int n = 0;
  int index = 0;  // k or m
  std::size_t evaluations = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest violation in units of the tolerance scale
  std::string firstFailure;
};

/// Observed range of (N_def / sigma_m^2) / pinch; recorded, not asserted.
struct ComparabilityRange {
  int n = 0;
  int m = 0;
  double minRatio = 0.0;
  double maxRatio = 0.0;
};

struct SuiteReport {
  SuiteConfig config;
  std::vector<CheckResult> checks;
  std::vector<ComparabilityRange> comparability;

  std::size_t total_failures() const;
  bool passed() const { return total_failures() == 0; }
};

/// A point of Gamma_k: a Gaussian vector shifted along (1,...,1) past the
/// cone boundary by a random margin and scaled by a random factor. With
/// `nearBoundary` the margin is zero up to bisection resolution, so the point
/// lies in Gamma_k but within roundoff of its boundary. k = 0 leaves the
/// vector unshifted.
std::vector<double> sample_cone(std::mt19937_64& rng, int n, int k, bool nearBoundary = false);

/// Positive vector with lambda_max / lambda_min <= maxSpread; one call in five
/// is a near-umbilic point.
std::vector<double> sample_positive(std::mt19937_64& rng, int n, double maxSpread);

SuiteReport run_suite(const SuiteConfig& config);

/// Human-readable summary, one line per check.
std::string summarize(const SuiteReport& report);

}  // namespace curvflow::identity
