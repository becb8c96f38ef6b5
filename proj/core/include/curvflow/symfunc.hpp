#pragma once

// Elementary symmetric functions of curvature vectors, Garding cones and the
// curvature quotient F = sigma_{k+1} / sigma_k with its first derivatives.
//
// Index conventions: curvature entries and excluded indices are 0-based.
// sigma_0 == 1 and sigma_m == 0 for m < 0 or m > n.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace curvflow::symfunc {

/// Ordered principal curvatures (lambda_1, ..., lambda_n), n >= 2, all finite.
class CurvatureVector {
 public:
  explicit CurvatureVector(std::vector<double> values);
  CurvatureVector(std::initializer_list<double> values);

  int n() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Copy sorted so that lambda_1 >= ... >= lambda_n.
  CurvatureVector sorted_descending() const;

 private:
  std::vector<double> values_;
};

struct ConeLabel {
  int k = 0;
  bool contained = false;
};

/// F = sigma_{k+1}/sigma_k and its diagonal gradient F^{ii} = dF/dlambda_i.
struct QuotientPackage {
  double F = 0.0;
  std::vector<double> gradDiag;
  double traceGrad = 0.0;      // sum_i F^{ii}
  double weightedTrace = 0.0;  // sum_i F^{ii} lambda_i^2
  double c = 0.0;              // c_{n,k} = (n-k)/(k+1)
};

struct PairwiseSumParts {
  double nDef = 0.0;   // m(n-m) s_m^2 - (m+1)(n-m+1) s_{m+1} s_{m-1}
  double nSum = 0.0;   // pairwise form sum_{i<j} (l_i-l_j)^2 [...]
  double pinch = 0.0;  // (lambda_1 - lambda_n)^2 / lambda_1^2
};

double binomial(int n, int k);

/// c_{n,k} = sigma_{k+1}(I)/sigma_k(I) = (n-k)/(k+1).
double c_nk(int n, int k);

/// sigma_m over a raw span; used by the grid code which keeps curvatures
/// in structure-of-arrays form.
double sigma(std::span<const double> lambda, int m);
double sigma(const CurvatureVector& lambda, int m);

/// All of sigma_0 .. sigma_n in one pass.
std::vector<double> sigma_all(std::span<const double> lambda);

/// sigma_m with the entries at `excluded` (one or two distinct indices) set to 0.
double sigma_excl(const CurvatureVector& lambda, int m,
                  std::initializer_list<std::size_t> excluded);
double sigma_excl(std::span<const double> lambda, int m,
                  std::span<const std::size_t> excluded);

/// sigma_m(|lambda|): the natural magnitude against which roundoff in
/// sigma_m(lambda) is measured.
double sigma_scale(std::span<const double> lambda, int m);

/// Strict membership in Gamma_k, zero tolerance.
ConeLabel gamma_cone_contains(const CurvatureVector& lambda, int k);

/// Membership in the closure: sigma_i >= -1e-14 * sigma_i(|lambda|), i <= k.
bool closed_cone_contains(const CurvatureVector& lambda, int k);

/// Throws ConeViolation when sigma_k <= 0. Valid for 0 <= k <= n-1.
QuotientPackage quotient(std::span<const double> lambda, int k);
QuotientPackage quotient(const CurvatureVector& lambda, int k);

/// RHS - LHS of the generalized Newton-MacLaurin inequality
///   [(s_k/C(n,k)) / (s_l/C(n,l))]^{1/(k-l)} <= [(s_r/C(n,r)) / (s_s/C(n,s))]^{1/(r-s)}
/// for lambda in Gamma_k, k > l >= 0, r > s >= 0, k >= r, l >= s.
double newton_maclaurin_gap(const CurvatureVector& lambda, int k, int l, int r, int s);

/// (sum F^{ii} l_i^2 - F^2/c_{n,k},  sum F^{ii} - c_{n,k}); both >= 0 on Gamma_k.
std::pair<double, double> quotient_trace_gaps(const CurvatureVector& lambda, int k);

/// Requires lambda in Gamma_n and 1 <= m <= n-1. Sorts internally.
PairwiseSumParts pairwise_sum_parts(const CurvatureVector& lambda, int m);

/// d^2 sigma_m(W) / dW_ij dW_kl at a diagonal W = diag(lambda).
double sigma_hessian(const CurvatureVector& lambda, int m, std::size_t i, std::size_t j,
                     std::size_t k, std::size_t l);

}  // namespace curvflow::symfunc
