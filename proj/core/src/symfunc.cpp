#include "curvflow/symfunc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow::symfunc {

namespace {

// One pass of the product expansion prod_i (1 + lambda_i t), truncated at
// degree m, into e[0..m]. Entries flagged in `skip` contribute nothing.
void expand_skipping(std::span<const double> lambda, int m, std::span<const std::size_t> skip,
                     double* e) {
  std::fill(e, e + m + 1, 0.0);
  e[0] = 1.0;
  int seen = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
    ++seen;
    const int top = std::min(seen, m);
    for (int j = top; j >= 1; --j) e[j] += lambda[i] * e[j - 1];
  }
}

constexpr int kStackDegree = 32;

double sigma_skipping(std::span<const double> lambda, int m,
                      std::span<const std::size_t> skip) {
  if (m < 0) return 0.0;
  if (m == 0) return 1.0;
  if (m < kStackDegree) {
    double e[kStackDegree];
    expand_skipping(lambda, m, skip, e);
    return e[m];
  }
  std::vector<double> e(static_cast<std::size_t>(m) + 1);
  expand_skipping(lambda, m, skip, e.data());
  return e[m];
}

void check_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::domain_error("curvature vector has non-finite entry");
}

}  // namespace

CurvatureVector::CurvatureVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw std::domain_error("curvature vector needs n >= 2");
  check_finite(values_);
}

CurvatureVector::CurvatureVector(std::initializer_list<double> values)
    : CurvatureVector(std::vector<double>(values)) {}

CurvatureVector CurvatureVector::sorted_descending() const {
  std::vector<double> v = values_;
  std::sort(v.begin(), v.end(), std::greater<>());
  return CurvatureVector(std::move(v));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double c_nk(int n, int k) {
  return static_cast<double>(n - k) / static_cast<double>(k + 1);
}

double sigma(std::span<const double> lambda, int m) {
  if (m < 0 || m > static_cast<int>(lambda.size()))
    throw std::domain_error("sigma: order " + std::to_string(m) + " out of range");
  return sigma_skipping(lambda, m, {});
}

double sigma(const CurvatureVector& lambda, int m) { return sigma(lambda.values(), m); }

std::vector<double> sigma_all(std::span<const double> lambda) {
  const std::size_t n = lambda.size();
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j >= 1; --j) e[j] += lambda[i] * e[j - 1];
  return e;
}

double sigma_excl(std::span<const double> lambda, int m,
                  std::span<const std::size_t> excluded) {
  const int n = static_cast<int>(lambda.size());
  if (excluded.empty() || excluded.size() > 2)
    throw std::domain_error("sigma_excl: exclude one or two indices");
  for (std::size_t idx : excluded)
    if (idx >= lambda.size()) throw std::domain_error("sigma_excl: index out of range");
  if (excluded.size() == 2 && excluded[0] == excluded[1])
    throw std::domain_error("sigma_excl: excluded indices must be distinct");
  if (m < 0 || m > n - static_cast<int>(excluded.size()))
    throw std::domain_error("sigma_excl: order out of range");
  return sigma_skipping(lambda, m, excluded);
}

double sigma_excl(const CurvatureVector& lambda, int m,
                  std::initializer_list<std::size_t> excluded) {
  return sigma_excl(lambda.values(), m,
                    std::span<const std::size_t>(excluded.begin(), excluded.size()));
}

double sigma_scale(std::span<const double> lambda, int m) {
  std::vector<double> a(lambda.begin(), lambda.end());
  for (double& x : a) x = std::abs(x);
  return sigma(a, m);
}

ConeLabel gamma_cone_contains(const CurvatureVector& lambda, int k) {
  if (k < 1 || k > lambda.n()) throw std::domain_error("cone index out of range");
  const auto s = sigma_all(lambda.values());
  ConeLabel label{k, true};
  for (int i = 1; i <= k; ++i)
    if (!(s[i] > 0.0)) label.contained = false;
  return label;
}

bool closed_cone_contains(const CurvatureVector& lambda, int k) {
  if (k < 1 || k > lambda.n()) throw std::domain_error("cone index out of range");
  const auto s = sigma_all(lambda.values());
  for (int i = 1; i <= k; ++i)
    if (s[i] < -1e-14 * sigma_scale(lambda.values(), i)) return false;
  return true;
}

QuotientPackage quotient(std::span<const double> lambda, int k) {
  const int n = static_cast<int>(lambda.size());
  if (k < 0 || k > n - 1) throw std::domain_error("quotient: k must lie in [0, n-1]");
  const double sk = sigma(lambda, k);
  if (!(sk > 0.0))
    throw ConeViolation("quotient: sigma_" + std::to_string(k) + " <= 0");
  const double sk1 = sigma(lambda, k + 1);

  QuotientPackage q;
  q.c = c_nk(n, k);
  q.F = sk1 / sk;
  q.gradDiag.resize(lambda.size());
  const double sk2 = sk * sk;
  std::vector<double> buf(static_cast<std::size_t>(k) + 1);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const std::size_t skip[1] = {i};
    expand_skipping(lambda, k, skip, buf.data());
    const double ski = buf[k];
    const double skm1i = k >= 1 ? buf[k - 1] : 0.0;
    const double g = (ski * sk - sk1 * skm1i) / sk2;
    q.gradDiag[i] = g;
    q.traceGrad += g;
    q.weightedTrace += g * lambda[i] * lambda[i];
  }
  return q;
}

QuotientPackage quotient(const CurvatureVector& lambda, int k) {
  return quotient(lambda.values(), k);
}

double newton_maclaurin_gap(const CurvatureVector& lambda, int k, int l, int r, int s) {
  const int n = lambda.n();
  if (!(k > l && l >= 0 && r > s && s >= 0 && k >= r && l >= s && k <= n))
    throw std::domain_error("newton_maclaurin_gap: invalid (k,l,r,s)");
  if (k >= 1 && !gamma_cone_contains(lambda, k).contained)
    throw ConeViolation("newton_maclaurin_gap: lambda not in Gamma_k");
  const auto sg = sigma_all(lambda.values());
  auto q = [&](int j) { return sg[j] / binomial(n, j); };
  const double lhs = std::pow(q(k) / q(l), 1.0 / (k - l));
  const double rhs = std::pow(q(r) / q(s), 1.0 / (r - s));
  return rhs - lhs;
}

std::pair<double, double> quotient_trace_gaps(const CurvatureVector& lambda, int k) {
  const auto q = quotient(lambda, k);
  return {q.weightedTrace - q.F * q.F / q.c, q.traceGrad - q.c};
}

PairwiseSumParts pairwise_sum_parts(const CurvatureVector& input, int m) {
  const int n = input.n();
  if (m < 1 || m > n - 1) throw std::domain_error("pairwise_sum_parts: m must lie in [1, n-1]");
  const CurvatureVector lambda = input.sorted_descending();
  if (!gamma_cone_contains(lambda, n).contained)
    throw ConeViolation("pairwise_sum_parts: lambda not in Gamma_n");

  const auto s = sigma_all(lambda.values());
  PairwiseSumParts out;
  out.nDef = m * (n - m) * s[m] * s[m] - (m + 1) * (n - m + 1) * s[m + 1] * s[m - 1];

  const auto v = lambda.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const std::size_t skip[2] = {i, j};
      const double a = sigma_skipping(v, m - 1, skip);
      const double b = sigma_skipping(v, m - 2, skip);
      const double c = sigma_skipping(v, m, skip);
      const double d = v[i] - v[j];
      out.nSum += d * d * (a * a - b * c);
    }
  }
  const double spread = v.front() - v.back();
  out.pinch = spread * spread / (v.front() * v.front());
  return out;
}

double sigma_hessian(const CurvatureVector& lambda, int m, std::size_t i, std::size_t j,
                     std::size_t k, std::size_t l) {
  const std::size_t n = static_cast<std::size_t>(lambda.n());
  if (i >= n || j >= n || k >= n || l >= n)
    throw std::domain_error("sigma_hessian: index out of range");
  if (m < 0 || m > lambda.n()) throw std::domain_error("sigma_hessian: order out of range");
  if (m < 2) return 0.0;
  if (i == j && k == l && i != k) return sigma_excl(lambda, m - 2, {i, k});
  if (i == l && j == k && i != j) return -sigma_excl(lambda, m - 2, {i, j});
  return 0.0;
}

}  // namespace curvflow::symfunc
