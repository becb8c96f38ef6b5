#include "curvflow/identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "curvflow/errors.hpp"
#include "curvflow/symfunc.hpp"

namespace curvflow::identity {

using symfunc::CurvatureVector;

std::size_t SuiteReport::total_failures() const {
  std::size_t f = 0;
  for (const auto& c : checks) f += c.failures;
  return f;
}

namespace {

bool in_cone(std::span<const double> v, int k) {
  for (int i = 1; i <= k; ++i)
    if (!(symfunc::sigma(v, i) > 0.0)) return false;
  return true;
}

// sigma_m(lambda|i), zero when m exceeds the n-1 remaining entries.
double excl(std::span<const double> v, int m, std::size_t i) {
  if (m > static_cast<int>(v.size()) - 1) return 0.0;
  const std::size_t ex[1] = {i};
  return symfunc::sigma_excl(v, m, ex);
}

std::string describe(std::span<const double> v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

// Tracks one named check; excess is violation / (tol * scale).
class Tally {
 public:
  Tally(std::string name, int n, int index) {
    r_.name = std::move(name);
    r_.n = n;
    r_.index = index;
  }

  void expect_le(double value, double bound, double tol, double scale, std::span<const double> lambda,
                 const char* what) {
    ++r_.evaluations;
    const double allowed = tol * std::max(scale, std::numeric_limits<double>::min());
    const double excess = (value - bound) / allowed;
    if (!std::isfinite(value) || !std::isfinite(bound) || value - bound > allowed) {
      if (r_.failures++ == 0) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": " << value << " > " << bound << " at lambda=" << describe(lambda);
        r_.firstFailure = os.str();
      }
    }
    if (std::isfinite(excess)) r_.worst = std::max(r_.worst, excess);
  }

  void expect_near(double a, double b, double tol, double scale, std::span<const double> lambda,
                   const char* what) {
    expect_le(std::abs(a - b), 0.0, tol, scale, lambda, what);
  }

  CheckResult take() { return std::move(r_); }

 private:
  CheckResult r_;
};

void expansion_identities(const SuiteConfig& c, std::mt19937_64& rng, int n, std::vector<CheckResult>& out) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n), a(n);
  for (int k = 1; k <= n; ++k) {
    Tally t("expansion identities", n, k);
    for (std::size_t s = 0; s < c.samples; ++s) {
      for (auto& x : v) x = g(rng);
      for (int i = 0; i < n; ++i) a[i] = std::abs(v[i]);
      const double sk = symfunc::sigma(v, k);
      const double scaleK = symfunc::sigma_scale(v, k);
      double sumLambda = 0.0, sumExcl = 0.0, sumLambdaAbs = 0.0, sumExclAbs = 0.0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        const double kExcl = excl(v, k, i);
        const double km1Excl = excl(v, k - 1, i);
        t.expect_near(sk, kExcl + v[i] * km1Excl, c.relTol, scaleK, v, "sigma_k = sigma_k(|i) + l_i sigma_{k-1}(|i)");
        sumLambda += v[i] * km1Excl;
        sumExcl += kExcl;
        sumLambdaAbs += a[i] * excl(a, k - 1, i);
        sumExclAbs += excl(a, k, i);
      }
      t.expect_near(sumLambda, k * sk, c.relTol, sumLambdaAbs, v, "sum l_i sigma_{k-1}(|i) = k sigma_k");
      t.expect_near(sumExcl, (n - k) * sk, c.relTol, std::max(sumExclAbs, scaleK), v,
                    "sum sigma_k(|i) = (n-k) sigma_k");
      // homogeneity, by an exactly representable factor
      std::vector<double> w(v);
      for (auto& x : w) x *= 2.0;
      t.expect_near(symfunc::sigma(w, k), std::ldexp(sk, k), c.relTol, std::ldexp(scaleK, k), v,
                    "sigma_k(2 l) = 2^k sigma_k(l)");
    }
    out.push_back(t.take());
  }
}

void ordering_bounds(const SuiteConfig& c, std::mt19937_64& rng, int n, std::vector<CheckResult>& out) {
  for (int k = 1; k <= n; ++k) {
    Tally t("cone orderings and product bounds", n, k);
    for (std::size_t s = 0; s < c.samples; ++s) {
      const bool boundary = (s % 4 == 3);
      auto v = sample_cone(rng, n, k, boundary);
      std::sort(v.begin(), v.end(), std::greater<>());
      const double scaleKm1 = symfunc::sigma_scale(v, k - 1);
      double prev = std::numeric_limits<double>::infinity();
      // sigma_{k-1}(lambda|i) non-decreasing in i along the sorted order: walk from i = n down.
      for (int i = n - 1; i >= 0; --i) {
        const double e = excl(v, k - 1, static_cast<std::size_t>(i));
        if (prev != std::numeric_limits<double>::infinity())
          t.expect_le(e, prev, c.relTol, scaleKm1, v, "sigma_{k-1}(|i) ordering");
        prev = e;
        if (i == 0) t.expect_le(0.0, e, 0.0, 1.0, v, "sigma_{k-1}(|1) > 0");
      }
      t.expect_le(0.0, v[k - 1], 0.0, 1.0, v, "lambda_k > 0");
      double prod = 1.0;
      for (int i = 0; i < k; ++i) prod *= v[i];
      const double sk = symfunc::sigma(v, k);
      const double scaleK = symfunc::sigma_scale(v, k);
      t.expect_le(sk, symfunc::binomial(n, k) * prod, c.relTol, scaleK, v, "sigma_k <= C(n,k) l_1..l_k");
      if (k < n && in_cone(v, k + 1))
        t.expect_le(prod, sk, c.relTol, scaleK, v, "sigma_k >= l_1..l_k on Gamma_{k+1}");
    }
    out.push_back(t.take());
  }
}

void newton_maclaurin_gaps(const SuiteConfig& c, std::mt19937_64& rng, int n, std::vector<CheckResult>& out) {
  for (int k = 1; k <= n; ++k) {
    Tally t("Newton-MacLaurin gaps", n, k);
    for (std::size_t s = 0; s < c.samples; ++s) {
      const auto v = sample_cone(rng, n, k, s % 4 == 3);
      const CurvatureVector lam(v);
      const auto sg = symfunc::sigma_all(v);
      auto q = [&](int j) { return sg[j] / symfunc::binomial(n, j); };
      for (int l = 0; l < k; ++l)
        for (int ss = 0; ss <= l; ++ss)
          for (int r = ss + 1; r <= k; ++r) {
            const double gap = symfunc::newton_maclaurin_gap(lam, k, l, r, ss);
            const double rhs = std::pow(q(r) / q(ss), 1.0 / (r - ss));
            t.expect_le(-gap, 0.0, c.quotientTol, std::abs(rhs), v, "Newton-MacLaurin gap >= 0");
          }
    }
    out.push_back(t.take());
  }
}

void quotient_trace_bounds(const SuiteConfig& c, std::mt19937_64& rng, int n, std::vector<CheckResult>& out) {
  for (int k = 0; k <= n - 1; ++k) {
    Tally t("gradient trace bounds", n, k);
    const double cnk = symfunc::c_nk(n, k);
    for (std::size_t s = 0; s < c.samples; ++s) {
      const auto v = sample_cone(rng, n, k, s % 4 == 3);
      const auto q = symfunc::quotient(v, k);
      const auto [g1, g2] = symfunc::quotient_trace_gaps(CurvatureVector(v), k);
      t.expect_le(-g1, 0.0, c.quotientTol, std::max(q.weightedTrace, q.F * q.F / cnk), v,
                  "sum F^ii l_i^2 >= F^2/c");
      t.expect_le(-g2, 0.0, c.quotientTol, q.traceGrad, v, "sum F^ii >= c");

      // upper bound on the closure of Gamma_{k+1}
      const auto w = sample_cone(rng, n, k + 1, s % 2 == 1);
      const auto qw = symfunc::quotient(w, k);
      t.expect_le(qw.traceGrad, static_cast<double>(n - k), c.quotientTol, n - k, w,
                  "sum F^ii <= n-k on closed Gamma_{k+1}");
    }
    out.push_back(t.take());
  }
}

void pairwise_sum_identity(const SuiteConfig& c, std::mt19937_64& rng, int n, std::vector<CheckResult>& out,
             std::vector<ComparabilityRange>& ranges) {
  for (int m = 1; m <= n - 1; ++m) {
    Tally t("pairwise summation identity", n, m);
    ComparabilityRange range{n, m, std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t s = 0; s < c.samples; ++s) {
      const auto v = sample_positive(rng, n, c.maxSpread);
      const auto parts = symfunc::pairwise_sum_parts(CurvatureVector(v), m);
      const auto sg = symfunc::sigma_all(v);
      const double scale = m * (n - m) * sg[m] * sg[m] + (m + 1) * (n - m + 1) * sg[m + 1] * sg[m - 1];
      t.expect_near(parts.nDef, parts.nSum, c.relTol, scale, v, "N_def == N_sum");
      t.expect_le(-parts.nDef, 0.0, c.relTol, scale, v, "N_def >= 0");
      if (parts.pinch > 1e-6) {
        const double ratio = parts.nDef / (sg[m] * sg[m]) / parts.pinch;
        range.minRatio = std::min(range.minRatio, ratio);
        range.maxRatio = std::max(range.maxRatio, ratio);
      }
    }
    out.push_back(t.take());
    ranges.push_back(range);
  }
}

}  // namespace

std::vector<double> sample_cone(std::mt19937_64& rng, int n, int k, bool nearBoundary) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  const double scale = std::exp(u(rng));
  if (k <= 0) {
    for (auto& v : x) v *= scale;
    return x;
  }
  auto shifted = [&](double t) {
    std::vector<double> y(x);
    for (auto& v : y) v += t;
    return y;
  };
  const double big = 1.0 + std::abs(*std::max_element(x.begin(), x.end(), [](double a, double b) {
                       return std::abs(a) < std::abs(b);
                     }));
  double lo = -big, hi = big;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * big; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (in_cone(shifted(mid), k))
      hi = mid;
    else
      lo = mid;
  }
  double t = hi;
  if (!nearBoundary) t += std::exp(std::uniform_real_distribution<double>(-4.0, 1.0)(rng));
  auto y = shifted(t);
  for (auto& v : y) v *= scale;
  // scaling by a positive factor keeps cone membership up to roundoff; nudge if it did not
  while (!in_cone(y, k))
    for (auto& v : y) v += 1e-15 * big * scale;
  return y;
}

std::vector<double> sample_positive(std::mt19937_64& rng, int n, double maxSpread) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const double scale = std::exp(6.0 * u(rng) - 3.0);
  std::vector<double> v(n);
  if (u(rng) < 0.2) {
    const double eps = std::pow(10.0, -3.0 * u(rng) - 1.0);
    for (auto& x : v) x = scale * std::max(1e-3, 1.0 + eps * g(rng));
  } else {
    const double logSpread = std::log(maxSpread);
    for (auto& x : v) x = scale * std::exp(logSpread * u(rng));
  }
  return v;
}

SuiteReport run_suite(const SuiteConfig& config) {
  if (config.nMin < 2 || config.nMax < config.nMin)
    throw std::invalid_argument("identity suite: need 2 <= nMin <= nMax");
  if (config.samples == 0) throw std::invalid_argument("identity suite: samples must be positive");
  SuiteReport report;
  report.config = config;
  for (int n = config.nMin; n <= config.nMax; ++n) {
    // one stream per (n, family) so a family's samples do not depend on the others
    auto stream = [&](std::uint64_t family) {
      std::seed_seq seq{config.seed, static_cast<std::uint64_t>(n), family};
      return std::mt19937_64(seq);
    };
    auto r1 = stream(1);
    expansion_identities(config, r1, n, report.checks);
    auto r2 = stream(2);
    ordering_bounds(config, r2, n, report.checks);
    auto r3 = stream(3);
    newton_maclaurin_gaps(config, r3, n, report.checks);
    auto r4 = stream(4);
    quotient_trace_bounds(config, r4, n, report.checks);
    auto r5 = stream(5);
    pairwise_sum_identity(config, r5, n, report.checks, report.comparability);
  }
  return report;
}

std::string summarize(const SuiteReport& report) {
  std::ostringstream os;
  char buf[256];
  for (const auto& c : report.checks) {
    std::snprintf(buf, sizeof buf, "%-4s %-36s n=%d idx=%d evals=%zu failures=%zu worst=%.3g\n",
                  c.failures ? "FAIL" : "ok", c.name.c_str(), c.n, c.index, c.evaluations, c.failures,
                  c.worst);
    os << buf;
    if (c.failures) os << "     first: " << c.firstFailure << '\n';
  }
  for (const auto& r : report.comparability) {
    std::snprintf(buf, sizeof buf, "ratio n=%d m=%d  [%.4g, %.4g]\n", r.n, r.m, r.minRatio, r.maxRatio);
    os << buf;
  }
  return os.str();
}

}  // namespace curvflow::identity
