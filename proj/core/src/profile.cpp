#include "curvflow/profile.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "curvflow/errors.hpp"
#include "curvflow/symfunc.hpp"

namespace curvflow {

using std::numbers::pi;

std::vector<double> polar_nodes(std::size_t N) {
  if (N < 2) throw InvalidProfile("polar grid needs at least 2 nodes");
  std::vector<double> t(N);
  const double h = pi / static_cast<double>(N - 1);
  for (std::size_t j = 0; j < N; ++j) t[j] = h * static_cast<double>(j);
  t.back() = pi;
  return t;
}

double sphere_area(int d) {
  if (d < 0) throw std::domain_error("sphere_area: negative dimension");
  if (d == 0) return 2.0;
  if (d == 1) return 2.0 * pi;
  return 2.0 * pi / (d - 1) * sphere_area(d - 2);
}

RadialProfile::RadialProfile(int n, std::vector<double> theta, std::vector<double> rho)
    : n_(n), theta_(std::move(theta)), rho_(std::move(rho)) {
  if (n_ < 2) throw InvalidProfile("profile dimension n must be >= 2");
  if (theta_.size() != rho_.size()) throw InvalidProfile("theta/rho length mismatch");
  if (theta_.size() < 2) throw InvalidProfile("profile needs at least 2 nodes");
  if (theta_.front() != 0.0 || std::abs(theta_.back() - pi) > 1e-14)
    throw InvalidProfile("theta must run from 0 to pi");
  const double h = spacing();
  for (std::size_t j = 1; j < theta_.size(); ++j) {
    if (!(theta_[j] > theta_[j - 1])) throw InvalidProfile("theta must be strictly increasing");
    if (std::abs(theta_[j] - theta_[j - 1] - h) > 1e-12)
      throw InvalidProfile("theta nodes must be uniformly spaced");
  }
  for (std::size_t j = 0; j < rho_.size(); ++j) {
    if (!(rho_[j] > 0.0 && rho_[j] < pi / 2))
      throw InvalidProfile("rho out of (0, pi/2) at node " + std::to_string(j));
  }
}

RadialProfile RadialProfile::sample(int n, std::size_t N,
                                    const std::function<double(double)>& rhoOf) {
  auto theta = polar_nodes(N);
  std::vector<double> rho(N);
  for (std::size_t j = 0; j < N; ++j) rho[j] = rhoOf(theta[j]);
  return RadialProfile(n, std::move(theta), std::move(rho));
}

RadialProfile RadialProfile::constant(int n, std::size_t N, double r) {
  return sample(n, N, [r](double) { return r; });
}

RadialProfile RadialProfile::perturbed(int n, std::size_t N, double r0, double eps, int mode) {
  return sample(n, N, [=](double t) { return r0 + eps * std::cos(mode * t); });
}

double RadialProfile::spacing() const {
  return pi / static_cast<double>(theta_.size() - 1);
}

RadialProfile RadialProfile::with_rho(std::vector<double> rho) const {
  return RadialProfile(n_, theta_, std::move(rho));
}

Derivatives differentiate_even(std::span<const double> v, double h) {
  const std::size_t N = v.size();
  if (N < 5) throw InvalidProfile("grid too coarse: need at least 5 nodes");
  Derivatives d;
  d.first.assign(N, 0.0);
  d.second.assign(N, 0.0);
  const double inv2h = 0.5 / h;
  const double invh2 = 1.0 / (h * h);
  for (std::size_t j = 1; j + 1 < N; ++j) {
    d.first[j] = (v[j + 1] - v[j - 1]) * inv2h;
    d.second[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) * invh2;
  }
  // Ghost values v[-1] = v[1] and v[N] = v[N-2].
  d.second[0] = 2.0 * (v[1] - v[0]) * invh2;
  d.second[N - 1] = 2.0 * (v[N - 2] - v[N - 1]) * invh2;
  // cot(t) * (v(t+h) - v(t-h))/(2h) -> v'(h)/h as t -> 0; with a = v1 - v0 and
  // b = v2 - v0 that is (8a + b)/(6h^2) up to O(h^4).
  d.poleLimitNorth = (8.0 * (v[1] - v[0]) + (v[2] - v[0])) * invh2 / 6.0;
  d.poleLimitSouth = (8.0 * (v[N - 2] - v[N - 1]) + (v[N - 3] - v[N - 1])) * invh2 / 6.0;
  return d;
}

Derivatives differentiate(const RadialProfile& profile) {
  return differentiate_even(profile.rho(), profile.spacing());
}

namespace {

// int_0^pi cos(m t) sin^p(t) dt, exact, from the exponential expansion of sin^p.
double cos_sin_moment(int m, int p) {
  using cd = std::complex<double>;
  const cd twoI(0.0, 2.0);
  const cd scale = 1.0 / std::pow(twoI, p);
  cd total = 0.0;
  auto expIntegral = [](int L) -> cd {
    // int_0^pi e^{i L t} dt
    if (L == 0) return pi;
    const double sgn = (L % 2 == 0) ? 1.0 : -1.0;
    return (sgn - 1.0) / cd(0.0, static_cast<double>(L));
  };
  for (int q = 0; q <= p; ++q) {
    const int j = p - 2 * q;
    const double a = symfunc::binomial(p, q) * ((q % 2 == 0) ? 1.0 : -1.0);
    total += a * 0.5 * (expIntegral(j + m) + expIntegral(j - m));
  }
  return (scale * total).real();
}

std::vector<double> build_weights(int n, std::size_t N) {
  const std::size_t M = N - 1;
  std::vector<double> mu(N);
  for (std::size_t m = 0; m < N; ++m) mu[m] = cos_sin_moment(static_cast<int>(m), n - 1);
  std::vector<double> w(N, 0.0);
  const double h = pi / static_cast<double>(M);
  for (std::size_t j = 0; j < N; ++j) {
    double acc = 0.0;
    for (std::size_t m = 0; m < N; ++m) {
      const double cm = (m == 0 || m == M) ? 0.5 : 1.0;
      // cos(m j pi / M) with the product reduced mod 2M to keep the argument small
      const std::size_t r = (m * j) % (2 * M);
      acc += cm * mu[m] * std::cos(h * static_cast<double>(r));
    }
    const double cj = (j == 0 || j == M) ? 0.5 : 1.0;
    w[j] = 2.0 / static_cast<double>(M) * cj * acc;
  }
  return w;
}

}  // namespace

std::span<const double> polar_weights(int n, std::size_t N) {
  if (N < 2) throw InvalidProfile("quadrature needs at least 2 nodes");
  static std::mutex mutex;
  static std::map<std::pair<int, std::size_t>, std::unique_ptr<std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, N}];
  if (!slot) slot = std::make_unique<std::vector<double>>(build_weights(n, N));
  return *slot;
}

CosineSeries::CosineSeries(std::span<const double> f) {
  const std::size_t N = f.size();
  if (N < 2) throw InvalidProfile("cosine series needs at least 2 samples");
  const std::size_t M = N - 1;
  const double h = pi / static_cast<double>(M);
  coeff_.assign(N, 0.0);
  for (std::size_t m = 0; m < N; ++m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double cj = (j == 0 || j == M) ? 0.5 : 1.0;
      acc += cj * f[j] * std::cos(h * static_cast<double>((m * j) % (2 * M)));
    }
    const double cm = (m == 0 || m == M) ? 0.5 : 1.0;
    coeff_[m] = cm * 2.0 / static_cast<double>(M) * acc;
  }
}

// cos(m t) and sin(m t) by the three-term recurrence; one sincos per call.
double CosineSeries::value(double theta) const {
  const double c1 = std::cos(theta);
  double cPrev = 1.0, cCur = c1;
  double s = coeff_[0];
  for (std::size_t m = 1; m < coeff_.size(); ++m) {
    s += coeff_[m] * cCur;
    const double cNext = 2.0 * c1 * cCur - cPrev;
    cPrev = cCur;
    cCur = cNext;
  }
  return s;
}

double CosineSeries::derivative(double theta) const {
  const double c1 = std::cos(theta);
  double sPrev = 0.0, sCur = std::sin(theta);
  double s = 0.0;
  for (std::size_t m = 1; m < coeff_.size(); ++m) {
    s -= coeff_[m] * static_cast<double>(m) * sCur;
    const double sNext = 2.0 * c1 * sCur - sPrev;
    sPrev = sCur;
    sCur = sNext;
  }
  return s;
}

double CosineSeries::second_derivative(double theta) const {
  const double c1 = std::cos(theta);
  double cPrev = 1.0, cCur = c1;
  double s = 0.0;
  for (std::size_t m = 1; m < coeff_.size(); ++m) {
    const double mm = static_cast<double>(m);
    s -= coeff_[m] * mm * mm * cCur;
    const double cNext = 2.0 * c1 * cCur - cPrev;
    cPrev = cCur;
    cCur = cNext;
  }
  return s;
}

}  // namespace curvflow
