#include "curvflow/hypersurface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow::hypersurface {

symfunc::CurvatureVector GeometryState::curvatures(std::size_t j) const {
  std::vector<double> v(static_cast<std::size_t>(n), lambdaAng[j]);
  v[0] = lambda1[j];
  return symfunc::CurvatureVector(std::move(v));
}

double GeometryState::sigma(std::size_t j, int m) const {
  return symfunc::sigma(curvatures(j), m);
}

double GeometryState::min_lambda() const {
  return std::min(*std::min_element(lambda1.begin(), lambda1.end()),
                  *std::min_element(lambdaAng.begin(), lambdaAng.end()));
}

double GeometryState::max_lambda() const {
  return std::max(*std::max_element(lambda1.begin(), lambda1.end()),
                  *std::max_element(lambdaAng.begin(), lambdaAng.end()));
}

double GeometryState::max_abs_lambda() const {
  return std::max(std::abs(min_lambda()), std::abs(max_lambda()));
}

NodeCurvature node_curvature(double rho, double rhoT, double rhoTT, double cotRhoT) {
  const double phi = std::sin(rho);
  const double dphi = std::cos(rho);
  const double wt = std::sqrt(phi * phi + rhoT * rhoT);
  NodeCurvature c;
  c.lambda1 = (-phi * rhoTT + 2.0 * dphi * rhoT * rhoT + phi * phi * dphi) / (wt * wt * wt);
  c.lambdaAng = (phi * dphi - cotRhoT) / (phi * wt);
  return c;
}

std::vector<double> angular_term(const Derivatives& d, std::span<const double> theta,
                                 PoleRule rule) {
  const std::size_t N = d.first.size();
  std::vector<double> out(N);
  for (std::size_t j = 1; j + 1 < N; ++j)
    out[j] = d.first[j] * std::cos(theta[j]) / std::sin(theta[j]);
  if (rule == PoleRule::umbilic) {
    out[0] = d.second[0];
    out[N - 1] = d.second[N - 1];
  } else {
    out[0] = d.poleLimitNorth;
    out[N - 1] = d.poleLimitSouth;
  }
  return out;
}

GeometryState geometry(const RadialProfile& profile, int k, PoleRule poles) {
  const int n = profile.n();
  if (k < 0 || k > n - 1) throw std::domain_error("geometry: k must lie in [0, n-1]");
  const auto d = differentiate(profile);
  const std::size_t N = profile.size();

  GeometryState s;
  s.n = n;
  s.k = k;
  s.poles = poles;
  s.h = profile.spacing();
  s.theta.assign(profile.theta().begin(), profile.theta().end());
  s.rho.assign(profile.rho().begin(), profile.rho().end());
  s.gradRho = d.first;
  s.hessRho = d.second;
  for (auto* v : {&s.phi, &s.phiPrime, &s.u, &s.omegaTilde, &s.omegaSpeed, &s.lambda1,
                  &s.lambdaAng, &s.F, &s.grad1, &s.gradAng, &s.traceGrad, &s.weightedTrace,
                  &s.areaWeight})
    v->resize(N);

  const auto cotRhoT = angular_term(d, s.theta, poles);
  std::vector<double> lam(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < N; ++j) {
    const double phi = std::sin(s.rho[j]);
    const double wt = std::sqrt(phi * phi + s.gradRho[j] * s.gradRho[j]);
    const auto c = node_curvature(s.rho[j], s.gradRho[j], s.hessRho[j], cotRhoT[j]);
    s.phi[j] = phi;
    s.phiPrime[j] = std::cos(s.rho[j]);
    s.omegaTilde[j] = wt;
    s.omegaSpeed[j] = wt / phi;
    s.u[j] = phi * phi / wt;
    s.lambda1[j] = c.lambda1;
    s.lambdaAng[j] = c.lambdaAng;
    s.areaWeight[j] = std::pow(phi, n - 1) * wt;

    std::fill(lam.begin(), lam.end(), c.lambdaAng);
    lam[0] = c.lambda1;
    try {
      const auto q = symfunc::quotient(lam, k);
      s.F[j] = q.F;
      s.grad1[j] = q.gradDiag[0];
      s.gradAng[j] = q.gradDiag[1];
      s.traceGrad[j] = q.traceGrad;
      s.weightedTrace[j] = q.weightedTrace;
    } catch (const ConeViolation&) {
      throw ConeViolation("geometry: sigma_" + std::to_string(k) + " <= 0 at node " +
                              std::to_string(j),
                          j);
    }
  }
  return s;
}

double integrate(const GeometryState& state, std::span<const double> nodal) {
  if (nodal.size() != state.size()) throw std::invalid_argument("integrate: length mismatch");
  const auto w = polar_weights(state.n, state.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < nodal.size(); ++j) acc += w[j] * nodal[j] * state.areaWeight[j];
  return sphere_area(state.n - 1) * acc;
}

namespace {

struct GaussLegendre {
  static constexpr int kNodes = 32;
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};

  GaussLegendre() {
    for (int i = 0; i < kNodes; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (kNodes + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int j = 2; j <= kNodes; ++j) {
          const double p2 = ((2 * j - 1) * z * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = kNodes * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

double sin_power_recursion(int n, double r) {
  if (n == 0) return r;
  if (n == 1) return 2.0 * std::pow(std::sin(0.5 * r), 2);
  return -std::pow(std::sin(r), n - 1) * std::cos(r) / n +
         static_cast<double>(n - 1) / n * sin_power_recursion(n - 2, r);
}

}  // namespace

double sin_power_integral(int n, double r) {
  if (n < 0) throw std::domain_error("sin_power_integral: negative power");
  // The reduction recursion cancels like r^n for small r; the quadrature of
  // the positive integrand does not.
  if (n <= 1 || r >= 1.0) return sin_power_recursion(n, r);
  static const GaussLegendre gl;
  double acc = 0.0;
  for (int i = 0; i < GaussLegendre::kNodes; ++i) acc += gl.w[i] * std::pow(std::sin(0.5 * r * (gl.x[i] + 1.0)), n);
  return 0.5 * r * acc;
}

double volume(const RadialProfile& profile) {
  const int n = profile.n();
  const auto w = polar_weights(n, profile.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j)
    acc += w[j] * sin_power_integral(n, profile.rho()[j]);
  return sphere_area(n - 1) * acc;
}

double minkowski_residual(const GeometryState& state, int m) {
  const int n = state.n;
  if (m < 0 || m > n - 1) throw std::domain_error("minkowski_residual: m out of range");
  const std::size_t N = state.size();
  std::vector<double> a(N), b(N);
  for (std::size_t j = 0; j < N; ++j) {
    const auto s = symfunc::sigma_all(state.curvatures(j).values());
    a[j] = state.u[j] * s[m + 1];
    b[j] = state.phiPrime[j] * s[m];
  }
  const double lhs = (m + 1) * integrate(state, a);
  const double rhs = (n - m) * integrate(state, b);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

InducedHessian induced_hessian(const GeometryState& s, std::span<const double> w) {
  const std::size_t N = s.size();
  if (w.size() != N) throw std::invalid_argument("induced_hessian: length mismatch");
  const auto d = differentiate_even(w, s.h);
  const auto cotW = angular_term(d, s.theta, s.poles);
  InducedHessian H;
  H.meridian.resize(N);
  H.angular.resize(N);
  H.gradMeridian.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double rt = s.gradRho[j];
    const double A = s.omegaTilde[j] * s.omegaTilde[j];
    const double halfDA = s.phi[j] * s.phiPrime[j] * rt + rt * s.hessRho[j];
    H.meridian[j] = (d.second[j] - halfDA / A * d.first[j]) / A;
    H.angular[j] = (s.phiPrime[j] * rt / s.phi[j] * d.first[j] + cotW[j]) / A;
    H.gradMeridian[j] = d.first[j] / std::sqrt(A);
  }
  return H;
}

OmegaCandidates omega_disambiguation(const GeometryState& s) {
  const auto H = induced_hessian(s, s.rho);
  OmegaCandidates out;
  double scale = 0.0;
  double worstA = 0.0, worstB = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double A = s.omegaTilde[j] * s.omegaTilde[j];
    const double lhs =
        s.u[j] * (s.grad1[j] * H.meridian[j] + (s.n - 1) * s.gradAng[j] * H.angular[j]);
    const double ratio = s.phiPrime[j] / s.phi[j];
    const double metricTerm = ratio * s.u[j] * s.traceGrad[j];
    const double gradTerm = ratio * s.u[j] * s.grad1[j] * s.gradRho[j] * s.gradRho[j] / A;
    const double uF = s.u[j] * s.F[j];
    const double wA = s.phi[j] / s.omegaTilde[j];
    const double wB = s.omegaTilde[j] / s.phi[j];
    worstA = std::max(worstA, std::abs(lhs - (-uF * wA + metricTerm - gradTerm)));
    worstB = std::max(worstB, std::abs(lhs - (-uF * wB + metricTerm - gradTerm)));
    scale = std::max({scale, std::abs(lhs), std::abs(uF * wA), std::abs(uF * wB),
                      std::abs(metricTerm), std::abs(gradTerm)});
  }
  out.residualPhiOverOmega = worstA / scale;
  out.residualOmegaOverPhi = worstB / scale;
  return out;
}

}  // namespace curvflow::hypersurface
