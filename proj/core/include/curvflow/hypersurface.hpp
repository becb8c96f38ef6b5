#pragma once

// Geometry of an axisymmetric radial graph rho(theta) over S^n inside S^{n+1}.
//
// With phi = sin(rho), phi' = cos(rho) and wt = sqrt(phi^2 + rho_theta^2):
//   u          = phi^2 / wt
//   lambda_1   = (-phi rho_tt + 2 phi' rho_t^2 + phi^2 phi') / wt^3     (meridian)
//   lambda_ang = (phi phi' - cot(theta) rho_t) / (phi wt)               (x (n-1))
//   dmu_g      = phi^{n-1} wt  dvol_{S^n}
// At the poles cot(theta) rho_t is replaced by a limit; see PoleRule.

#include <cstddef>
#include <span>
#include <vector>

#include "curvflow/profile.hpp"
#include "curvflow/symfunc.hpp"

namespace curvflow::hypersurface {

/// How the angular term cot(theta) w_theta is closed at the two pole nodes.
///  umbilic:       the continuum limit w_tt, so lambda_1 == lambda_ang there.
///  operatorLimit: the limit of the discrete interior operator itself, which
///                 keeps nodal curvature fields smooth across the poles to
///                 O(h^2). Needed wherever curvature fields are differentiated
///                 again (evolution-identity residuals).
enum class PoleRule { umbilic, operatorLimit };

struct GeometryState {
  int n = 0;
  PoleRule poles = PoleRule::umbilic;
  int k = 0;
  double h = 0.0;

  std::vector<double> theta;
  std::vector<double> rho;
  std::vector<double> phi;
  std::vector<double> phiPrime;
  std::vector<double> gradRho;
  std::vector<double> hessRho;

  std::vector<double> u;
  std::vector<double> omegaTilde;  // sqrt(phi^2 + |grad rho|^2)
  std::vector<double> omegaSpeed;  // omegaTilde / phi, so that d_t rho|_z = f * omegaSpeed
  std::vector<double> lambda1;
  std::vector<double> lambdaAng;

  std::vector<double> F;
  std::vector<double> grad1;    // F^{11}
  std::vector<double> gradAng;  // F^{aa}, a = 2..n
  std::vector<double> traceGrad;
  std::vector<double> weightedTrace;

  std::vector<double> areaWeight;

  std::size_t size() const { return rho.size(); }

  /// (lambda_1, lambda_ang, ..., lambda_ang) at node j.
  symfunc::CurvatureVector curvatures(std::size_t j) const;
  double sigma(std::size_t j, int m) const;
  double min_lambda() const;
  double max_lambda() const;
  double max_abs_lambda() const;
};

/// Full geometric package. Throws ConeViolation (with node index) if
/// sigma_k <= 0 anywhere; 0 <= k <= n-1.
GeometryState geometry(const RadialProfile& profile, int k, PoleRule poles = PoleRule::umbilic);

/// Curvatures at one node from rho, rho_theta, rho_thetatheta and the angular
/// term cot(theta) rho_theta (or its pole limit).
struct NodeCurvature {
  double lambda1;
  double lambdaAng;
};
NodeCurvature node_curvature(double rho, double rhoT, double rhoTT, double cotRhoT);

/// cot(theta_j) * d.first[j], closed at the poles according to `rule`.
std::vector<double> angular_term(const Derivatives& d, std::span<const double> theta,
                                 PoleRule rule);

/// int_M nodal dmu_g over the axisymmetric hypersurface.
double integrate(const GeometryState& state, std::span<const double> nodal);

/// int_0^r sin^n(t) dt: the closed-form reduction recursion for r >= 1, 32-point
/// Gauss-Legendre below, where the recursion cancels.
double sin_power_integral(int n, double r);

/// Vol(Omega) = int_{S^n} int_0^{rho(z)} sin^n(t) dt dz.
double volume(const RadialProfile& profile);

/// |(m+1) int u s_{m+1} - (n-m) int phi' s_m| / max(|lhs|, |rhs|), 0 <= m <= n-1.
double minkowski_residual(const GeometryState& state, int m);

/// Residuals of u F^{ij} rho_{;ij} = -u w F + (phi'/phi) u F^{ij} g_ij
///   - (phi'/phi) u F^{ij} rho_i rho_j
/// with the Hessian taken in the induced metric, for the two candidate
/// factors w = phi/omegaTilde and w = omegaTilde/phi. Max-norm over interior
/// nodes, relative to the largest term.
struct OmegaCandidates {
  double residualPhiOverOmega = 0.0;  // w = phi / sqrt(phi^2 + |grad rho|^2)
  double residualOmegaOverPhi = 0.0;  // w = sqrt(phi^2 + |grad rho|^2) / phi
};
OmegaCandidates omega_disambiguation(const GeometryState& state);

/// Hessian of a nodal function w(theta) in the induced metric g, expressed in
/// the g-orthonormal principal frame: (meridian, angular) components.
struct InducedHessian {
  std::vector<double> meridian;
  std::vector<double> angular;
  std::vector<double> gradMeridian;  // g-orthonormal meridian component of grad w
};
InducedHessian induced_hessian(const GeometryState& state, std::span<const double> w);

}  // namespace curvflow::hypersurface
