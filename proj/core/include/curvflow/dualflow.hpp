#pragma once

// Euclidean reformulation of the flow. With gamma = log tan(rho/2) the radial
// graph rho over S^n becomes the Euclidean radial graph rhoTilde = e^gamma,
// whose Weingarten map relates to the spherical one by
//   h^i_j = (rhoTilde/phi) hTilde^i_j + (phi' - 1)/(phi w) delta^i_j,
//   w = sqrt(1 + |grad gamma|^2).
// The convex body it bounds is described by its Euclidean support function
// uTilde(psi) over the unit normal sphere; W = Hess uTilde + uTilde Id is the
// inverse of hTilde, and the flow becomes d_t uTilde = G(W, uTilde, grad uTilde).
//
// Everything here is axisymmetric: functions of one polar angle, sampled on a
// uniform grid with both poles, one distinguished and n-1 repeated eigenvalues.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/hypersurface.hpp"
#include "curvflow/profile.hpp"
#include "curvflow/quermass.hpp"

namespace curvflow::dual {

struct GammaTransform {
  std::vector<double> gamma;
  std::vector<double> rhoTilde;
};

/// gamma = log tan(rho/2), rhoTilde = tan(rho/2). Throws std::domain_error
/// unless 0 < rho < pi/2.
double gamma_of(double rho);
/// 2 atan(rhoTilde), the inverse of rho -> tan(rho/2).
double rho_of(double rhoTilde);
GammaTransform gamma_transform(const RadialProfile& profile);

/// Principal curvatures of the Euclidean graph rhoTilde = e^gamma, built from
/// the same discrete derivatives of rho as the spherical geometry.
struct EuclideanGraph {
  std::vector<double> gamma;
  std::vector<double> rhoTilde;
  std::vector<double> omega;  // sqrt(1 + gamma_theta^2)
  std::vector<double> hTilde1;
  std::vector<double> hTildeAng;
};
EuclideanGraph euclidean_graph(const RadialProfile& profile);

/// max_j |h - (rhoTilde/phi) hTilde - (phi'-1)/(phi w)| over both eigenvalues.
double decomposition_residual(const RadialProfile& profile);

/// Smallest eigenvalue of hTilde over the grid.
double min_eig_h_tilde(const RadialProfile& profile);

/// Closure quantities of one support-function sample.
struct ClosurePoint {
  double rhoTilde = 0.0;  // sqrt(uTilde^2 + uTilde_psi^2)
  double omega = 0.0;     // rhoTilde / uTilde
  double rho = 0.0;       // 2 atan(rhoTilde)
  double phi = 0.0;       // 2 rhoTilde / (1 + rhoTilde^2)
  double phiPrime = 0.0;  // (1 - rhoTilde^2) / (1 + rhoTilde^2)
};
ClosurePoint closure_point(double uTilde, double uTildePsi);

struct DualState {
  int n = 0;
  double h = 0.0;  // psi spacing

  std::vector<double> psi;
  std::vector<double> uTilde;
  std::vector<double> uTildePsi;
  std::vector<double> rhoTilde;
  std::vector<double> gamma;
  std::vector<double> omegaDual;
  std::vector<double> rho;
  std::vector<double> phi;
  std::vector<double> phiPrime;
  std::vector<double> W1;    // uTilde_psipsi + uTilde
  std::vector<double> WAng;  // uTilde + cot(psi) uTilde_psi, x (n-1)
  std::vector<double> hTilde1;
  std::vector<double> hTildeAng;
  std::vector<double> theta;     // polar angle of the point with normal psi
  std::vector<double> thetaPsi;  // d theta / d psi = uTilde W1 / rhoTilde^2

  std::size_t size() const { return uTilde.size(); }
  double min_eig_W() const;
  double max_eig_W() const;
};

/// uTilde sampled on the uniform polar grid in psi; derivatives by the same
/// centered differences as the primal solver. Throws InvalidProfile if
/// uTilde <= 0 somewhere and ConvexityLoss if W is not positive definite.
DualState support_closure(int n, std::span<const double> uTilde);

/// The primal profile seen from the normal side, evaluated at the primal
/// nodes from the shared discrete derivatives (no interpolation).
struct PointwiseImport {
  std::vector<double> psi;
  std::vector<double> uTilde;
  std::vector<double> uTildePsi;
  std::vector<double> W1;
  std::vector<double> WAng;
};
PointwiseImport import_pointwise(const RadialProfile& profile);

/// Support function on a uniform psi grid of Npsi nodes. The profile is
/// interpolated by its cosine series and psi(theta) = theta - atan(gamma_theta)
/// is inverted by bisection.
std::vector<double> import_support(const RadialProfile& profile, std::size_t Npsi);

/// Radial profile on a uniform theta grid of Ntheta nodes from a dual state
/// (cosine series of uTilde, bisection on theta(psi)).
RadialProfile export_profile(const DualState& state, std::size_t Ntheta);

/// Closure round trip. Pointwise: import at the primal nodes, close, compare
/// rhoTilde, omega, rho, phi, phi' with the primal values. Grid: import onto
/// the psi grid, differentiate uTilde spectrally, close, and compare with the
/// primal cosine series at theta(psi_j). Max absolute error over all five.
double closure_roundtrip_error(const RadialProfile& profile);
double closure_roundtrip_error_grid(const RadialProfile& profile, std::size_t Npsi);

/// G = c (phi'/phi) uTilde w - (rhoTilde uTilde / phi) F(hTilde + (phi'-1)/(rhoTilde w) Id).
/// Throws ConeViolation (with node) when the shifted eigenvalues leave Gamma_k.
std::vector<double> g_operator(const DualState& state, int k);

/// Spherical quantities recovered at the dual nodes.
struct PrimalView {
  std::vector<double> lambda1;
  std::vector<double> lambdaAng;
  std::vector<double> u;  // phi / w
  std::vector<double> F;
  std::vector<double> f;  // G phi / (uTilde w)
};
PrimalView primal_view(const DualState& state, int k);

/// Quermass vector of the spherical hypersurface, integrated over the psi
/// grid with the Jacobian of theta(psi).
quermass::QuermassVector dual_quermass(const DualState& state, const PrimalView& view);

/// max_j |G_j - (uTilde w / phi)_j f(theta(psi_j))| with f the primal speed
/// interpolated by its cosine series. O(h^2) for smooth convex data.
double speed_transport_residual(const RadialProfile& profile, int k, std::size_t Npsi);

/// Explicit-step bound for the uTilde equation, the dual analogue of
/// flow::stable_dt: cfl h^2 / max_j (rhoTilde uTilde/phi) sum_i F^{ii} hTilde_i^2.
double stable_dt(const DualState& state, int k, const flow::DtPolicy& policy);

/// RK4 step of d_t uTilde = G. Throws flow::StepRejected on convexity loss,
/// cone exit or a non-positive support function in any stage.
std::vector<double> step(int n, std::span<const double> uTilde, double dt, int k);

struct DualRecord {
  flow::FlowRecord base;
  double minEigW = 0.0;
  double maxEigW = 0.0;
};

struct DualTrace {
  std::vector<DualRecord> records;
  flow::Termination reason = flow::Termination::timeLimit;
  std::string detail;
  double finalTime = 0.0;
  std::size_t acceptedSteps = 0;
  std::size_t rejectedSteps = 0;
  std::optional<double> breakdownTime;
  double minWMargin = 0.0;  // smallest eigenvalue of W seen over the run
  std::map<std::string, std::size_t> violationCounts;
};

struct DualRunResult {
  DualTrace trace;
  DualState finalState;
};

/// Same config, initial shape and sampling as flow::run; the initial support
/// function is imported from the primal initial profile.
DualRunResult dual_run(const flow::FlowConfig& config);

struct TraceComparison {
  std::size_t compared = 0;     // records at common sample times
  double lastCommonTime = 0.0;
  double maxQuermass = 0.0;     // max_l |A_l^dual - A_l^primal| / |A_l^primal|
  double maxRhoBounds = 0.0;    // max |min/max rho differences|
};
TraceComparison compare_traces(const flow::FlowTrace& primal, const DualTrace& dual);

}  // namespace curvflow::dual
