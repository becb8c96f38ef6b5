#pragma once

// Explicit time integration of the constrained flow
//   d_t X = (c_{n,k} phi'(rho) - u F) nu,   F = sigma_{k+1} / sigma_k,
// on axisymmetric radial graphs, with per-step monitoring of the quermass
// monotonicity table and the a priori bounds, and residual checks of the
// evolution equations for u and F.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvflow/hypersurface.hpp"
#include "curvflow/profile.hpp"
#include "curvflow/quermass.hpp"

namespace curvflow::flow {

struct DtPolicy {
  double cflFactor = 0.8;
  double dtMax = 1e-2;
};

struct InitialShape {
  enum class Kind { geodesicSphere, perturbed, random, custom };

  Kind kind = Kind::perturbed;
  double r = 0.8;    // sphere radius, or base radius r0
  double eps = 0.05;  // amplitude
  int mode = 2;      // cos(mode * theta), or number of random modes
  std::vector<double> samples;  // custom: rho at the N polar nodes

  static InitialShape geodesic_sphere(double r);
  static InitialShape perturbed_mode(double r0, double eps, int mode);
  /// r0 + eps * sum_{m=1..modes} a_m cos(m theta) / m^2 with a_m uniform in
  /// [-1, 1] drawn from the run seed; scaled so sum |a_m| / m^2 = eps, which
  /// bounds |rho - r0| by eps.
  static InitialShape random_modes(double r0, double eps, int modes);
  static InitialShape custom_samples(std::vector<double> rho);

  /// "sphere:R", "perturbed:R0,EPS,M", "random:R0,EPS,MODES".
  static InitialShape parse(const std::string& text);
  std::string describe() const;
};

struct MonitorTolerances {
  double conservation = 1e-4;  // |A_{k-1}(t) - A_{k-1}(0)| / |A_{k-1}(0)|
  double signSlack = 1e-8;     // per step, relative to |A_l|
  double barrierSlack = 1e-8;  // rho, u bounds (absolute)
  double fKappa = 2.0;         // F kept inside [minF0 / kappa, maxF0 * kappa]
  double blowupThreshold = 1e3;  // max |lambda|
};

struct FlowConfig {
  int n = 2;
  int k = 1;
  std::size_t N = 256;
  DtPolicy dtPolicy;
  double tMax = 20.0;
  double convergenceTol = 1e-7;  // on max |f|
  MonitorTolerances monitorTolerances;
  InitialShape initialShape;
  double sampleInterval = 0.05;
  double checkpointEvery = 0.0;  // 0: final checkpoint only
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on an out-of-range field.
  void validate() const;
};

/// Initial profile for a config; rejects shapes that are not strictly convex
/// with lambda in Gamma_{k+1} at every node (std::invalid_argument).
RadialProfile initial_profile(const FlowConfig& config);

enum class Termination { converged, timeLimit, coneExit, blowup, convexityLost, stepUnderflow };
std::string to_string(Termination t);

struct FlowRecord {
  double t = 0.0;
  quermass::QuermassVector A;
  double minU = 0.0;
  double minRho = 0.0;
  double maxRho = 0.0;
  double minF = 0.0;
  double maxF = 0.0;
  double minLambda = 0.0;
  double maxLambda = 0.0;
  double maxSpeed = 0.0;  // max |f|
  std::vector<std::string> violations;
};

struct FlowTrace {
  std::vector<FlowRecord> records;
  Termination reason = Termination::timeLimit;
  std::string detail;
  double finalTime = 0.0;
  std::size_t acceptedSteps = 0;
  std::size_t rejectedSteps = 0;
  std::map<std::string, std::size_t> violationCounts;
  double maxConservationDrift = 0.0;  // relative, over the whole run
  double maxConservationRate = 0.0;   // max |dA_{k-1}/dt| / |A_{k-1}(0)| per step
  double worstSignExcess = 0.0;       // largest wrong-sign |dA_l| / |A_l| seen in one step
  double initialMinLambda = 0.0;
  double minLambdaSeen = 0.0;

  std::size_t total_violations() const;
};

/// Values the monitors compare against, taken from the initial state.
struct MonitorBaseline {
  int k = 0;
  double minRho = 0.0;
  double maxRho = 0.0;
  double minU = 0.0;
  double minF = 0.0;
  double maxF = 0.0;
  double conserved = 0.0;  // A_{k-1}(0)
  double minLambda = 0.0;
};

MonitorBaseline baseline(const hypersurface::GeometryState& s0, const quermass::QuermassVector& q0);

/// One monitor record. `previous` (may be null) is the quermass vector one
/// accepted step earlier and drives the sign checks of dA_l/dt.
/// Codes: CONSERVATION, SIGN_A<l>, RHO_MIN, RHO_MAX, U_MIN, F_LOW, F_HIGH, CONVEXITY.
FlowRecord monitor(const hypersurface::GeometryState& state, const quermass::QuermassVector& q,
                   const MonitorBaseline& base, const quermass::QuermassVector* previous,
                   const MonitorTolerances& tol);

/// The checks (a)-(f) on a record whose fields are already filled; appends
/// violation codes. Shared by the primal and dual solvers.
void check_record(FlowRecord& record, int n, const MonitorBaseline& base,
                  const quermass::QuermassVector* previous, const MonitorTolerances& tol);

/// f_j = c_{n,k} phi'_j - u_j F_j.
std::vector<double> speed(const hypersurface::GeometryState& state, int k);

/// d_t rho at fixed theta: f * omegaSpeed.
std::vector<double> rho_rate(const RadialProfile& profile, int k,
                             hypersurface::PoleRule poles = hypersurface::PoleRule::umbilic);

class StepRejected : public std::runtime_error {
 public:
  StepRejected(const std::string& what, bool coneExit)
      : std::runtime_error(what), coneExit_(coneExit) {}

  /// true: sigma_k <= 0 somewhere; false: rho left (0, pi/2).
  bool cone_exit() const { return coneExit_; }

 private:
  bool coneExit_;
};

/// One classical RK4 step. Throws StepRejected if any stage leaves the cone
/// or pushes rho out of (0, pi/2). The residual studies step with
/// PoleRule::operatorLimit so that F stays smooth through the poles.
RadialProfile step(const RadialProfile& profile, double dt, int k,
                   hypersurface::PoleRule poles = hypersurface::PoleRule::umbilic);

/// Explicit stability heuristic cflFactor * h^2 / max_j(u_j traceGrad_j / wt_j^2),
/// where u traceGrad / wt^2 is the diffusion coefficient of the rho equation.
double stable_dt(const hypersurface::GeometryState& state, const DtPolicy& policy);

struct RunResult {
  FlowTrace trace;
  RadialProfile finalProfile;
};

/// Optional callback for intermediate checkpoints (profile, t).
using CheckpointSink = std::function<void(const RadialProfile&, double)>;

RunResult run(const FlowConfig& config, const CheckpointSink& checkpoint = {});

/// Max-norm residuals of the evolution equations for u and F between two
/// states dt apart: central time difference, spatial terms at the averaged
/// radii, all derivatives along the normal flow. Geometry uses
/// PoleRule::operatorLimit, so `next` should come from a step with that rule.
struct EvolutionResiduals {
  double u = 0.0;
  double F = 0.0;
};
EvolutionResiduals evolution_residuals(const RadialProfile& prev, const RadialProfile& next,
                                       double dt, int k);

/// max_l |(A_l(next) - A_l(prev)) / dt - dA_l/dt| for l = -1..n-1, with
/// dA_l/dt = (l+1) int sigma_{l+1} f and dVol/dt = int f at the midpoint.
double functional_derivative_residual(const RadialProfile& prev, const RadialProfile& next,
                                      double dt, int k);

}  // namespace curvflow::flow
