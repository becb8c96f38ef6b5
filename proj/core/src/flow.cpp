#include "curvflow/flow.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "curvflow/errors.hpp"
#include "curvflow/symfunc.hpp"

namespace curvflow::flow {

using hypersurface::GeometryState;
using quermass::QuermassVector;
using std::numbers::pi;

InitialShape InitialShape::geodesic_sphere(double r) {
  InitialShape s;
  s.kind = Kind::geodesicSphere;
  s.r = r;
  s.eps = 0.0;
  s.mode = 0;
  return s;
}

InitialShape InitialShape::perturbed_mode(double r0, double eps, int mode) {
  InitialShape s;
  s.kind = Kind::perturbed;
  s.r = r0;
  s.eps = eps;
  s.mode = mode;
  return s;
}

InitialShape InitialShape::random_modes(double r0, double eps, int modes) {
  InitialShape s = perturbed_mode(r0, eps, modes);
  s.kind = Kind::random;
  return s;
}

InitialShape InitialShape::custom_samples(std::vector<double> rho) {
  InitialShape s;
  s.kind = Kind::custom;
  s.samples = std::move(rho);
  return s;
}

namespace {

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("shape: not a number: '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("shape: trailing characters in '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int as_mode(double v) {
  if (v != std::floor(v) || v < 0 || v > 1e6) throw std::invalid_argument("shape: mode must be a non-negative integer");
  return static_cast<int>(v);
}

}  // namespace

InitialShape InitialShape::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("shape: expected KIND:ARGS, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const auto args = parse_numbers(text.substr(colon + 1));
  if (kind == "sphere") {
    if (args.size() != 1) throw std::invalid_argument("shape: sphere takes one radius");
    return geodesic_sphere(args[0]);
  }
  if (kind == "perturbed") {
    if (args.size() != 3) throw std::invalid_argument("shape: perturbed takes r0,eps,mode");
    return perturbed_mode(args[0], args[1], as_mode(args[2]));
  }
  if (kind == "random") {
    if (args.size() != 3) throw std::invalid_argument("shape: random takes r0,eps,modes");
    return random_modes(args[0], args[1], as_mode(args[2]));
  }
  throw std::invalid_argument("shape: unknown kind '" + kind + "'");
}

std::string InitialShape::describe() const {
  std::ostringstream os;
  auto num = [](double x) {
    char buf[40];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
  };
  switch (kind) {
    case Kind::geodesicSphere: os << "sphere:" << num(r); break;
    case Kind::perturbed: os << "perturbed:" << num(r) << ',' << num(eps) << ',' << mode; break;
    case Kind::random: os << "random:" << num(r) << ',' << num(eps) << ',' << mode; break;
    case Kind::custom: os << "custom:" << samples.size(); break;
  }
  return os.str();
}

void FlowConfig::validate() const {
  if (n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (k < 0 || k > n - 1) throw std::invalid_argument("config: k must lie in [0, n-1]");
  if (N < 5) throw std::invalid_argument("config: N must be >= 5");
  if (!(dtPolicy.cflFactor > 0.0 && dtPolicy.cflFactor <= 1.0))
    throw std::invalid_argument("config: cflFactor must lie in (0, 1]");
  if (!(dtPolicy.dtMax > 0.0)) throw std::invalid_argument("config: dtMax must be positive");
  if (!(tMax >= 0.0)) throw std::invalid_argument("config: tMax must be non-negative");
  if (!(convergenceTol > 0.0)) throw std::invalid_argument("config: convergenceTol must be positive");
  if (!(sampleInterval > 0.0)) throw std::invalid_argument("config: sampleInterval must be positive");
  if (!(checkpointEvery >= 0.0)) throw std::invalid_argument("config: checkpointEvery must be >= 0");
  const auto& m = monitorTolerances;
  if (!(m.conservation > 0 && m.signSlack >= 0 && m.barrierSlack >= 0 && m.fKappa >= 1.0 &&
        m.blowupThreshold > 0))
    throw std::invalid_argument("config: invalid monitor tolerances");
  if (initialShape.kind == InitialShape::Kind::custom && initialShape.samples.size() != N)
    throw std::invalid_argument("config: custom shape needs exactly N samples");
}

RadialProfile initial_profile(const FlowConfig& config) {
  const auto& s = config.initialShape;
  auto build = [&]() -> RadialProfile {
    switch (s.kind) {
      case InitialShape::Kind::geodesicSphere:
        return RadialProfile::constant(config.n, config.N, s.r);
      case InitialShape::Kind::perturbed:
        return RadialProfile::perturbed(config.n, config.N, s.r, s.eps, s.mode);
      case InitialShape::Kind::random: {
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> a(static_cast<std::size_t>(s.mode) + 1, 0.0);
        double norm = 0.0;
        for (int m = 1; m <= s.mode; ++m) {
          a[m] = U(rng) / (m * m);
          norm += std::abs(a[m]);
        }
        const double scale = norm > 0.0 ? s.eps / norm : 0.0;
        return RadialProfile::sample(config.n, config.N, [&](double t) {
          double v = s.r;
          for (int m = 1; m <= s.mode; ++m) v += scale * a[m] * std::cos(m * t);
          return v;
        });
      }
      case InitialShape::Kind::custom:
        return RadialProfile(config.n, polar_nodes(config.N), s.samples);
    }
    throw std::logic_error("initial_profile: unknown shape");
  };
  RadialProfile p = [&] {
    try {
      return build();
    } catch (const InvalidProfile& e) {
      throw std::invalid_argument(std::string("initial shape: ") + e.what());
    }
  }();
  GeometryState g;
  try {
    g = hypersurface::geometry(p, config.k);
  } catch (const ConeViolation& e) {
    throw std::invalid_argument(std::string("initial shape outside the cone: ") + e.what());
  }
  if (!(g.min_lambda() > 0.0))
    throw std::invalid_argument("initial shape is not strictly convex (min lambda = " +
                                std::to_string(g.min_lambda()) + ")");
  return p;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::timeLimit: return "time-limit";
    case Termination::coneExit: return "cone-exit";
    case Termination::blowup: return "curvature-blowup";
    case Termination::convexityLost: return "convexity-lost";
    case Termination::stepUnderflow: return "step-underflow";
  }
  return "unknown";
}

std::size_t FlowTrace::total_violations() const {
  std::size_t total = 0;
  for (const auto& [code, count] : violationCounts) total += count;
  return total;
}

std::vector<double> speed(const GeometryState& s, int k) {
  if (k != s.k) throw std::invalid_argument("speed: state was built for a different k");
  const double c = symfunc::c_nk(s.n, k);
  std::vector<double> f(s.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = c * s.phiPrime[j] - s.u[j] * s.F[j];
  return f;
}

std::vector<double> rho_rate(const RadialProfile& profile, int k, hypersurface::PoleRule poles) {
  const auto s = hypersurface::geometry(profile, k, poles);
  auto f = speed(s, k);
  for (std::size_t j = 0; j < f.size(); ++j) f[j] *= s.omegaSpeed[j];
  return f;
}

RadialProfile step(const RadialProfile& profile, double dt, int k, hypersurface::PoleRule poles) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const std::size_t N = profile.size();
  const auto rho0 = profile.rho();
  auto rate = [&](const std::vector<double>& rho) {
    try {
      return rho_rate(profile.with_rho(rho), k, poles);
    } catch (const ConeViolation& e) {
      throw StepRejected(e.what(), true);
    } catch (const InvalidProfile& e) {
      throw StepRejected(e.what(), false);
    }
  };
  auto shifted = [&](const std::vector<double>& r, double a) {
    std::vector<double> out(N);
    for (std::size_t j = 0; j < N; ++j) out[j] = rho0[j] + a * r[j];
    return out;
  };
  const std::vector<double> y0(rho0.begin(), rho0.end());
  const auto k1 = rate(y0);
  const auto k2 = rate(shifted(k1, 0.5 * dt));
  const auto k3 = rate(shifted(k2, 0.5 * dt));
  const auto k4 = rate(shifted(k3, dt));
  std::vector<double> y(N);
  for (std::size_t j = 0; j < N; ++j)
    y[j] = rho0[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  try {
    return profile.with_rho(std::move(y));
  } catch (const InvalidProfile& e) {
    throw StepRejected(e.what(), false);
  }
}

double stable_dt(const GeometryState& s, const DtPolicy& policy) {
  double D = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j)
    D = std::max(D, s.u[j] * s.traceGrad[j] / (s.omegaTilde[j] * s.omegaTilde[j]));
  const double dt = D > 0.0 ? policy.cflFactor * s.h * s.h / D : policy.dtMax;
  return std::min(dt, policy.dtMax);
}

MonitorBaseline baseline(const GeometryState& s0, const QuermassVector& q0) {
  MonitorBaseline b;
  b.k = s0.k;
  b.minRho = *std::min_element(s0.rho.begin(), s0.rho.end());
  b.maxRho = *std::max_element(s0.rho.begin(), s0.rho.end());
  b.minU = *std::min_element(s0.u.begin(), s0.u.end());
  b.minF = *std::min_element(s0.F.begin(), s0.F.end());
  b.maxF = *std::max_element(s0.F.begin(), s0.F.end());
  b.conserved = q0[s0.k - 1];
  b.minLambda = s0.min_lambda();
  return b;
}

FlowRecord monitor(const GeometryState& s, const QuermassVector& q, const MonitorBaseline& base,
                   const QuermassVector* previous, const MonitorTolerances& tol) {
  FlowRecord r;
  r.A = q;
  r.minU = *std::min_element(s.u.begin(), s.u.end());
  r.minRho = *std::min_element(s.rho.begin(), s.rho.end());
  r.maxRho = *std::max_element(s.rho.begin(), s.rho.end());
  r.minF = *std::min_element(s.F.begin(), s.F.end());
  r.maxF = *std::max_element(s.F.begin(), s.F.end());
  r.minLambda = s.min_lambda();
  r.maxLambda = s.max_lambda();
  const auto f = speed(s, base.k);
  for (double v : f) r.maxSpeed = std::max(r.maxSpeed, std::abs(v));

  check_record(r, s.n, base, previous, tol);
  return r;
}

void check_record(FlowRecord& r, int n, const MonitorBaseline& base, const QuermassVector* previous,
                  const MonitorTolerances& tol) {
  const int k = base.k;
  const auto& q = r.A;
  if (std::abs(q[k - 1] - base.conserved) > tol.conservation * std::abs(base.conserved))
    r.violations.push_back("CONSERVATION");
  if (previous) {
    for (int l = -1; l <= n - 1; ++l) {
      if (l == k - 1) continue;
      const double d = q[l] - (*previous)[l];
      const double expected = l < k - 1 ? 1.0 : -1.0;
      if (expected * d < -tol.signSlack * std::abs(q[l]))
        r.violations.push_back("SIGN_A" + std::to_string(l));
    }
  }
  if (r.minRho < base.minRho - tol.barrierSlack) r.violations.push_back("RHO_MIN");
  if (r.maxRho > base.maxRho + tol.barrierSlack) r.violations.push_back("RHO_MAX");
  if (r.minU < base.minU - tol.barrierSlack) r.violations.push_back("U_MIN");
  if (r.minF < base.minF / tol.fKappa) r.violations.push_back("F_LOW");
  if (r.maxF > base.maxF * tol.fKappa) r.violations.push_back("F_HIGH");
  if (!(r.minLambda > 0.0)) r.violations.push_back("CONVEXITY");
}

RunResult run(const FlowConfig& config, const CheckpointSink& checkpoint) {
  config.validate();
  const int k = config.k;
  const auto& tol = config.monitorTolerances;

  RadialProfile profile = initial_profile(config);
  GeometryState state = hypersurface::geometry(profile, k);
  QuermassVector q = quermass::quermass_vector(state, profile);
  const MonitorBaseline base = baseline(state, q);

  FlowTrace trace;
  trace.initialMinLambda = base.minLambda;
  trace.minLambdaSeen = base.minLambda;

  std::set<std::string> pending;
  auto note = [&](const FlowRecord& r) {
    for (const auto& v : r.violations) {
      ++trace.violationCounts[v];
      pending.insert(v);
    }
  };
  auto push = [&](FlowRecord r, double t) {
    r.t = t;
    r.violations.assign(pending.begin(), pending.end());
    pending.clear();
    trace.records.push_back(std::move(r));
  };

  FlowRecord current = monitor(state, q, base, nullptr, tol);
  note(current);
  push(current, 0.0);

  double t = 0.0;
  double dtScale = 1.0;
  int sinceGrowth = 0;
  bool lastRejectWasCone = false;
  double nextSample = config.sampleInterval;
  double nextCheckpoint = config.checkpointEvery > 0.0 ? config.checkpointEvery
                                                       : std::numeric_limits<double>::infinity();
  bool done = false;

  if (current.maxSpeed < config.convergenceTol) {
    trace.reason = Termination::converged;
    done = true;
  }

  while (!done) {
    if (t >= config.tMax) {
      trace.reason = Termination::timeLimit;
      break;
    }
    const double target = std::min(nextSample, config.tMax);
    double dt = std::min(stable_dt(state, config.dtPolicy) * dtScale, config.dtPolicy.dtMax);
    bool atTarget = false;
    if (t + dt >= target) {
      dt = target - t;
      atTarget = true;
    }

    RadialProfile next = profile;
    GeometryState nextState;
    try {
      next = step(profile, dt, k);
      nextState = hypersurface::geometry(next, k);
    } catch (const StepRejected& e) {
      lastRejectWasCone = e.cone_exit();
      next = profile;
    } catch (const ConeViolation&) {
      lastRejectWasCone = true;
      next = profile;
    }
    if (nextState.size() == 0) {
      ++trace.rejectedSteps;
      dtScale *= 0.5;
      sinceGrowth = 0;
      if (dtScale < 1e-10) {
        trace.reason = lastRejectWasCone ? Termination::coneExit : Termination::stepUnderflow;
        trace.detail = "time step underflow after repeated rejections";
        break;
      }
      continue;
    }

    ++trace.acceptedSteps;
    const QuermassVector qNext = quermass::quermass_vector(nextState, next);
    FlowRecord rec = monitor(nextState, qNext, base, &q, tol);
    note(rec);

    const double scale = std::abs(base.conserved);
    trace.maxConservationDrift =
        std::max(trace.maxConservationDrift, std::abs(qNext[k - 1] - base.conserved) / scale);
    trace.maxConservationRate =
        std::max(trace.maxConservationRate, std::abs(qNext[k - 1] - q[k - 1]) / dt / scale);
    for (int l = -1; l <= config.n - 1; ++l) {
      if (l == k - 1) continue;
      const double d = qNext[l] - q[l];
      const double expected = l < k - 1 ? 1.0 : -1.0;
      if (expected * d < 0.0)
        trace.worstSignExcess = std::max(trace.worstSignExcess, std::abs(d) / std::abs(qNext[l]));
    }
    trace.minLambdaSeen = std::min(trace.minLambdaSeen, rec.minLambda);

    t = atTarget ? target : t + dt;
    profile = std::move(next);
    state = std::move(nextState);
    q = qNext;
    current = rec;

    if (++sinceGrowth >= 20) {
      dtScale = std::min(1.0, dtScale * 1.2);
      sinceGrowth = 0;
    }

    if (std::find(rec.violations.begin(), rec.violations.end(), "CONVEXITY") != rec.violations.end()) {
      trace.reason = Termination::convexityLost;
      trace.detail = "lambda_min <= 0";
      break;
    }
    if (state.max_abs_lambda() > tol.blowupThreshold) {
      trace.reason = Termination::blowup;
      trace.detail = "max |lambda| above blow-up threshold";
      break;
    }
    if (rec.maxSpeed < config.convergenceTol) {
      trace.reason = Termination::converged;
      break;
    }
    if (atTarget && target == nextSample) {
      push(rec, t);
      nextSample += config.sampleInterval;
    }
    if (checkpoint && t >= nextCheckpoint) {
      checkpoint(profile, t);
      nextCheckpoint += config.checkpointEvery;
    }
  }

  if (trace.records.back().t < t || !pending.empty()) {
    if (trace.records.back().t < t)
      push(current, t);
    else
      for (const auto& v : pending) trace.records.back().violations.push_back(v);
  }
  trace.finalTime = t;
  return RunResult{std::move(trace), std::move(profile)};
}

EvolutionResiduals evolution_residuals(const RadialProfile& prev, const RadialProfile& next,
                                       double dt, int k) {
  if (prev.size() != next.size() || prev.n() != next.n())
    throw std::invalid_argument("evolution_residuals: profiles on different grids");
  if (!(dt > 0.0)) throw std::invalid_argument("evolution_residuals: dt must be positive");
  const std::size_t N = prev.size();
  std::vector<double> avg(N);
  for (std::size_t j = 0; j < N; ++j) avg[j] = 0.5 * (prev.rho()[j] + next.rho()[j]);
  const auto rule = hypersurface::PoleRule::operatorLimit;
  const auto sp = hypersurface::geometry(prev, k, rule);
  const auto sn = hypersurface::geometry(next, k, rule);
  const auto s = hypersurface::geometry(prev.with_rho(avg), k, rule);

  const int n = s.n;
  const double c = symfunc::c_nk(n, k);
  const auto f = speed(s, k);
  const auto Hu = hypersurface::induced_hessian(s, s.u);
  const auto HF = hypersurface::induced_hessian(s, s.F);
  const auto du = differentiate_even(s.u, s.h).first;
  const auto dF = differentiate_even(s.F, s.h).first;

  EvolutionResiduals r;
  for (std::size_t j = 0; j < N; ++j) {
    const double A = s.omegaTilde[j] * s.omegaTilde[j];
    const double rt = s.gradRho[j];
    const double phi = s.phi[j];
    const double dphi = s.phiPrime[j];
    const double u = s.u[j];
    const double F = s.F[j];
    // time derivative along the normal flow = at fixed theta minus the
    // tangential drift of the graph parametrisation
    const double drift = f[j] * s.omegaSpeed[j] * rt / A;
    const double ut = (sn.u[j] - sp.u[j]) / dt - drift * du[j];
    const double Ft = (sn.F[j] - sp.F[j]) / dt - drift * dF[j];

    const double gradPhiGradDphi = -phi * phi * rt * rt / A;
    const double gradPhiGradU = phi * rt * du[j] / A;
    const double gradPhiGradF = phi * rt * dF[j] / A;

    const double lhsU = ut - u * (s.grad1[j] * Hu.meridian[j] + (n - 1) * s.gradAng[j] * Hu.angular[j]);
    const double rhsU = -c * gradPhiGradDphi + F * gradPhiGradU + (c * dphi - 2.0 * u * F) * dphi +
                        u * u * s.weightedTrace[j];
    const double lhsF = Ft - u * (s.grad1[j] * HF.meridian[j] + (n - 1) * s.gradAng[j] * HF.angular[j]);
    const double rhsF = 2.0 * s.grad1[j] * du[j] * dF[j] / A + F * gradPhiGradF -
                        (c * s.weightedTrace[j] - F * F) * dphi + u * F * (s.traceGrad[j] - c);
    r.u = std::max(r.u, std::abs(lhsU - rhsU));
    r.F = std::max(r.F, std::abs(lhsF - rhsF));
  }
  return r;
}

double functional_derivative_residual(const RadialProfile& prev, const RadialProfile& next,
                                      double dt, int k) {
  if (prev.size() != next.size() || prev.n() != next.n())
    throw std::invalid_argument("functional_derivative_residual: profiles on different grids");
  const std::size_t N = prev.size();
  std::vector<double> avg(N);
  for (std::size_t j = 0; j < N; ++j) avg[j] = 0.5 * (prev.rho()[j] + next.rho()[j]);
  const auto qp = quermass::quermass_vector(hypersurface::geometry(prev, k), prev);
  const auto qn = quermass::quermass_vector(hypersurface::geometry(next, k), next);
  const auto s = hypersurface::geometry(prev.with_rho(avg), k);
  const auto f = speed(s, k);
  const int n = s.n;

  double worst = 0.0;
  std::vector<double> integrand(N);
  for (int l = -1; l <= n - 1; ++l) {
    for (std::size_t j = 0; j < N; ++j)
      integrand[j] = (l < 0 ? 1.0 : (l + 1) * s.sigma(j, l + 1)) * f[j];
    const double predicted = hypersurface::integrate(s, integrand);
    const double measured = (qn[l] - qp[l]) / dt;
    worst = std::max(worst, std::abs(measured - predicted));
  }
  return worst;
}

}  // namespace curvflow::flow
