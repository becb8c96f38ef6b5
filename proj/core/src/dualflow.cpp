#include "curvflow/dualflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "curvflow/errors.hpp"
#include "curvflow/symfunc.hpp"

namespace curvflow::dual {

using hypersurface::PoleRule;
using std::numbers::pi;

double gamma_of(double rho) {
  if (!(rho > 0.0 && rho < pi / 2)) throw std::domain_error("gamma_of: rho must lie in (0, pi/2)");
  return std::log(std::tan(0.5 * rho));
}

double rho_of(double rhoTilde) {
  if (!(rhoTilde > 0.0)) throw std::domain_error("rho_of: rhoTilde must be positive");
  return 2.0 * std::atan(rhoTilde);
}

GammaTransform gamma_transform(const RadialProfile& profile) {
  GammaTransform g;
  g.gamma.reserve(profile.size());
  g.rhoTilde.reserve(profile.size());
  for (double r : profile.rho()) {
    g.gamma.push_back(gamma_of(r));
    g.rhoTilde.push_back(std::tan(0.5 * r));
  }
  return g;
}

EuclideanGraph euclidean_graph(const RadialProfile& profile) {
  const auto d = differentiate(profile);
  const auto cotRhoT = hypersurface::angular_term(d, profile.theta(), PoleRule::umbilic);
  const std::size_t N = profile.size();
  EuclideanGraph e;
  for (auto* v : {&e.gamma, &e.rhoTilde, &e.omega, &e.hTilde1, &e.hTildeAng}) v->resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double rho = profile.rho()[j];
    const double phi = std::sin(rho);
    const double dphi = std::cos(rho);
    const double rt = d.first[j];
    // chain rule through d gamma / d rho = 1 / phi
    const double gt = rt / phi;
    const double gtt = d.second[j] / phi - dphi * rt * rt / (phi * phi);
    const double cotGt = cotRhoT[j] / phi;
    const double om = std::sqrt(1.0 + gt * gt);
    const double rT = std::tan(0.5 * rho);
    e.gamma[j] = std::log(rT);
    e.rhoTilde[j] = rT;
    e.omega[j] = om;
    e.hTilde1[j] = (-gtt + gt * gt + 1.0) / (rT * om * om * om);
    e.hTildeAng[j] = (1.0 - cotGt) / (rT * om);
  }
  return e;
}

double decomposition_residual(const RadialProfile& profile) {
  const auto s = hypersurface::geometry(profile, 0);
  const auto e = euclidean_graph(profile);
  double worst = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double scale = e.rhoTilde[j] / s.phi[j];
    const double shift = (s.phiPrime[j] - 1.0) / (s.phi[j] * e.omega[j]);
    worst = std::max(worst, std::abs(s.lambda1[j] - (scale * e.hTilde1[j] + shift)));
    worst = std::max(worst, std::abs(s.lambdaAng[j] - (scale * e.hTildeAng[j] + shift)));
  }
  return worst;
}

double min_eig_h_tilde(const RadialProfile& profile) {
  const auto e = euclidean_graph(profile);
  return std::min(*std::min_element(e.hTilde1.begin(), e.hTilde1.end()),
                  *std::min_element(e.hTildeAng.begin(), e.hTildeAng.end()));
}

ClosurePoint closure_point(double uTilde, double uTildePsi) {
  if (!(uTilde > 0.0)) throw std::domain_error("closure_point: support function must be positive");
  ClosurePoint c;
  c.rhoTilde = std::hypot(uTilde, uTildePsi);
  c.omega = c.rhoTilde / uTilde;
  c.rho = 2.0 * std::atan(c.rhoTilde);
  const double r2 = c.rhoTilde * c.rhoTilde;
  c.phi = 2.0 * c.rhoTilde / (1.0 + r2);
  c.phiPrime = (1.0 - r2) / (1.0 + r2);
  return c;
}

double DualState::min_eig_W() const {
  return std::min(*std::min_element(W1.begin(), W1.end()), *std::min_element(WAng.begin(), WAng.end()));
}

double DualState::max_eig_W() const {
  return std::max(*std::max_element(W1.begin(), W1.end()), *std::max_element(WAng.begin(), WAng.end()));
}

DualState support_closure(int n, std::span<const double> uTilde) {
  if (n < 2) throw InvalidProfile("support_closure: n must be >= 2");
  const std::size_t N = uTilde.size();
  if (N < 5) throw InvalidProfile("support_closure: need at least 5 nodes");
  for (std::size_t j = 0; j < N; ++j)
    if (!(uTilde[j] > 0.0))
      throw InvalidProfile("support_closure: uTilde <= 0 at node " + std::to_string(j));

  DualState s;
  s.n = n;
  s.h = pi / static_cast<double>(N - 1);
  s.psi = polar_nodes(N);
  s.uTilde.assign(uTilde.begin(), uTilde.end());
  const auto d = differentiate_even(uTilde, s.h);
  const auto cotU = hypersurface::angular_term(d, s.psi, PoleRule::umbilic);
  s.uTildePsi = d.first;
  for (auto* v : {&s.rhoTilde, &s.gamma, &s.omegaDual, &s.rho, &s.phi, &s.phiPrime, &s.W1, &s.WAng,
                  &s.hTilde1, &s.hTildeAng, &s.theta, &s.thetaPsi})
    v->resize(N);

  for (std::size_t j = 0; j < N; ++j) {
    const double u = uTilde[j];
    s.W1[j] = d.second[j] + u;
    s.WAng[j] = u + cotU[j];
    if (!(s.W1[j] > 0.0 && s.WAng[j] > 0.0))
      throw ConvexityLoss("support_closure: W not positive definite at node " + std::to_string(j), j);
    const auto c = closure_point(u, d.first[j]);
    s.rhoTilde[j] = c.rhoTilde;
    s.gamma[j] = std::log(c.rhoTilde);
    s.omegaDual[j] = c.omega;
    s.rho[j] = c.rho;
    s.phi[j] = c.phi;
    s.phiPrime[j] = c.phiPrime;
    s.hTilde1[j] = 1.0 / s.W1[j];
    s.hTildeAng[j] = 1.0 / s.WAng[j];
    s.theta[j] = s.psi[j] + std::atan(d.first[j] / u);
    s.thetaPsi[j] = u * s.W1[j] / (c.rhoTilde * c.rhoTilde);
  }
  return s;
}

PointwiseImport import_pointwise(const RadialProfile& profile) {
  const auto e = euclidean_graph(profile);
  const auto d = differentiate(profile);
  const std::size_t N = profile.size();
  PointwiseImport p;
  for (auto* v : {&p.psi, &p.uTilde, &p.uTildePsi, &p.W1, &p.WAng}) v->resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double gt = d.first[j] / std::sin(profile.rho()[j]);
    p.psi[j] = profile.theta()[j] - std::atan(gt);
    p.uTilde[j] = e.rhoTilde[j] / e.omega[j];
    p.uTildePsi[j] = e.rhoTilde[j] * gt / e.omega[j];
    p.W1[j] = 1.0 / e.hTilde1[j];
    p.WAng[j] = 1.0 / e.hTildeAng[j];
  }
  return p;
}

namespace {

// Increasing f on [0, pi] with f(0) = 0, f(pi) = pi: solve f(x) = target.
template <class Fn>
double invert_monotone(const Fn& f, double target) {
  double lo = 0.0, hi = pi;
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> import_support(const RadialProfile& profile, std::size_t Npsi) {
  if (Npsi < 5) throw InvalidProfile("import_support: need at least 5 nodes");
  const CosineSeries S(profile.rho());
  auto psiOf = [&](double t) {
    return t - std::atan(S.derivative(t) / std::sin(S.value(t)));
  };
  const auto psi = polar_nodes(Npsi);
  std::vector<double> u(Npsi);
  for (std::size_t j = 0; j < Npsi; ++j) {
    double t = psi[j];
    if (j != 0 && j + 1 != Npsi) t = invert_monotone(psiOf, psi[j]);
    const double r = S.value(t);
    const double gt = (j == 0 || j + 1 == Npsi) ? 0.0 : S.derivative(t) / std::sin(r);
    u[j] = std::tan(0.5 * r) / std::sqrt(1.0 + gt * gt);
  }
  return u;
}

RadialProfile export_profile(const DualState& state, std::size_t Ntheta) {
  const CosineSeries U(state.uTilde);
  auto thetaOf = [&](double p) { return p + std::atan(U.derivative(p) / U.value(p)); };
  const auto theta = polar_nodes(Ntheta);
  std::vector<double> rho(Ntheta);
  for (std::size_t j = 0; j < Ntheta; ++j) {
    double p = theta[j];
    if (j != 0 && j + 1 != Ntheta) p = invert_monotone(thetaOf, theta[j]);
    rho[j] = 2.0 * std::atan(std::hypot(U.value(p), U.derivative(p)));
  }
  return RadialProfile(state.n, theta, std::move(rho));
}

double closure_roundtrip_error(const RadialProfile& profile) {
  const auto imp = import_pointwise(profile);
  const auto d = differentiate(profile);
  double worst = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const double rho = profile.rho()[j];
    const double gt = d.first[j] / std::sin(rho);
    const auto c = closure_point(imp.uTilde[j], imp.uTildePsi[j]);
    worst = std::max({worst, std::abs(c.rhoTilde - std::tan(0.5 * rho)),
                      std::abs(c.omega - std::sqrt(1.0 + gt * gt)), std::abs(c.rho - rho),
                      std::abs(c.phi - std::sin(rho)), std::abs(c.phiPrime - std::cos(rho))});
  }
  return worst;
}

double closure_roundtrip_error_grid(const RadialProfile& profile, std::size_t Npsi) {
  const auto u = import_support(profile, Npsi);
  const CosineSeries U(u);
  const CosineSeries S(profile.rho());
  const auto psi = polar_nodes(Npsi);
  double worst = 0.0;
  for (std::size_t j = 0; j < Npsi; ++j) {
    const double up = U.derivative(psi[j]);
    const auto c = closure_point(u[j], up);
    const double t = psi[j] + std::atan(up / u[j]);
    const double rho = S.value(t);
    const double gt = S.derivative(t) / std::sin(rho);
    worst = std::max({worst, std::abs(c.rhoTilde - std::tan(0.5 * rho)),
                      std::abs(c.omega - std::sqrt(1.0 + gt * gt)), std::abs(c.rho - rho),
                      std::abs(c.phi - std::sin(rho)), std::abs(c.phiPrime - std::cos(rho))});
  }
  return worst;
}

namespace {

std::vector<double> shifted_eigenvalues(const DualState& s, std::size_t j) {
  const double shift = (s.phiPrime[j] - 1.0) / (s.rhoTilde[j] * s.omegaDual[j]);
  std::vector<double> eig(static_cast<std::size_t>(s.n), s.hTildeAng[j] + shift);
  eig[0] = s.hTilde1[j] + shift;
  return eig;
}

symfunc::QuotientPackage shifted_quotient(const DualState& s, std::size_t j, int k) {
  try {
    return symfunc::quotient(shifted_eigenvalues(s, j), k);
  } catch (const ConeViolation& e) {
    throw ConeViolation(std::string("g_operator: ") + e.what() + " at node " + std::to_string(j), j);
  }
}

}  // namespace

std::vector<double> g_operator(const DualState& s, int k) {
  if (k < 0 || k > s.n - 1) throw std::domain_error("g_operator: k must lie in [0, n-1]");
  const double c = symfunc::c_nk(s.n, k);
  std::vector<double> G(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double F = shifted_quotient(s, j, k).F;
    G[j] = c * s.phiPrime[j] / s.phi[j] * s.uTilde[j] * s.omegaDual[j] -
           s.rhoTilde[j] * s.uTilde[j] / s.phi[j] * F;
  }
  return G;
}

PrimalView primal_view(const DualState& s, int k) {
  const auto G = g_operator(s, k);
  const std::size_t N = s.size();
  PrimalView v;
  for (auto* a : {&v.lambda1, &v.lambdaAng, &v.u, &v.F, &v.f}) a->resize(N);
  std::vector<double> lam(static_cast<std::size_t>(s.n));
  for (std::size_t j = 0; j < N; ++j) {
    const double scale = s.rhoTilde[j] / s.phi[j];
    const double shift = (s.phiPrime[j] - 1.0) / (s.phi[j] * s.omegaDual[j]);
    v.lambda1[j] = scale * s.hTilde1[j] + shift;
    v.lambdaAng[j] = scale * s.hTildeAng[j] + shift;
    std::fill(lam.begin(), lam.end(), v.lambdaAng[j]);
    lam[0] = v.lambda1[j];
    v.F[j] = symfunc::quotient(lam, k).F;
    v.u[j] = s.phi[j] / s.omegaDual[j];
    v.f[j] = G[j] * s.phi[j] / (s.uTilde[j] * s.omegaDual[j]);
  }
  return v;
}

quermass::QuermassVector dual_quermass(const DualState& s, const PrimalView& v) {
  const int n = s.n;
  const std::size_t N = s.size();
  const auto w = polar_weights(n, N);
  const double area = sphere_area(n - 1);
  std::vector<double> jac(N);
  for (std::size_t j = 0; j < N; ++j) {
    const bool pole = (j == 0 || j + 1 == N);
    const double ratio = pole ? s.thetaPsi[j] : std::sin(s.theta[j]) / std::sin(s.psi[j]);
    jac[j] = std::pow(ratio, n - 1) * s.thetaPsi[j];
  }
  double vol = 0.0;
  std::vector<double> integrals(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> lam(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < N; ++j) {
    vol += w[j] * jac[j] * hypersurface::sin_power_integral(n, s.rho[j]);
    std::fill(lam.begin(), lam.end(), v.lambdaAng[j]);
    lam[0] = v.lambda1[j];
    const auto sig = symfunc::sigma_all(lam);
    const double dmu = std::pow(s.phi[j], n) * s.omegaDual[j];
    for (int m = 0; m <= n; ++m) integrals[m] += w[j] * jac[j] * sig[m] * dmu;
  }
  for (double& x : integrals) x *= area;
  return quermass::assemble(n, area * vol, integrals);
}

double speed_transport_residual(const RadialProfile& profile, int k, std::size_t Npsi) {
  const auto primal = hypersurface::geometry(profile, k);
  const CosineSeries fs(flow::speed(primal, k));
  const auto s = support_closure(profile.n(), import_support(profile, Npsi));
  const auto G = g_operator(s, k);
  double worst = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double transported = s.uTilde[j] * s.omegaDual[j] / s.phi[j] * fs.value(s.theta[j]);
    worst = std::max(worst, std::abs(G[j] - transported));
  }
  return worst;
}

double stable_dt(const DualState& s, int k, const flow::DtPolicy& policy) {
  double D = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const auto q = shifted_quotient(s, j, k);
    const double h1 = s.hTilde1[j], ha = s.hTildeAng[j];
    const double mix = q.gradDiag[0] * h1 * h1 + (s.n - 1) * q.gradDiag[1] * ha * ha;
    D = std::max(D, s.rhoTilde[j] * s.uTilde[j] / s.phi[j] * mix);
  }
  const double dt = D > 0.0 ? policy.cflFactor * s.h * s.h / D : policy.dtMax;
  return std::min(dt, policy.dtMax);
}

std::vector<double> step(int n, std::span<const double> uTilde, double dt, int k) {
  if (!(dt > 0.0)) throw std::invalid_argument("dual step: dt must be positive");
  const std::size_t N = uTilde.size();
  auto rate = [&](std::span<const double> u) {
    try {
      return g_operator(support_closure(n, u), k);
    } catch (const ConvexityLoss& e) {
      throw flow::StepRejected(std::string("convexity loss: ") + e.what(), false);
    } catch (const ConeViolation& e) {
      throw flow::StepRejected(e.what(), true);
    } catch (const InvalidProfile& e) {
      throw flow::StepRejected(e.what(), false);
    }
  };
  auto shifted = [&](const std::vector<double>& r, double a) {
    std::vector<double> out(N);
    for (std::size_t j = 0; j < N; ++j) out[j] = uTilde[j] + a * r[j];
    return out;
  };
  const auto k1 = rate(uTilde);
  const auto k2 = rate(shifted(k1, 0.5 * dt));
  const auto k3 = rate(shifted(k2, 0.5 * dt));
  const auto k4 = rate(shifted(k3, dt));
  std::vector<double> y(N);
  for (std::size_t j = 0; j < N; ++j)
    y[j] = uTilde[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  return y;
}

namespace {

DualRecord make_record(const DualState& s, const PrimalView& v, const quermass::QuermassVector& q) {
  DualRecord r;
  auto& b = r.base;
  b.A = q;
  b.minU = *std::min_element(v.u.begin(), v.u.end());
  b.minRho = *std::min_element(s.rho.begin(), s.rho.end());
  b.maxRho = *std::max_element(s.rho.begin(), s.rho.end());
  b.minF = *std::min_element(v.F.begin(), v.F.end());
  b.maxF = *std::max_element(v.F.begin(), v.F.end());
  b.minLambda = std::min(*std::min_element(v.lambda1.begin(), v.lambda1.end()),
                         *std::min_element(v.lambdaAng.begin(), v.lambdaAng.end()));
  b.maxLambda = std::max(*std::max_element(v.lambda1.begin(), v.lambda1.end()),
                         *std::max_element(v.lambdaAng.begin(), v.lambdaAng.end()));
  for (double f : v.f) b.maxSpeed = std::max(b.maxSpeed, std::abs(f));
  r.minEigW = s.min_eig_W();
  r.maxEigW = s.max_eig_W();
  return r;
}

}  // namespace

DualRunResult dual_run(const flow::FlowConfig& config) {
  config.validate();
  const int n = config.n;
  const int k = config.k;
  const auto& tol = config.monitorTolerances;

  std::vector<double> u = import_support(flow::initial_profile(config), config.N);
  DualState state = support_closure(n, u);
  PrimalView view = primal_view(state, k);
  quermass::QuermassVector q = dual_quermass(state, view);

  flow::MonitorBaseline base;
  base.k = k;
  DualRecord current = make_record(state, view, q);
  base.minRho = current.base.minRho;
  base.maxRho = current.base.maxRho;
  base.minU = current.base.minU;
  base.minF = current.base.minF;
  base.maxF = current.base.maxF;
  base.conserved = q[k - 1];
  base.minLambda = current.base.minLambda;
  flow::check_record(current.base, n, base, nullptr, tol);

  DualTrace trace;
  trace.minWMargin = current.minEigW;
  std::set<std::string> pending;
  auto note = [&](const DualRecord& r) {
    for (const auto& code : r.base.violations) {
      ++trace.violationCounts[code];
      pending.insert(code);
    }
  };
  auto push = [&](DualRecord r, double t) {
    r.base.t = t;
    r.base.violations.assign(pending.begin(), pending.end());
    pending.clear();
    trace.records.push_back(std::move(r));
  };
  note(current);
  push(current, 0.0);

  double t = 0.0;
  double dtScale = 1.0;
  int sinceGrowth = 0;
  std::string lastReject;
  bool lastRejectCone = false;
  double nextSample = config.sampleInterval;
  bool done = current.base.maxSpeed < config.convergenceTol;
  if (done) trace.reason = flow::Termination::converged;

  while (!done) {
    if (t >= config.tMax) {
      trace.reason = flow::Termination::timeLimit;
      break;
    }
    const double target = std::min(nextSample, config.tMax);
    double dt = std::min(stable_dt(state, k, config.dtPolicy) * dtScale, config.dtPolicy.dtMax);
    bool atTarget = false;
    if (t + dt >= target) {
      dt = target - t;
      atTarget = true;
    }

    std::vector<double> next;
    DualState nextState;
    PrimalView nextView;
    try {
      next = step(n, u, dt, k);
      nextState = support_closure(n, next);
      nextView = primal_view(nextState, k);
    } catch (const flow::StepRejected& e) {
      lastReject = e.what();
      lastRejectCone = e.cone_exit();
      next.clear();
    } catch (const ConvexityLoss& e) {
      lastReject = std::string("convexity loss: ") + e.what();
      lastRejectCone = false;
      next.clear();
    } catch (const ConeViolation& e) {
      lastReject = e.what();
      lastRejectCone = true;
      next.clear();
    } catch (const InvalidProfile& e) {
      lastReject = e.what();
      lastRejectCone = false;
      next.clear();
    }
    if (next.empty()) {
      ++trace.rejectedSteps;
      dtScale *= 0.5;
      sinceGrowth = 0;
      if (dtScale < 1e-10) {
        if (lastReject.rfind("convexity loss", 0) == 0)
          trace.reason = flow::Termination::convexityLost;
        else
          trace.reason = lastRejectCone ? flow::Termination::coneExit : flow::Termination::stepUnderflow;
        trace.detail = lastReject;
        trace.breakdownTime = t;
        break;
      }
      continue;
    }

    ++trace.acceptedSteps;
    const auto qNext = dual_quermass(nextState, nextView);
    DualRecord rec = make_record(nextState, nextView, qNext);
    flow::check_record(rec.base, n, base, &q, tol);
    note(rec);
    trace.minWMargin = std::min(trace.minWMargin, rec.minEigW);

    t = atTarget ? target : t + dt;
    u = std::move(next);
    state = std::move(nextState);
    view = std::move(nextView);
    q = qNext;
    current = rec;

    if (++sinceGrowth >= 20) {
      dtScale = std::min(1.0, dtScale * 1.2);
      sinceGrowth = 0;
    }
    if (!(rec.base.minLambda > 0.0)) {
      trace.reason = flow::Termination::convexityLost;
      trace.detail = "spherical lambda_min <= 0";
      trace.breakdownTime = t;
      break;
    }
    if (std::max(std::abs(rec.base.minLambda), std::abs(rec.base.maxLambda)) > tol.blowupThreshold) {
      trace.reason = flow::Termination::blowup;
      trace.detail = "max |lambda| above blow-up threshold";
      trace.breakdownTime = t;
      break;
    }
    if (rec.base.maxSpeed < config.convergenceTol) {
      trace.reason = flow::Termination::converged;
      break;
    }
    if (atTarget && target == nextSample) {
      push(rec, t);
      nextSample += config.sampleInterval;
    }
  }

  if (trace.records.back().base.t < t)
    push(current, t);
  else
    for (const auto& code : pending) trace.records.back().base.violations.push_back(code);
  trace.finalTime = t;
  return DualRunResult{std::move(trace), std::move(state)};
}

TraceComparison compare_traces(const flow::FlowTrace& primal, const DualTrace& dual) {
  TraceComparison c;
  std::size_t i = 0;
  for (const auto& p : primal.records) {
    while (i < dual.records.size() && dual.records[i].base.t < p.t - 1e-12) ++i;
    if (i == dual.records.size()) break;
    const auto& d = dual.records[i].base;
    if (std::abs(d.t - p.t) > 1e-12) continue;
    ++c.compared;
    c.lastCommonTime = p.t;
    for (int l = -1; l <= p.A.n(); ++l)
      c.maxQuermass = std::max(c.maxQuermass, std::abs(d.A[l] - p.A[l]) / std::abs(p.A[l]));
    c.maxRhoBounds = std::max({c.maxRhoBounds, std::abs(d.minRho - p.minRho), std::abs(d.maxRho - p.maxRho)});
  }
  return c;
}

}  // namespace curvflow::dual
