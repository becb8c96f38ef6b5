#include "curvflow/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow::hypersurface {

using std::numbers::pi;

SphereGrid2D::SphereGrid2D(std::size_t nTheta, std::size_t nPhi, std::vector<double> radii)
    : nTheta_(nTheta), nPhi_(nPhi), rho_(std::move(radii)) {
  if (nTheta_ < 5) throw InvalidProfile("sphere grid: need at least 5 latitude rows");
  if (nPhi_ < 5) throw InvalidProfile("sphere grid: need at least 5 longitudes");
  if (rho_.size() != nTheta_ * nPhi_) throw InvalidProfile("sphere grid: size mismatch");
  for (double r : rho_)
    if (!(r > 0.0 && r < pi / 2)) throw InvalidProfile("sphere grid: rho out of (0, pi/2)");
  for (std::size_t j : {std::size_t{0}, nTheta_ - 1})
    for (std::size_t m = 1; m < nPhi_; ++m)
      if (rho(j, m) != rho(j, 0)) throw InvalidProfile("sphere grid: pole row not constant");
}

SphereGrid2D SphereGrid2D::sample(std::size_t nTheta, std::size_t nPhi,
                                  const std::function<double(double, double)>& rhoOf) {
  std::vector<double> rho(nTheta * nPhi);
  const double dt = pi / static_cast<double>(nTheta - 1);
  const double dp = 2.0 * pi / static_cast<double>(nPhi);
  for (std::size_t j = 0; j < nTheta; ++j) {
    const bool pole = (j == 0 || j + 1 == nTheta);
    const double t = (j + 1 == nTheta) ? pi : dt * static_cast<double>(j);
    for (std::size_t m = 0; m < nPhi; ++m)
      rho[j * nPhi + m] = pole ? rhoOf(t, 0.0) : rhoOf(t, dp * static_cast<double>(m));
  }
  return SphereGrid2D(nTheta, nPhi, std::move(rho));
}

double SphereGrid2D::theta(std::size_t j) const {
  return j + 1 == nTheta_ ? pi : pi * static_cast<double>(j) / static_cast<double>(nTheta_ - 1);
}

double SphereGrid2D::varphi(std::size_t m) const {
  return 2.0 * pi * static_cast<double>(m) / static_cast<double>(nPhi_);
}

namespace {

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

// Tensor formulas for a radial graph at one point, in coordinates where the
// round metric is e = diag(1, e11) and its inverse eInv = diag(1, 1/e11).
// grad = (rho_1, rho_2) (covariant), hess = covariant Hessian of rho in e.
TensorNode assemble(double rho, const std::array<double, 2>& grad, const Mat2& hess,
                    double e11) {
  const double phi = std::sin(rho);
  const double dphi = std::cos(rho);
  const Mat2 e{1.0, 0.0, 0.0, e11};
  const std::array<double, 2> up{grad[0], grad[1] / e11};  // rho^i = e^{im} rho_m
  const double grad2 = grad[0] * up[0] + grad[1] * up[1];
  const double wt = std::sqrt(phi * phi + grad2);

  TensorNode t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      t.g[2 * i + j] = phi * phi * e[2 * i + j] + grad[i] * grad[j];
      const double eInv = (i == j) ? (i == 0 ? 1.0 : 1.0 / e11) : 0.0;
      t.gInv[2 * i + j] = (eInv - up[i] * up[j] / (phi * phi + grad2)) / (phi * phi);
      t.h[2 * i + j] =
          (-phi * hess[2 * i + j] + 2.0 * dphi * grad[i] * grad[j] + phi * phi * dphi * e[2 * i + j]) /
          wt;
    }
  const double detg = t.g[0] * t.g[3] - t.g[1] * t.g[2];
  if (!(detg > 0.0)) throw std::domain_error("geometry_full_s2: degenerate metric");
  t.weingarten = mul(t.gInv, t.h);
  const double tr = t.weingarten[0] + t.weingarten[3];
  const double det = t.weingarten[0] * t.weingarten[3] - t.weingarten[1] * t.weingarten[2];
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  t.lambdaMax = 0.5 * tr + disc;
  t.lambdaMin = 0.5 * tr - disc;
  t.u = phi * phi / wt;
  t.areaWeight = std::sqrt(detg / e11);
  return t;
}

}  // namespace

SphereGeometry geometry_full_s2(const SphereGrid2D& grid) {
  const std::size_t Nt = grid.n_theta();
  const std::size_t Mp = grid.n_phi();
  const double ht = pi / static_cast<double>(Nt - 1);
  const double hp = 2.0 * pi / static_cast<double>(Mp);

  SphereGeometry out;
  out.nTheta = Nt;
  out.nPhi = Mp;
  out.nodes.resize(Nt * Mp);

  for (std::size_t j = 1; j + 1 < Nt; ++j) {
    const double th = grid.theta(j);
    const double s = std::sin(th);
    const double c = std::cos(th);
    for (std::size_t m = 0; m < Mp; ++m) {
      const std::size_t mp = (m + 1) % Mp;
      const std::size_t mm = (m + Mp - 1) % Mp;
      const double r = grid.rho(j, m);
      const double rt = (grid.rho(j + 1, m) - grid.rho(j - 1, m)) / (2.0 * ht);
      const double rtt = (grid.rho(j + 1, m) - 2.0 * r + grid.rho(j - 1, m)) / (ht * ht);
      const double rp = (grid.rho(j, mp) - grid.rho(j, mm)) / (2.0 * hp);
      const double rpp = (grid.rho(j, mp) - 2.0 * r + grid.rho(j, mm)) / (hp * hp);
      const double rtp = (grid.rho(j + 1, mp) - grid.rho(j + 1, mm) - grid.rho(j - 1, mp) +
                          grid.rho(j - 1, mm)) /
                         (4.0 * ht * hp);
      // Christoffel symbols of dtheta^2 + sin^2 dphi^2:
      //   Gamma^theta_{phi phi} = -s c,  Gamma^phi_{theta phi} = c / s.
      const double hTT = rtt;
      const double hTP = rtp - c / s * rp;
      const double hPP = rpp + s * c * rt;
      out.nodes[j * Mp + m] = assemble(r, {rt, rp}, {hTT, hTP, hTP, hPP}, s * s);
    }
  }

  // Poles: geodesic normal coordinates x = r cos(varphi), y = r sin(varphi),
  // where Christoffel symbols vanish; gradient and Hessian from the Fourier
  // modes 0..2 of the first ring, a second-order accurate fit.
  auto pole = [&](std::size_t poleRow, std::size_t ringRow) {
    const double r0 = grid.rho(poleRow, 0);
    double a0 = 0, a1 = 0, b1 = 0, a2 = 0, b2 = 0;
    for (std::size_t m = 0; m < Mp; ++m) {
      const double v = grid.rho(ringRow, m);
      const double ph = grid.varphi(m);
      a0 += v;
      a1 += v * std::cos(ph);
      b1 += v * std::sin(ph);
      a2 += v * std::cos(2.0 * ph);
      b2 += v * std::sin(2.0 * ph);
    }
    const double inv = 1.0 / static_cast<double>(Mp);
    a0 *= inv;
    a1 *= 2.0 * inv;
    b1 *= 2.0 * inv;
    a2 *= 2.0 * inv;
    b2 *= 2.0 * inv;
    const double h2 = ht * ht;
    const double hxx = 2.0 * (a0 - r0) / h2 + 2.0 * a2 / h2;
    const double hyy = 2.0 * (a0 - r0) / h2 - 2.0 * a2 / h2;
    const double hxy = 2.0 * b2 / h2;
    const TensorNode t = assemble(r0, {a1 / ht, b1 / ht}, {hxx, hxy, hxy, hyy}, 1.0);
    for (std::size_t m = 0; m < Mp; ++m) out.nodes[poleRow * Mp + m] = t;
  };
  pole(0, 1);
  pole(Nt - 1, Nt - 2);
  return out;
}

double weingarten_asymmetry(const SphereGeometry& geom) {
  double worst = 0.0, scale = 0.0;
  for (const auto& t : geom.nodes) {
    const Mat2 lowered = mul(t.g, t.weingarten);
    worst = std::max(worst, std::abs(lowered[1] - lowered[2]));
    for (double v : t.h) scale = std::max(scale, std::abs(v));
  }
  return scale == 0.0 ? 0.0 : worst / scale;
}

}  // namespace curvflow::hypersurface
