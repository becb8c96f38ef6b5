#pragma once

// Full-tensor geometry of a radial graph over S^2 (n = 2) on a latitude-
// longitude grid. Independent of the axisymmetric reduction: metric, inverse
// metric, second fundamental form and Weingarten map are assembled as 2x2
// tensors from covariant derivatives of rho in the round metric, and the
// principal curvatures come from the eigenvalues of g^{-1} h.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace curvflow::hypersurface {

/// Latitude rows theta_j = j pi/(Ntheta-1) (poles included), longitudes
/// varphi_m = 2 pi m / Mphi. Pole rows must be constant in longitude.
class SphereGrid2D {
 public:
  SphereGrid2D(std::size_t nTheta, std::size_t nPhi, std::vector<double> rho);

  static SphereGrid2D sample(std::size_t nTheta, std::size_t nPhi,
                             const std::function<double(double, double)>& rhoOf);

  std::size_t n_theta() const { return nTheta_; }
  std::size_t n_phi() const { return nPhi_; }
  double theta(std::size_t j) const;
  double varphi(std::size_t m) const;
  double rho(std::size_t j, std::size_t m) const { return rho_[j * nPhi_ + (m % nPhi_)]; }

 private:
  std::size_t nTheta_;
  std::size_t nPhi_;
  std::vector<double> rho_;
};

using Mat2 = std::array<double, 4>;  // row-major {a00, a01, a10, a11}

struct TensorNode {
  Mat2 g{};           // induced metric g_ij
  Mat2 gInv{};        // g^{ij}
  Mat2 h{};           // second fundamental form h_ij
  Mat2 weingarten{};  // h^i_j = g^{im} h_mj
  double u = 0.0;
  double lambdaMax = 0.0;
  double lambdaMin = 0.0;
  double areaWeight = 0.0;  // dmu_g against the round S^2 element
};

struct SphereGeometry {
  std::size_t nTheta = 0;
  std::size_t nPhi = 0;
  std::vector<TensorNode> nodes;  // row-major (j, m)

  const TensorNode& at(std::size_t j, std::size_t m) const { return nodes[j * nPhi + m]; }
};

/// Throws std::domain_error on a degenerate metric.
SphereGeometry geometry_full_s2(const SphereGrid2D& grid);

/// max |g_im h^m_j - g_jm h^m_i| over the grid, relative to max |h_ij|.
double weingarten_asymmetry(const SphereGeometry& geom);

}  // namespace curvflow::hypersurface
