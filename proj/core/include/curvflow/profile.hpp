#pragma once

// Axisymmetric radial graphs rho(theta) over S^n and the polar-grid machinery
// shared by the primal and dual solvers: uniform theta nodes including both
// poles, centered differences with even reflection across the poles, and a
// quadrature rule for integrals against sin^{n-1}(theta) d(theta).

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace curvflow {

/// theta_j = j*pi/(N-1), j = 0..N-1.
std::vector<double> polar_nodes(std::size_t N);

/// |S^d| by the recursion |S^d| = 2 pi/(d-1) |S^{d-2}| from |S^0| = 2, |S^1| = 2 pi.
double sphere_area(int d);

class RadialProfile {
 public:
  /// Validates: n >= 2, uniform theta from 0 to pi, 0 < rho < pi/2.
  RadialProfile(int n, std::vector<double> theta, std::vector<double> rho);

  static RadialProfile sample(int n, std::size_t N, const std::function<double(double)>& rhoOf);
  static RadialProfile constant(int n, std::size_t N, double r);
  /// rho = r0 + eps * cos(mode * theta)
  static RadialProfile perturbed(int n, std::size_t N, double r0, double eps, int mode);

  int n() const { return n_; }
  std::size_t size() const { return rho_.size(); }
  double spacing() const;
  std::span<const double> theta() const { return theta_; }
  std::span<const double> rho() const { return rho_; }

  /// Same grid, new radii (validated).
  RadialProfile with_rho(std::vector<double> rho) const;

 private:
  int n_;
  std::vector<double> theta_;
  std::vector<double> rho_;
};

struct Derivatives {
  std::vector<double> first;   // d/dtheta
  std::vector<double> second;  // d^2/dtheta^2
  // Limit of cot(theta) * first at theta -> 0 and theta -> pi taken through
  // the difference operator itself, accurate to O(h^4). Differs from
  // second[pole] by (h^2/12) v''''(pole) + O(h^4).
  double poleLimitNorth = 0.0;
  double poleLimitSouth = 0.0;
};

/// Second-order centered differences on a uniform polar grid; the sampled
/// function is reflected evenly across theta = 0 and theta = pi, so the first
/// derivative vanishes there. Throws InvalidProfile for fewer than 5 nodes.
Derivatives differentiate_even(std::span<const double> values, double h);

/// d/dtheta and d^2/dtheta^2 of rho.
Derivatives differentiate(const RadialProfile& profile);

/// Weights w_j with sum_j w_j g(theta_j) ~= int_0^pi g(theta) sin^{n-1}(theta) dtheta
/// for g smooth and even about both poles. Built from the cosine interpolant of
/// the samples (Clenshaw-Curtis in theta), so it is exact for constants and
/// spectrally accurate for smooth data. Cached per (n, N); thread-safe.
std::span<const double> polar_weights(int n, std::size_t N);

/// Cosine-series interpolant through samples on the polar grid, used where
/// a profile must be evaluated off the nodes.
class CosineSeries {
 public:
  explicit CosineSeries(std::span<const double> samples);

  double value(double theta) const;
  double derivative(double theta) const;
  double second_derivative(double theta) const;

 private:
  std::vector<double> coeff_;
};

}  // namespace curvflow
