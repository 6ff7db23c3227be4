#pragma once

#include "isofp/common.hpp"
#include "isofp/density.hpp"
#include "isofp/quadrature.hpp"

#include <vector>

namespace isofp {

// x = rho u(Theta):
//   u_1 = cos t_1, u_k = sin t_1 ... sin t_{k-1} cos t_k, u_n = sin t_1 ... sin t_{n-1},
// with t_1..t_{n-2} in (0, pi) and t_{n-1} in (0, 2 pi).
Point sphere_direction(const Eigen::VectorXd& theta);
// Columns are d u / d t_i, i = 1..n-1.
Eigen::MatrixXd sphere_direction_jacobian(const Eigen::VectorXd& theta);
// Inverse map; returns rho and fills theta (size n-1).
double to_hyperspherical(const Point& x, Eigen::VectorXd& theta);
// |det d x / d(rho, Theta)| = rho^{n-1} prod_k sin^{n-1-k} t_k.
double hyperspherical_jacobian(double rho, const Eigen::VectorXd& theta);

// Tensor Gauss-Legendre rule on the unit sphere S^{n-1}; weights carry the
// sin-power Jacobians and sum to sigma_n. For n = 1 the sphere is {-1, +1}.
class HypersphericalGrid {
 public:
  explicit HypersphericalGrid(int n, int order = 32);

  int dim() const { return n_; }
  int size() const { return static_cast<int>(weights_.size()); }
  int order() const { return order_; }
  const Point& direction(int j) const { return dirs_[j]; }
  double weight(int j) const { return weights_[j]; }
  const Eigen::VectorXd& angles(int j) const { return angles_[j]; }
  // n x (n-1) matrix d u / d theta at node j.
  const Eigen::MatrixXd& direction_jacobian(int j) const { return du_[j]; }

 private:
  int n_, order_;
  std::vector<Point> dirs_;
  std::vector<double> weights_;
  std::vector<Eigen::VectorXd> angles_;
  std::vector<Eigen::MatrixXd> du_;
};

// int_{lo}^{hi} measure * rho^{n-1} f(rho) sum_j w_j g(rho, j) drho.
// The radial integral is adaptive; g(rho, j) returns double or an Eigen array.
template <class G>
auto isotropic_integral(const IsotropicDensity& d, const HypersphericalGrid& grid, G&& g,
                        const Integrator& integ, double lo = 0.0, double hi = -1.0,
                        std::vector<double> breaks = {}) {
  if (hi < 0) hi = d.support_radius();
  const int n = d.dim();
  const double meas = d.measure_factor() / sphere_area(n);  // grid weights already sum to sigma_n
  using T = std::decay_t<decltype(g(0.0, 0))>;
  auto radial = [&](double rho) -> T {
    T acc = g(rho, 0) * grid.weight(0);
    for (int j = 1; j < grid.size(); ++j) acc += g(rho, j) * grid.weight(j);
    return acc * (meas * std::pow(rho, n - 1) * d(rho));
  };
  return integrate_interval(radial, lo, hi, d.integrator(integ), std::move(breaks));
}

}  // namespace isofp
