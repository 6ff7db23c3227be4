#include "isofp/hyperspherical.hpp"

namespace isofp {

Point sphere_direction(const Eigen::VectorXd& theta) {
  const int n = static_cast<int>(theta.size()) + 1;
  Point u(n);
  double s = 1.0;
  for (int k = 0; k < n - 1; ++k) {
    u(k) = s * std::cos(theta(k));
    s *= std::sin(theta(k));
  }
  u(n - 1) = s;
  return u;
}

Eigen::MatrixXd sphere_direction_jacobian(const Eigen::VectorXd& theta) {
  const int n = static_cast<int>(theta.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n - 1);
  Eigen::VectorXd c = theta.array().cos(), s = theta.array().sin();
  // u_k = (prod_{j<k} s_j) c_k for k < n-1, u_{n-1} = prod_{j<n-1} s_j.
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < std::min(k + 1, n - 1); ++i) {
      double v = 1.0;
      for (int j = 0; j < k && j < n - 1; ++j) v *= (j == i) ? c(j) : s(j);
      if (k < n - 1) v *= (k == i) ? -s(k) : c(k);
      J(k, i) = v;
    }
  }
  return J;
}

double to_hyperspherical(const Point& x, Eigen::VectorXd& theta) {
  const int n = static_cast<int>(x.size());
  theta.resize(n - 1);
  const double rho = x.norm();
  for (int k = 0; k + 1 < n; ++k) {
    const double tail = x.tail(n - k - 1).norm();
    if (k < n - 2) {
      theta(k) = std::atan2(tail, x(k));
    } else {
      double t = std::atan2(x(n - 1), x(n - 2));
      if (t < 0) t += 2 * kPi;
      theta(k) = t;
    }
  }
  return rho;
}

double hyperspherical_jacobian(double rho, const Eigen::VectorXd& theta) {
  const int n = static_cast<int>(theta.size()) + 1;
  double j = std::pow(rho, n - 1);
  for (int k = 0; k < n - 1; ++k) j *= std::pow(std::sin(theta(k)), n - 2 - k);
  return std::abs(j);
}

HypersphericalGrid::HypersphericalGrid(int n, int order) : n_(n), order_(order) {
  if (n < 1 || n > 4) throw DomainError("HypersphericalGrid: full grid supports 1 <= n <= 4");
  if (n == 1) {
    Point p(1);
    for (double sgn : {1.0, -1.0}) {
      p(0) = sgn;
      dirs_.push_back(p);
      weights_.push_back(1.0);
      angles_.emplace_back();
      du_.emplace_back(1, 0);
    }
    return;
  }
  const GaussRule<double> gl = gauss_legendre<double>(order);
  const int m = n - 1;
  std::vector<int> idx(m, 0);
  while (true) {
    Eigen::VectorXd th(m);
    double w = 1.0;
    for (int k = 0; k < m; ++k) {
      const bool azimuth = (k == m - 1);
      const double half = azimuth ? kPi : 0.5 * kPi;
      th(k) = half * (1.0 + gl.nodes(idx[k]));
      w *= half * gl.weights(idx[k]);
      if (!azimuth) w *= std::pow(std::sin(th(k)), n - 2 - k);
    }
    dirs_.push_back(sphere_direction(th));
    weights_.push_back(w);
    du_.push_back(sphere_direction_jacobian(th));
    angles_.push_back(std::move(th));
    int k = m - 1;
    while (k >= 0 && ++idx[k] == order) idx[k--] = 0;
    if (k < 0) break;
  }
}

}  // namespace isofp
