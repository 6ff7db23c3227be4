#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isofp {

// Points live on the stack: the full-grid machinery never goes past n = 8.
inline constexpr int kMaxDim = 8;
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline constexpr double kPi = std::numbers::pi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or violated preconditions.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-converged quadrature, singular solve, negativity.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Surface measure of the unit sphere in R^n.
inline double sphere_area(int n) {
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace isofp
