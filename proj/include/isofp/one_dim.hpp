#pragma once

#include "isofp/density.hpp"
#include "isofp/quadrature.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace isofp {

// Probability density on an interval (lo, hi), possibly unbounded.
struct OneDimDensity {
  std::string name;
  std::function<double(double)> pdf;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double mean = 0.0;
  TailMap tail = TailMap::rational;
  std::vector<double> breaks;  // interior points where pdf is not smooth
  double max_moment = std::numeric_limits<double>::infinity();
  // Set for N(mean, variance): tensor checks then use Gauss-Hermite directly.
  std::optional<double> normal_variance;

  double operator()(double x) const { return (x > lo && x < hi) ? pdf(x) : 0.0; }
  Integrator integrator(Integrator base = {}) const {
    base.tail = tail;
    return base;
  }
};

OneDimDensity normal_density(double variance = 1.0, double mean = 0.0);
OneDimDensity uniform_density(double lo, double hi);
// Density of theta_i in the hyperspherical map of R^n: proportional to
// sin^{n-1-i} on (0, pi) for i <= n-2, uniform on (0, 2 pi) for i = n-1.
OneDimDensity angular_density(int i, int n);
// Law of |X| on (0, i+); for the half-line entry, the density itself.
OneDimDensity radial_density(const IsotropicDensity& d);
// n = 1 isotropic density on the whole line (-i+, i+).
OneDimDensity line_density(const IsotropicDensity& d);
// Gamma(shape k, rate beta).
OneDimDensity gamma_density(double k, double beta);

// n-point Gauss rule for the density: a fine composite Gauss-Legendre
// discretization compressed by Lanczos; Gauss-Hermite for normals.
GaussRule<double> gauss_rule(const OneDimDensity& f, int n);

}  // namespace isofp
