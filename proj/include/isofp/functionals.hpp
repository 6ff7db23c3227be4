#pragma once

#include "isofp/density.hpp"
#include "isofp/hyperspherical.hpp"
#include "isofp/one_dim.hpp"
#include "isofp/test_function.hpp"
#include "isofp/weight_function.hpp"

#include <optional>
#include <vector>

namespace isofp {

// Expectations under an isotropic density on the full hyperspherical grid.
// The half-line entry has no sphere and is rejected here; use the 1-D forms.
double expectation(const IsotropicDensity& d, const HypersphericalGrid& grid, const TestFunction& phi,
                   const Integrator& integ = {});
// Two-pass: E[(phi - E phi)^2], clamped at 0.
double variance(const IsotropicDensity& d, const HypersphericalGrid& grid, const TestFunction& phi,
                const Integrator& integ = {});
double variance(const IsotropicDensity& d, const TestFunction& phi, const Integrator& integ = {});

// E[w(|X|) |grad phi(X)|^2].
double weighted_dirichlet(const IsotropicDensity& d, const HypersphericalGrid& grid, const WeightFunction& w,
                          const TestFunction& phi, const Integrator& integ = {},
                          std::vector<double> extra_breaks = {});
double weighted_dirichlet(const IsotropicDensity& d, const WeightFunction& w, const TestFunction& phi,
                          const Integrator& integ = {});

struct DirichletSplit {
  double radial = 0.0;              // E[w(rho) (d phi / d rho)^2]
  double angular = 0.0;             // sum of per_angle
  std::vector<double> per_angle;    // E[P_i(theta_i) (d phi / d theta_i)^2]
};

// Radial and angular addends of the hyperspherical product bound. angular
// holds one weight per angle theta_1..theta_{n-1}: the exact P_i or constant
// bounds.
DirichletSplit split_dirichlet_radial_angular(const IsotropicDensity& d, const HypersphericalGrid& grid,
                                              const TestFunction& phi, const WeightFunction& radial_w,
                                              const std::vector<WeightFunction>& angular,
                                              const Integrator& integ = {});

// Everything an isotropic check needs from two radial passes: the mean, then
// the centered second moment together with E[w_k |grad phi|^2] for each
// weight and, when radial_w is set, the radial/angular split.
struct IsotropicMoments {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> dirichlet;
  std::optional<DirichletSplit> split;
};
IsotropicMoments isotropic_moments(const IsotropicDensity& d, const HypersphericalGrid& grid,
                                   const TestFunction& phi, const std::vector<WeightFunction>& weights,
                                   const WeightFunction* radial_w = nullptr,
                                   const std::vector<WeightFunction>* angular = nullptr,
                                   const Integrator& integ = {}, std::vector<double> extra_breaks = {});

// f(R) R^{n-1} int_{S^{n-1}} |grad phi(R u)|^2 du.
double surface_dirichlet(const IsotropicDensity& d, const HypersphericalGrid& grid, const TestFunction& phi,
                         double R);

// 1-D versions on a density on an interval; phi and dphi are scalar maps.
struct OneDimMoments {
  double mean = 0.0;
  double variance = 0.0;
  double dirichlet = 0.0;  // E[w phi'^2]
};
OneDimMoments one_dim_moments(const OneDimDensity& f, const std::function<double(double)>& phi,
                              const std::function<double(double)>& dphi, const WeightFunction& w,
                              const Integrator& integ = {}, std::vector<double> extra_breaks = {});

}  // namespace isofp
