#pragma once

#include "isofp/common.hpp"
#include "isofp/quadrature.hpp"
#include "isofp/weight_function.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace isofp {

enum class DensityKind { gaussian, cauchy_type, exponential_type, barenblatt, inverse_gamma_1d };

const char* kind_name(DensityKind k);

struct DensityParams {
  double sigma = 1.0;  // gaussian variance
  double beta = 1.0;   // cauchy_type exponent, exponential_type rate
  double a = 1.0;      // barenblatt radius
  double p = 2.0;      // barenblatt exponent
  double mu = 1.0;     // inverse_gamma_1d shape, mean is 1
};

// Isotropic density f(|x|) on R^n, or for inverse_gamma_1d a density on
// (0, inf). Immutable after construction.
class IsotropicDensity {
 public:
  IsotropicDensity(DensityKind kind, DensityParams params, int n);

  DensityKind kind() const { return kind_; }
  int dim() const { return n_; }
  const DensityParams& params() const { return params_; }
  double support_radius() const { return support_; }
  double norm_const() const { return norm_; }

  // f(rho) with the normalization; 0 off the support. Isotropic kinds use
  // |rho| so the n = 1 density can be evaluated on the whole line.
  double operator()(double rho) const { return norm_ * profile(rho); }
  double profile(double rho) const;
  double log_profile(double rho) const;
  // Moments E|X|^k exist for k < max_moment().
  double max_moment() const;

  // Mass of the radial law is measure_factor() * int rho^{n-1} f: sigma_n
  // for isotropic kinds, 1 for the half-line inverse gamma.
  double measure_factor() const { return measure_; }
  bool half_line() const { return kind_ == DensityKind::inverse_gamma_1d; }
  // m in the linear drift (x - m); the mean for the half-line entry.
  double drift_center() const { return half_line() ? 1.0 : 0.0; }
  bool algebraic_tail() const {
    return kind_ == DensityKind::cauchy_type || kind_ == DensityKind::inverse_gamma_1d;
  }

  // Integrator tuned to this support: log tail map for algebraic tails.
  Integrator integrator(Integrator base = {}) const;

  std::string label() const;

 private:
  DensityKind kind_;
  DensityParams params_;
  int n_;
  double support_;
  double measure_;
  double norm_ = 1.0;
};

IsotropicDensity make_density(DensityKind kind, DensityParams params, int n);
double eval_density(const IsotropicDensity& d, double rho);

// "cauchy:beta=3,n=2", "gaussian:sigma=1,n=3", "barenblatt:a=1,p=2,n=2",
// "exponential:beta=1,n=2", "inverse_gamma:mu=2".
IsotropicDensity parse_density(std::string_view spec);

// Law of |X|: sigma_n rho^{n-1} f(rho).
struct RadialMarginal {
  IsotropicDensity base;
  double sigma_n;
  double operator()(double rho) const;
};

RadialMarginal radial_marginal(const IsotropicDensity& d);

// Closed-form diffusion coefficient K solving (K f)' + (rho - m) f = 0, when
// one is known: sigma; (1+rho^2)/(2(beta-1)); (1+beta rho)/beta^2;
// (p-1)/(2p) (a^2-rho^2). Without the factor 1/2 the Cauchy-type coefficient
// does not solve the equation. None for Cauchy-type with beta <= 1 (K is
// infinite) and for the half-line entry (see p_weight_1d).
std::optional<WeightFunction> closed_form_weight(const IsotropicDensity& d);

}  // namespace isofp
