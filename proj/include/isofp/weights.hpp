#pragma once

#include "isofp/density.hpp"
#include "isofp/one_dim.hpp"
#include "isofp/weight_function.hpp"

#include <functional>
#include <optional>
#include <string>

namespace isofp {

// K(rho) = int_{rho^2}^{i+^2} f(sqrt y) dy / (2 f(rho)), by quadrature.
double weight_from_density_kok(const IsotropicDensity& d, double rho, const Integrator& integ = {});
WeightFunction kok_weight(const IsotropicDensity& d, const Integrator& integ = {});

// P(x) for a 1-D density with mean m:
//   int_lo^x (m - y) f(y) dy / f(x)   for x <= m,
//   int_x^hi (y - m) f(y) dy / f(x)   for x >  m.
double p_weight_1d(const OneDimDensity& f, double m, double x, const Integrator& integ = {});
WeightFunction p_weight(const OneDimDensity& f, const Integrator& integ = {});

// Diffusion coefficient whose steady state is d: closed form when known,
// the P formula around the mean for the half-line entry, else K-ok.
WeightFunction equilibrium_weight(const IsotropicDensity& d);

// |d/drho[K f] + (rho - m) f| / (f max(|rho - m|, 1)) by a 4th-order
// centered difference.
double steady_state_residual(const IsotropicDensity& d, const WeightFunction& K, double rho);

struct PQPair {
  std::function<double(double)> P, Q, Qprime;
  std::optional<double> alpha;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  // Q(lo+) = 0 is admissible (radial pairs in n = 1, even extension).
  bool left_zero_ok = false;
  std::string description;
};

// Q' from a 4th-order centered difference with step 1e-5 relative.
PQPair make_pq(std::function<double(double)> P, std::function<double(double)> Q, double lo, double hi,
               std::string description);
PQPair cauchy_pq(double beta, int n, double alpha);
PQPair barenblatt_pq(double p, int n, double a, double alpha);
PQPair gaussian_radial_pq(double sigma, int n);

// w = P/Q'. Rejects the pair when P <= 0 or Q' <= 0 on the validation grid or
// the boundary signs of Q are wrong.
WeightFunction w_from_pq(const PQPair& pq, int validation_points = 400);

// Maximizer of h over (1/2, 1]; coefficient = 1/(2 h(alpha)).
struct AlphaOptimum {
  double alpha;
  double h;
  double coefficient;
};

// h(alpha) = (2 alpha - 1)(beta* - alpha), beta* = beta - (n-1)/2.
double cauchy_h(double beta, int n, double alpha);
AlphaOptimum cauchy_alpha_closed(double beta, int n);
// h(alpha) = (2 alpha - 1)(alpha + b + n - 1), b = 1/(p-1).
double barenblatt_h(double p, int n, double alpha);
AlphaOptimum barenblatt_alpha_closed(double p, int n);
// Golden-section maximization of h on (1/2, 1], compared against alpha = 1.
AlphaOptimum golden_alpha(const std::function<double(double)>& h, double tol = 1e-13);

// c (1+rho^2), c = (beta-n/2)^-2 or 1/(2 beta - n - 1); needs beta > (n+1)/2.
WeightFunction optimal_cauchy_weight(double beta, int n);
// (p-1)/(2(n(p-1)+1)) (a^2 - rho^2).
WeightFunction optimal_barenblatt_weight(double p, int n, double a);
// rho/beta: exact P for the Gamma(n, beta) radial law (mean n/beta).
WeightFunction gamma_radial_weight(double beta);

// Weight of the i-th hyperspherical angle; exactly pi t - t^2/2 for the
// azimuth i = n-1.
double angular_weight(int i, int n, double theta, const Integrator& integ = {});
WeightFunction angular_weight_function(int i, int n);

// 1-D weight for the radial law used in the W* construction.
WeightFunction radial_weight(const IsotropicDensity& d);

// max{w(rho), pi^2 rho^2 / 2}.
WeightFunction composite_wstar(const IsotropicDensity& d, const WeightFunction& w_radial);

// Smallest R with (n-1) K(r)/r^2 <= 1/2 for r in [R, i+). 0 for n = 1.
double critical_radius_b1(const IsotropicDensity& d, const WeightFunction& K);

// max(w, rho^2) on [0, R], K beyond.
WeightFunction hybrid_weight(const WeightFunction& w, const WeightFunction& K, double R);

}  // namespace isofp
