#pragma once

#include "isofp/density.hpp"
#include "isofp/weight_function.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace isofp {

// Cells on (0, r_max). volumes[i] = measure * int_cell rho^{n-1} drho.
struct RadialGrid {
  int n = 1;
  double measure = 2.0;
  Eigen::VectorXd edges, centers, volumes;
  int cells() const { return static_cast<int>(centers.size()); }
};

// Radius beyond which the equilibrium carries less than tail_mass.
double truncation_radius(const IsotropicDensity& d, double tail_mass = 1e-12);
RadialGrid uniform_grid(const IsotropicDensity& d, int cells, double r_max);

struct GridSpec {
  int cells = 400;
  double r_max = 0.0;  // 0: support radius, or truncation_radius when infinite
  double tail_mass = 1e-12;
};

// Cell-averaged density and time.
struct FPState {
  Eigen::VectorXd values;
  double t = 0.0;
  double mass = 0.0;
};

enum class ThetaKind { chi2, entropy, hellinger2 };
const char* theta_name(ThetaKind k);

enum class Scheme { implicit, explicit_euler };

enum class Perturbation { tanh, bump, cosine };
const char* perturbation_name(Perturbation p);
Perturbation parse_perturbation(const std::string& s);

struct DecayTrace {
  std::vector<double> times, theta_chi2, theta_entropy, hellinger2, dissipation_chi2, dissipation_entropy, mass,
      l1;
  double fitted_rate = 0.0;  // chi-square, see fit_decay_rate
  double entropy0 = 0.0;
  int size() const { return static_cast<int>(times.size()); }
};

struct EvolveOptions {
  double t_final = 10.0;
  double dt = 1e-2;
  int sample_every = 1;
  Scheme scheme = Scheme::implicit;
};

// Finite volumes in F = f / f_inf: the flux through a face is
// a (F_{i+1} - F_i), a = measure r^{n-1} K f_inf / (c_{i+1} - c_i), zero at
// both ends, so the discretized equilibrium is an exact steady state.
class Solver {
 public:
  Solver(const IsotropicDensity& d, WeightFunction K, GridSpec spec = {});

  const IsotropicDensity& density() const { return d_; }
  const WeightFunction& weight() const { return K_; }
  const RadialGrid& grid() const { return grid_; }
  // Equilibrium cell masses, summing to 1.
  const Eigen::VectorXd& equilibrium_mass() const { return minf_; }
  // Interior face coefficients a_{i+1/2}, i = 0..M-2.
  const Eigen::VectorXd& face_coefficients() const { return a_; }

  FPState equilibrium_state() const;
  // f0 = f_inf (1 + eps g) with mean-zero bounded g; needs |eps| <= 0.2.
  FPState perturbed_state(Perturbation p, double eps) const;
  FPState state_from_ratio(const Eigen::VectorXd& F, double t = 0.0) const;
  Eigen::VectorXd ratio(const FPState& s) const;

  // max_i |(A 1)_i| / max a; zero up to rounding.
  double steady_flux_residual() const;
  // Largest stable explicit step.
  double max_explicit_dt() const;

  void step(FPState& s, double dt, Scheme scheme = Scheme::implicit) const;
  DecayTrace evolve(FPState s, const EvolveOptions& opt) const;

  double theta(const FPState& s, ThetaKind k) const;
  // sum over faces of a (dF)^2 phi''(F_face), F_face = ((sqrt F_i + sqrt F_j)/2)^2.
  double dissipation(const FPState& s, ThetaKind k) const;
  // 4 sum a (d sqrt F)^2, the square-root form of the entropy dissipation.
  double entropy_dissipation_sqrt_form(const FPState& s) const;
  // Custom convex phi with phi''.
  double theta_custom(const FPState& s, const std::function<double(double)>& phi) const;
  double l1_distance(const FPState& s) const;

 private:
  void apply(const Eigen::VectorXd& F, Eigen::VectorXd& out) const;

  IsotropicDensity d_;
  WeightFunction K_;
  RadialGrid grid_;
  Eigen::VectorXd minf_, a_;
};

// OLS slope of -log theta over samples with theta in [lo, hi] * theta_0.
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& theta, double lo = 1e-8,
                      double hi = 1e-1);

struct Thm2Report {
  bool monotone = true;
  bool tail_decreasing = true;   // t d_H^2 on the final third
  bool l1_bound = true;          // |f - f_inf|_1 <= 2 d_H per sample
  double integral = 0.0;         // int_0^inf d_H^2, trapezoid plus exponential tail
  double bound = 0.0;            // (c/2) H(f0, f_inf)
  bool integral_ok = true;       // integral <= bound * (1 + slack)
  bool inconclusive = false;
  std::string note;
  bool passed() const { return !inconclusive && monotone && tail_decreasing && l1_bound && integral_ok; }
};

Thm2Report verify_thm2_hellinger(const DecayTrace& trace, double c, double slack = 0.05);

}  // namespace isofp
