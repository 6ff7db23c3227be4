#pragma once

#include "isofp/density.hpp"
#include "isofp/functionals.hpp"
#include "isofp/one_dim.hpp"
#include "isofp/test_function.hpp"
#include "isofp/weight_function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace isofp {

enum class Theorem { poincare_1d, product, isotropic_wstar, refined_outside_ball, hybrid, gaussian_anisotropic };
enum class Verdict { pass, fail, inconclusive, rejected };

const char* theorem_name(Theorem t);
std::optional<Theorem> parse_theorem(const std::string& s);
const char* verdict_name(Verdict v);

struct InequalityReport {
  Theorem theorem = Theorem::poincare_1d;
  std::string density;
  std::string weight;
  std::string witness;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  // Spread of the ratio between two quadrature resolutions, where one is used.
  double ratio_error = 0.0;
  double tol = 1e-6;
  Verdict verdict = Verdict::pass;
  std::string note;

  // isotropic_wstar: the radial and angular addends of the split bound.
  std::optional<double> radial_part, angular_part;
  // hybrid
  std::optional<double> volume_term, surface_term, c_mult, c_r, empirical_constant;

  bool passed() const { return verdict == Verdict::pass; }
};

struct CheckOptions {
  double tol = 1e-6;
  Integrator integ;
  int grid_order = 32;
  // Gauss nodes per axis for tensor checks; 0 picks by dimension. The rule
  // with tensor_nodes + 8 nodes serves as the error estimate.
  int tensor_nodes = 0;
};

// ratio = lhs/rhs with 0/0 = 0 and x/0 = inf; verdict from tol and ratio_error.
void finalize(InequalityReport& r);

// Var[phi] <= E[w phi'^2] for a density on an interval; the corpus must be
// one-dimensional.
std::vector<InequalityReport> check_poincare_1d(const OneDimDensity& f, const WeightFunction& w,
                                                const TestCorpus& corpus, const CheckOptions& opt = {});

// Var[phi] <= sum_i E[w_i(x_i) (d_i phi)^2] for independent coordinates,
// by tensor Gauss rules. More than 4 factors: every report is rejected.
std::vector<InequalityReport> check_product(const std::vector<OneDimDensity>& factors,
                                            const std::vector<WeightFunction>& weights,
                                            const TestCorpus& corpus, const CheckOptions& opt = {});

// Same bound for the spherical factorization f(rho) f_1(theta_1) ... of an
// isotropic density, with the radial weight and the exact angular weights.
std::vector<InequalityReport> check_product_spherical(const IsotropicDensity& d, const TestCorpus& corpus,
                                                      const CheckOptions& opt = {});

// Var[phi] <= E[W*(|X|) |grad phi|^2], W* = max(w, pi^2 rho^2 / 2) with w
// the radial weight. n = 1 is rejected.
std::vector<InequalityReport> check_isotropic_wstar(const IsotropicDensity& d, const TestCorpus& corpus,
                                                    const CheckOptions& opt = {},
                                                    std::optional<WeightFunction> wstar = std::nullopt);

// Var[phi] <= 2 E[K |grad phi|^2] for phi supported outside B_R. Members
// whose support is not outside B_R, or whose support flag fails the
// self-test, are rejected.
std::vector<InequalityReport> check_refined_outside_ball(const IsotropicDensity& d, const WeightFunction& K,
                                                         double R, const TestCorpus& corpus,
                                                         const CheckOptions& opt = {});

// c(R) = R^3 / (R^n f(R)).
double hybrid_c_of_r(const IsotropicDensity& d, double R);

// Var[phi] <= C (E[W |grad phi|^2] + c(R) f(R) R^{n-1} int |grad phi(R u)|^2 du)
// for bounded phi. Records the smallest C that works.
std::vector<InequalityReport> check_hybrid(const IsotropicDensity& d, const WeightFunction& W, double R,
                                           double c_mult, double c_r, const TestCorpus& corpus,
                                           const CheckOptions& opt = {});

// Var[phi] <= lambda_max(V) E|grad phi|^2 under N(u, V), integrated in
// whitened coordinates x = u + H Lambda^{1/2} z.
std::vector<InequalityReport> check_gaussian_anisotropic(const Eigen::MatrixXd& V, const Eigen::VectorXd& u,
                                                         const TestCorpus& corpus, const CheckOptions& opt = {});

}  // namespace isofp
