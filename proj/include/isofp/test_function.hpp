#pragma once

#include "isofp/common.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace isofp {

enum class SupportKind { full, outside_ball, inside_ball };

struct Support {
  SupportKind kind = SupportKind::full;
  double radius = 0.0;
};

std::string support_name(const Support& s);

// Smooth scalar phi on R^n with gradient access. `growth` is the polynomial
// order of |phi| at infinity (0 when bounded); checks use it to skip members
// whose moments do not exist under a heavy-tailed density.
class TestFunction {
 public:
  // Returns phi(x) and writes the gradient into grad (resized by caller).
  using Fn = std::function<double(const Point& x, Point& grad)>;

  TestFunction(std::string id, int dim, Fn fn, std::vector<std::string> tags = {},
               Support support = {}, bool bounded = true, double growth = 0.0,
               std::vector<double> radial_breaks = {});

  double operator()(const Point& x) const {
    Point g(x.size());
    return fn_(x, g);
  }
  double eval(const Point& x, Point& grad) const { return fn_(x, grad); }
  Point gradient(const Point& x) const {
    Point g(x.size());
    fn_(x, g);
    return g;
  }

  const std::string& id() const { return id_; }
  int dim() const { return dim_; }
  const std::vector<std::string>& tags() const { return tags_; }
  bool has_tag(const std::string& t) const;
  const Support& support() const { return support_; }
  bool bounded() const { return bounded_; }
  double growth() const { return growth_; }
  // Radii where phi is only C^2 (support edges); used as quadrature breaks.
  const std::vector<double>& radial_breaks() const { return breaks_; }

  // s phi + c.
  TestFunction affine(double s, double c) const;

 private:
  std::string id_;
  int dim_;
  Fn fn_;
  std::vector<std::string> tags_;
  Support support_;
  bool bounded_;
  double growth_;
  std::vector<double> breaks_;
};

struct SelfTestResult {
  bool ok = true;
  double max_error = 0.0;
  std::string message;
};

// Centered differences against grad at random probes: |fd - g| <= tol *
// max(|g|_inf, 1) per component. Probes avoid a 0.05-ball around the origin
// where angular members are singular.
SelfTestResult gradient_self_test(const TestFunction& phi, std::uint64_t seed, int probes = 24,
                                  double tol = 1e-6);
// phi and grad vanish where the support flag says they do.
SelfTestResult support_self_test(const TestFunction& phi, std::uint64_t seed, int probes = 64);

struct TestCorpus {
  std::uint64_t seed = 0;
  std::vector<TestFunction> members;
};

// C^2 quintic smoothstep on [0, 1].
double smoothstep5(double t);
double smoothstep5_deriv(double t);

// Polynomials up to degree 3, polynomial x Gaussian bumps, radial and
// angular factors, compact quintic bumps, 10 seeded random mixtures.
TestCorpus default_corpus(int n, std::uint64_t seed);
// Radial bands inside (R, outer) times angular patterns; vanish on |x| <= R.
TestCorpus outside_ball_corpus(int n, double R, double outer, std::uint64_t seed);
// Bounded members with bounded gradients, plus bands inside, across and
// beyond |x| = R.
TestCorpus bounded_corpus(int n, double R, std::uint64_t seed);

// Building blocks, exposed for targeted tests.
TestFunction linear_function(int n, int k);
TestFunction radial_function(int n, std::string id, std::function<double(double)> a,
                             std::function<double(double)> da, std::vector<std::string> tags,
                             bool bounded, double growth, Support support = {},
                             std::vector<double> breaks = {});
// A(rho) Y(u), u = x/|x|; dY is the ambient gradient of Y.
TestFunction band_times_angular(int n, std::string id, double r0, double r1, double r2, double r3,
                                std::function<double(const Point&)> Y,
                                std::function<Point(const Point&)> dY, std::vector<std::string> tags);

}  // namespace isofp
