#include "isofp/inequality.hpp"
#include "isofp/weights.hpp"

#include <gtest/gtest.h>

#include "support.hpp"

using namespace isofp;
using isofp::testing::member;
using isofp::testing::only;

namespace {

const InequalityReport& find(const std::vector<InequalityReport>& v, const std::string& witness) {
  for (const auto& r : v)
    if (r.witness == witness) return r;
  throw std::out_of_range("no report for " + witness);
}

void expect_all_pass(const std::vector<InequalityReport>& v, const std::string& what, double tol = 1e-6) {
  int ran = 0;
  for (const auto& r : v) {
    if (r.verdict == Verdict::rejected) continue;
    ++ran;
    EXPECT_EQ(r.verdict, Verdict::pass) << what << " " << r.witness << " ratio " << r.ratio << " " << r.note;
    EXPECT_LE(r.ratio, 1 + tol) << what << " " << r.witness;
  }
  EXPECT_GT(ran, 0) << what;
}

TestFunction one_dim(std::string id, std::function<double(double)> f, std::function<double(double)> df) {
  return TestFunction(std::move(id), 1, [f, df](const Point& x, Point& g) {
    g.resize(1);
    g(0) = df(x(0));
    return f(x(0));
  });
}

TestFunction product_x1x2() {
  return TestFunction("x1x2", 2, [](const Point& x, Point& g) {
    g.resize(2);
    g << x(1), x(0);
    return x(0) * x(1);
  }, {}, {}, false, 2);
}

WeightFunction constant(double c) {
  return WeightFunction([c](double) { return c; }, {}, -INFINITY, INFINITY, "const");
}

// A slice of the corpus keeps the heavier n = 3 checks quick.
TestCorpus slice(const TestCorpus& c, int stride) {
  TestCorpus s;
  s.seed = c.seed;
  for (size_t k = 0; k < c.members.size(); k += stride) s.members.push_back(c.members[k]);
  return s;
}

}  // namespace

TEST(Poincare1d, GaussianLinearIsSharp) {
  const auto v = check_poincare_1d(normal_density(1.0), constant(1.0), only({linear_function(1, 0)}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NEAR(v[0].ratio, 1.0, 1e-9);
  EXPECT_EQ(v[0].verdict, Verdict::pass);
}

TEST(Poincare1d, GammaRadialCorpus) {
  const auto v = check_poincare_1d(gamma_density(3.0, 1.0), gamma_radial_weight(1.0), default_corpus(1, 7));
  EXPECT_GE(v.size(), 40u);
  expect_all_pass(v, "gamma(3,1)");
}

TEST(Poincare1d, AzimuthCosine) {
  const auto v = check_poincare_1d(angular_density(2, 3), angular_weight_function(2, 3),
                                   only({one_dim("cos", [](double t) { return std::cos(t); },
                                                 [](double t) { return -std::sin(t); })}));
  expect_all_pass(v, "azimuth");
}

TEST(Poincare1d, RejectsMultidimensionalAndHeavyMoments) {
  const auto v = check_poincare_1d(line_density(parse_density("cauchy:beta=2,n=1")), equilibrium_weight(parse_density("cauchy:beta=2,n=1")),
                                   only({linear_function(2, 0), member(default_corpus(1, 1), "quad_x0^2")}));
  for (const auto& r : v) EXPECT_EQ(r.verdict, Verdict::rejected) << r.witness;
}

TEST(Product, TwoNormalsCrossTerm) {
  const std::vector<OneDimDensity> f(2, normal_density(1.0));
  const std::vector<WeightFunction> w(2, constant(1.0));
  const auto v = check_product(f, w, only({product_x1x2()}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NEAR(v[0].lhs, 1.0, 1e-10);
  EXPECT_NEAR(v[0].rhs, 2.0, 1e-10);
  EXPECT_NEAR(v[0].ratio, 0.5, 1e-10);
}

TEST(Product, SingleCoordinateReducesToOneDim) {
  const OneDimDensity u = uniform_density(-1.0, 2.0);
  const std::vector<OneDimDensity> f = {u, normal_density(3.0)};
  const std::vector<WeightFunction> w = {p_weight(u), constant(3.0)};
  const TestFunction phi("sin_x0", 2, [](const Point& x, Point& g) {
    g.resize(2);
    g << std::cos(x(0)), 0.0;
    return std::sin(x(0));
  });
  const auto v2 = check_product(f, w, only({phi}));
  const auto v1 = check_poincare_1d(u, w[0], only({one_dim("sin_x0", [](double t) { return std::sin(t); },
                                                           [](double t) { return std::cos(t); })}));
  EXPECT_NEAR(v2[0].lhs, v1[0].lhs, 1e-10);
  EXPECT_NEAR(v2[0].rhs, v1[0].rhs, 1e-10);
}

TEST(Product, CartesianCorpusAndRejections) {
  const std::vector<OneDimDensity> f = {normal_density(1.0), uniform_density(-1.0, 2.0)};
  const std::vector<WeightFunction> w = {constant(1.0), p_weight(f[1])};
  expect_all_pass(check_product(f, w, default_corpus(2, 3)), "cartesian n=2");
  const auto big = check_product(std::vector<OneDimDensity>(5, normal_density(1.0)),
                                 std::vector<WeightFunction>(5, constant(1.0)), only({linear_function(5, 0)}));
  EXPECT_EQ(big[0].verdict, Verdict::rejected);
}

TEST(Product, SphericalFactorization) {
  const auto d = parse_density("gaussian:sigma=1,n=3");
  expect_all_pass(check_product_spherical(d, slice(default_corpus(3, 7), 3)), "spherical n=3");
}

TEST(IsotropicWStar, CauchyBetaFourInThreeDimensions) {
  const auto d = parse_density("cauchy:beta=4,n=3");
  const auto v = check_isotropic_wstar(d, slice(default_corpus(3, 7), 3));
  expect_all_pass(v, "cauchy W*");
  // phi = const: both sides vanish, ratio 0.
  const auto c = check_isotropic_wstar(d, only({TestFunction("one", 3, [](const Point& x, Point& g) {
                                          g.setZero(x.size());
                                          return 1.0;
                                        })}));
  EXPECT_EQ(c[0].ratio, 0.0);
  EXPECT_EQ(c[0].verdict, Verdict::pass);
}

TEST(IsotropicWStar, RadialBumpGaussian) {
  const auto d = parse_density("gaussian:sigma=1,n=2");
  expect_all_pass(check_isotropic_wstar(d, only({member(default_corpus(2, 1), "rad_lin_bump")})), "bump");
  EXPECT_EQ(check_isotropic_wstar(parse_density("gaussian:sigma=1,n=1"), only({linear_function(1, 0)}))[0].verdict,
            Verdict::rejected);
}

// Property: an inflated weight never lowers the right-hand side.
TEST(IsotropicWStarProperty, Dominance) {
  const auto d = parse_density("exponential:beta=1,n=2");
  const auto corpus = slice(default_corpus(2, 9), 2);
  const auto ws = composite_wstar(d, radial_weight(d));
  const auto a = check_isotropic_wstar(d, corpus, {}, ws);
  const auto b = check_isotropic_wstar(d, corpus, {}, ws.scaled(2.0));
  ASSERT_EQ(a.size(), b.size());
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k].verdict == Verdict::rejected) continue;
    EXPECT_GE(b[k].rhs, a[k].rhs) << a[k].witness;
    EXPECT_NEAR(b[k].rhs, 2 * a[k].rhs, 1e-9 * std::max(1.0, b[k].rhs)) << a[k].witness;
  }
}

// Property: s phi + c leaves the ratio unchanged.
TEST(InequalityProperty, ScaleInvariance) {
  const auto d = parse_density("barenblatt:p=2,n=2");
  const auto corpus = slice(default_corpus(2, 4), 6);
  TestCorpus scaled;
  for (const auto& m : corpus.members) scaled.members.push_back(m.affine(-3.0, 11.0));
  const auto a = check_isotropic_wstar(d, corpus);
  const auto b = check_isotropic_wstar(d, scaled);
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k].verdict == Verdict::rejected) continue;
    EXPECT_NEAR(a[k].ratio, b[k].ratio, 1e-9) << a[k].witness;
  }
}

TEST(Refined, GaussianRadialBump) {
  const auto d = parse_density("gaussian:sigma=1,n=3");
  const auto K = equilibrium_weight(d);
  const auto bump = band_times_angular(3, "bump_2.5_4", 2.5, 2.8, 3.6, 4.0, [](const Point&) { return 1.0; },
                                       [](const Point& u) { return Point(Point::Zero(u.size())); }, {"bump"});
  expect_all_pass(check_refined_outside_ball(d, K, 2.0, only({bump})), "gaussian refined");
}

TEST(Refined, ExponentialAndBarenblatt) {
  for (const char* s : {"exponential:beta=1,n=2", "barenblatt:a=1,p=2,n=2"}) {
    const auto d = parse_density(s);
    const auto K = equilibrium_weight(d);
    const double R = critical_radius_b1(d, K);
    const double outer = std::isinf(d.support_radius()) ? R + 3 : d.support_radius();
    expect_all_pass(check_refined_outside_ball(d, K, R, outside_ball_corpus(2, R, outer, 7)), s);
  }
}

TEST(Refined, GuardsRejectBadSupportAndRadius) {
  const auto d = parse_density("gaussian:sigma=1,n=3");
  const auto K = equilibrium_weight(d);
  // Supported from 1.0 outward: not outside B_2.
  const auto early = band_times_angular(3, "early", 1.0, 1.5, 2.5, 3.0, [](const Point&) { return 1.0; },
                                        [](const Point& u) { return Point(Point::Zero(u.size())); }, {"bump"});
  EXPECT_EQ(check_refined_outside_ball(d, K, 2.0, only({early}))[0].verdict, Verdict::rejected);
  EXPECT_EQ(check_refined_outside_ball(d, K, 2.0, only({linear_function(3, 0)}))[0].verdict, Verdict::rejected);
  // R below the critical radius.
  const auto late = band_times_angular(3, "late", 1.2, 1.5, 2.5, 3.0, [](const Point&) { return 1.0; },
                                       [](const Point& u) { return Point(Point::Zero(u.size())); }, {"bump"});
  EXPECT_EQ(check_refined_outside_ball(d, K, 1.0, only({late}))[0].verdict, Verdict::rejected);
}

TEST(Hybrid, DecompositionAndEmpiricalConstant) {
  const auto d = parse_density("exponential:beta=1,n=2");
  const auto K = equilibrium_weight(d);
  const double R = critical_radius_b1(d, K);
  const auto W = hybrid_weight(radial_weight(d), K, R);
  const double cR = hybrid_c_of_r(d, R);
  EXPECT_NEAR(cR, R * R * R / (R * R * d(R)), 1e-12 * cR);
  const auto v = check_hybrid(d, W, R, 4.0, cR, bounded_corpus(2, R, 7));
  expect_all_pass(v, "hybrid");
  for (const auto& r : v) {
    if (r.verdict == Verdict::rejected) continue;
    ASSERT_TRUE(r.empirical_constant.has_value());
    EXPECT_TRUE(std::isfinite(*r.empirical_constant)) << r.witness;
    if (r.witness.rfind("hy_in_", 0) == 0 || r.witness.rfind("hy_tail_", 0) == 0)
      EXPECT_EQ(*r.surface_term, 0.0) << r.witness;
  }
  // Unbounded members are outside the hypothesis.
  EXPECT_EQ(check_hybrid(d, W, R, 4.0, cR, only({linear_function(2, 0)}))[0].verdict, Verdict::rejected);
}

TEST(Hybrid, GaussianCofR) {
  const auto d = parse_density("gaussian:sigma=1,n=2");
  EXPECT_NEAR(hybrid_c_of_r(d, std::sqrt(2.0)), 24.1540159135332379989138825662, 1e-9);
}

TEST(Anisotropic, SharpExamples) {
  const auto v = check_gaussian_anisotropic(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2),
                                            only({linear_function(2, 0)}));
  EXPECT_NEAR(v[0].lhs, 1.0, 1e-12);
  EXPECT_NEAR(v[0].rhs, 1.0, 1e-12);
  Eigen::MatrixXd D(2, 2);
  D << 1, 0, 0, 4;
  const auto w = check_gaussian_anisotropic(D, Eigen::VectorXd::Zero(2), only({linear_function(2, 1)}));
  EXPECT_NEAR(w[0].lhs, 4.0, 1e-12);
  EXPECT_NEAR(w[0].rhs, 4.0, 1e-12);
  EXPECT_NEAR(w[0].ratio, 1.0, 1e-12);
}

TEST(Anisotropic, RotatedCovarianceCorpus) {
  const double a = kPi / 6;
  Eigen::Matrix2d R;
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const Eigen::MatrixXd V = R * Eigen::Vector2d(1, 4).asDiagonal() * R.transpose();
  expect_all_pass(check_gaussian_anisotropic(V, Eigen::Vector2d(0.3, -0.2), default_corpus(2, 7)), "rotated");
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(check_gaussian_anisotropic(bad, Eigen::VectorXd::Zero(2), default_corpus(2, 7)), DomainError);
}

TEST(Reports, Finalize) {
  InequalityReport r;
  r.lhs = 0;
  r.rhs = 0;
  finalize(r);
  EXPECT_EQ(r.ratio, 0.0);
  EXPECT_TRUE(r.passed());
  r.lhs = 1;
  r.rhs = 0;
  finalize(r);
  EXPECT_TRUE(std::isinf(r.ratio));
  EXPECT_EQ(r.verdict, Verdict::fail);
  r.lhs = 1;
  r.rhs = 1;
  r.ratio_error = 1e-3;
  finalize(r);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
}

TEST(Reports, Names) {
  EXPECT_EQ(*parse_theorem("isotropic_Wstar"), Theorem::isotropic_wstar);
  EXPECT_FALSE(parse_theorem("refined").has_value());
  EXPECT_STREQ(theorem_name(Theorem::refined_outside_ball), "refined_outside_ball");
}
