#include "isofp/inequality.hpp"

#include "isofp/weights.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>
#include <limits>

namespace isofp {

const char* theorem_name(Theorem t) {
  switch (t) {
    case Theorem::poincare_1d: return "poincare_1d";
    case Theorem::product: return "product";
    case Theorem::isotropic_wstar: return "isotropic_Wstar";
    case Theorem::refined_outside_ball: return "refined_outside_ball";
    case Theorem::hybrid: return "hybrid";
    case Theorem::gaussian_anisotropic: return "gaussian_anisotropic";
  }
  return "?";
}

std::optional<Theorem> parse_theorem(const std::string& s) {
  for (Theorem t : {Theorem::poincare_1d, Theorem::product, Theorem::isotropic_wstar, Theorem::refined_outside_ball,
                    Theorem::hybrid, Theorem::gaussian_anisotropic}) {
    if (s == theorem_name(t)) return t;
  }
  if (s == "isotropic_wstar") return Theorem::isotropic_wstar;
  return std::nullopt;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::rejected: return "rejected";
  }
  return "?";
}

void finalize(InequalityReport& r) {
  if (r.verdict == Verdict::rejected || r.verdict == Verdict::inconclusive) return;
  constexpr double tiny = 1e-14;
  if (r.rhs <= tiny && r.lhs <= tiny) {
    r.ratio = 0.0;
  } else if (r.rhs <= 0.0) {
    r.ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ratio = r.lhs / r.rhs;
  }
  const double bound = 1.0 + r.tol;
  if (r.ratio <= bound) {
    r.verdict = (r.ratio + r.ratio_error <= bound) ? Verdict::pass : Verdict::inconclusive;
  } else {
    r.verdict = (r.ratio - r.ratio_error > bound) ? Verdict::fail : Verdict::inconclusive;
  }
  if (r.verdict == Verdict::inconclusive && r.note.empty()) r.note = "quadrature spread straddles the bound";
}

namespace {

InequalityReport base_report(Theorem t, std::string density, std::string weight, const TestFunction& phi,
                             const CheckOptions& opt) {
  InequalityReport r;
  r.theorem = t;
  r.density = std::move(density);
  r.weight = std::move(weight);
  r.witness = phi.id();
  r.tol = opt.tol;
  return r;
}

InequalityReport rejected(InequalityReport r, std::string why) {
  r.verdict = Verdict::rejected;
  r.ratio = std::numeric_limits<double>::quiet_NaN();
  r.note = std::move(why);
  return r;
}

InequalityReport inconclusive(InequalityReport r, const std::exception& e) {
  r.verdict = Verdict::inconclusive;
  r.ratio = std::numeric_limits<double>::quiet_NaN();
  r.note = e.what();
  return r;
}

// phi^2 and w |grad phi|^2 grow like rho^(2 growth) when w grows at most
// like rho^2; ask for one spare moment so the tail quadrature converges.
bool moments_ok(const TestFunction& phi, double max_moment) {
  return phi.growth() == 0.0 || 2.0 * phi.growth() + 1.0 <= max_moment;
}

std::string moment_note(const TestFunction& phi, double max_moment) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "growth %g needs moments beyond %g", phi.growth(), max_moment);
  return buf;
}

// Angular members have |grad phi| ~ 1/rho; in n = 2 the Dirichlet form then
// diverges unless the weight vanishes like rho^2 at the origin.
bool origin_divergent(const TestFunction& phi, int n, const std::function<double(double)>& w_at_origin) {
  if (!phi.has_tag("origin_singular") || n >= 3) return false;
  return w_at_origin(1e-6) > 1e-8;
}

void sort_reports(std::vector<InequalityReport>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const InequalityReport& a, const InequalityReport& b) { return a.witness < b.witness; });
}

int default_tensor_nodes(int n) {
  switch (n) {
    case 1: return 80;
    case 2: return 64;
    case 3: return 36;
    default: return 18;
  }
}

struct TensorMoments {
  double variance = 0.0;
  double dirichlet = 0.0;
};

// Tensor product of per-axis rules; ev(z, idx, phi, dir) fills phi(z) and
// the Dirichlet integrand at node z with per-axis indices idx.
template <class Ev>
TensorMoments tensor_moments(const std::vector<GaussRule<double>>& rules, Ev&& ev) {
  const int n = static_cast<int>(rules.size());
  std::vector<int> idx(n, 0);
  std::vector<double> vals, wts;
  double dir = 0.0;
  Point z(n);
  while (true) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      z(k) = rules[k].nodes(idx[k]);
      w *= rules[k].weights(idx[k]);
    }
    double v, di;
    ev(z, idx, v, di);
    vals.push_back(v);
    wts.push_back(w);
    dir += w * di;
    int k = n - 1;
    while (k >= 0 && ++idx[k] == rules[k].size()) idx[k--] = 0;
    if (k < 0) break;
  }
  double mass = 0.0, mean = 0.0;
  for (size_t i = 0; i < vals.size(); ++i) {
    mass += wts[i];
    mean += wts[i] * vals[i];
  }
  mean /= mass;
  double var = 0.0;
  for (size_t i = 0; i < vals.size(); ++i) var += wts[i] * (vals[i] - mean) * (vals[i] - mean);
  return {std::max(var / mass, 0.0), dir / mass};
}

// Ratio at two resolutions; the spread is the error estimate.
using Rules = std::vector<GaussRule<double>>;

void tensor_finish(InequalityReport& r, const TensorMoments& a, const TensorMoments& b) {
  r.lhs = b.variance;
  r.rhs = b.dirichlet;
  auto ratio = [](const TensorMoments& m) {
    if (m.dirichlet <= 1e-14 && m.variance <= 1e-14) return 0.0;
    return m.variance / m.dirichlet;
  };
  r.ratio_error = std::abs(ratio(a) - ratio(b));
  if (!std::isfinite(r.ratio_error)) r.ratio_error = 0.0;
  finalize(r);
}

double one_dim_eval(const TestFunction& phi, double x, double& dphi) {
  Point p(1), g(1);
  p(0) = x;
  const double v = phi.eval(p, g);
  dphi = g(0);
  return v;
}

}  // namespace

std::vector<InequalityReport> check_poincare_1d(const OneDimDensity& f, const WeightFunction& w,
                                                const TestCorpus& corpus, const CheckOptions& opt) {
  std::vector<InequalityReport> out;
  for (const TestFunction& phi : corpus.members) {
    InequalityReport r = base_report(Theorem::poincare_1d, f.name, w.description(), phi, opt);
    if (phi.dim() != 1) {
      out.push_back(rejected(r, "corpus member is not one-dimensional"));
      continue;
    }
    if (!moments_ok(phi, f.max_moment)) {
      out.push_back(rejected(r, moment_note(phi, f.max_moment)));
      continue;
    }
    std::vector<double> breaks;
    for (double b : phi.radial_breaks()) {
      breaks.push_back(b);
      breaks.push_back(-b);
    }
    try {
      const OneDimMoments m = one_dim_moments(
          f,
          [&](double x) {
            double d;
            return one_dim_eval(phi, x, d);
          },
          [&](double x) {
            double d;
            one_dim_eval(phi, x, d);
            return d;
          },
          w, opt.integ, breaks);
      r.lhs = m.variance;
      r.rhs = m.dirichlet;
      finalize(r);
      out.push_back(r);
    } catch (const NumericalError& e) {
      out.push_back(inconclusive(r, e));
    }
  }
  sort_reports(out);
  return out;
}

std::vector<InequalityReport> check_product(const std::vector<OneDimDensity>& factors,
                                            const std::vector<WeightFunction>& weights,
                                            const TestCorpus& corpus, const CheckOptions& opt) {
  if (factors.size() != weights.size()) throw DomainError("check_product: one weight per factor");
  const int n = static_cast<int>(factors.size());
  std::string label, wlabel;
  double max_moment = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    label += (k ? " x " : "") + factors[k].name;
    wlabel += (k ? " + " : "") + weights[k].description();
    max_moment = std::min(max_moment, factors[k].max_moment);
  }
  const int nodes = opt.tensor_nodes > 0 ? opt.tensor_nodes : default_tensor_nodes(n);
  // Weights at the nodes are computed once: P-formula weights cost a
  // quadrature per evaluation.
  Rules coarse, fine;
  std::vector<std::vector<double>> wc, wf;
  if (n >= 1 && n <= 4) {
    for (int k = 0; k < n; ++k) {
      coarse.push_back(gauss_rule(factors[k], nodes));
      fine.push_back(gauss_rule(factors[k], nodes + 8));
      auto at = [&](const GaussRule<double>& rule) {
        std::vector<double> v(rule.size());
        for (int i = 0; i < rule.size(); ++i) v[i] = weights[k](rule.nodes(i));
        return v;
      };
      wc.push_back(at(coarse.back()));
      wf.push_back(at(fine.back()));
    }
  }
  std::vector<InequalityReport> out;
  for (const TestFunction& phi : corpus.members) {
    InequalityReport r = base_report(Theorem::product, label, wlabel, phi, opt);
    if (n < 1 || n > 4) {
      out.push_back(rejected(r, "tensor quadrature supports 1 to 4 factors"));
      continue;
    }
    if (phi.dim() != n) {
      out.push_back(rejected(r, "corpus dimension differs from the number of factors"));
      continue;
    }
    if (!moments_ok(phi, max_moment)) {
      out.push_back(rejected(r, moment_note(phi, max_moment)));
      continue;
    }
    if (phi.has_tag("origin_singular")) {
      out.push_back(rejected(r, "gradient singular at the origin; tensor rules do not resolve it"));
      continue;
    }
    try {
      Point g(n);
      const std::vector<std::vector<double>>* wn = &wc;
      auto ev = [&](const Point& z, const std::vector<int>& idx, double& v, double& di) {
        v = phi.eval(z, g);
        di = 0.0;
        for (int k = 0; k < n; ++k) di += (*wn)[k][idx[k]] * g(k) * g(k);
      };
      const TensorMoments a = tensor_moments(coarse, ev);
      wn = &wf;
      const TensorMoments b = tensor_moments(fine, ev);
      tensor_finish(r, a, b);
      out.push_back(r);
    } catch (const NumericalError& e) {
      out.push_back(inconclusive(r, e));
    }
  }
  sort_reports(out);
  return out;
}

std::vector<InequalityReport> check_product_spherical(const IsotropicDensity& d, const TestCorpus& corpus,
                                                      const CheckOptions& opt) {
  const int n = d.dim();
  std::vector<InequalityReport> out;
  if (n < 2 || n > 4 || d.half_line()) {
    for (const TestFunction& phi : corpus.members)
      out.push_back(rejected(base_report(Theorem::product, d.label() + " spherical", "", phi, opt),
                             "spherical factorization needs 2 <= n <= 4"));
    return out;
  }
  const WeightFunction w = radial_weight(d);
  std::vector<WeightFunction> ang;
  for (int i = 1; i < n; ++i) ang.push_back(angular_weight_function(i, n));
  std::string wlabel = w.description();
  for (const auto& a : ang) wlabel += " ; " + a.description();
  const HypersphericalGrid grid(n, opt.grid_order);

  for (const TestFunction& phi : corpus.members) {
    InequalityReport r = base_report(Theorem::product, d.label() + " spherical", wlabel, phi, opt);
    if (phi.dim() != n) {
      out.push_back(rejected(r, "corpus dimension differs from the density"));
      continue;
    }
    if (!moments_ok(phi, d.max_moment())) {
      out.push_back(rejected(r, moment_note(phi, d.max_moment())));
      continue;
    }
    try {
      const IsotropicMoments m = isotropic_moments(d, grid, phi, {}, &w, &ang, opt.integ);
      r.lhs = m.variance;
      r.rhs = m.split->radial + m.split->angular;
      r.radial_part = m.split->radial;
      r.angular_part = m.split->angular;
      finalize(r);
      out.push_back(r);
    } catch (const NumericalError& e) {
      out.push_back(inconclusive(r, e));
    }
  }
  sort_reports(out);
  return out;
}

std::vector<InequalityReport> check_isotropic_wstar(const IsotropicDensity& d, const TestCorpus& corpus,
                                                    const CheckOptions& opt, std::optional<WeightFunction> wstar) {
  const int n = d.dim();
  std::vector<InequalityReport> out;
  if (n < 2 || n > 4 || d.half_line()) {
    for (const TestFunction& phi : corpus.members)
      out.push_back(rejected(base_report(Theorem::isotropic_wstar, d.label(), "", phi, opt),
                             "needs 2 <= n <= 4; in n = 1 use poincare_1d"));
    return out;
  }
  const WeightFunction w = radial_weight(d);
  const WeightFunction W = wstar ? *wstar : composite_wstar(d, w);
  std::vector<WeightFunction> ang;
  for (int i = 1; i < n; ++i) ang.push_back(angular_weight_function(i, n));
  const HypersphericalGrid grid(n, opt.grid_order);

  for (const TestFunction& phi : corpus.members) {
    InequalityReport r = base_report(Theorem::isotropic_wstar, d.label(), W.description(), phi, opt);
    if (phi.dim() != n) {
      out.push_back(rejected(r, "corpus dimension differs from the density"));
      continue;
    }
    if (!moments_ok(phi, d.max_moment())) {
      out.push_back(rejected(r, moment_note(phi, d.max_moment())));
      continue;
    }
    if (origin_divergent(phi, n, [&](double rho) { return W(rho); })) {
      out.push_back(rejected(r, "E[W* |grad phi|^2] diverges at the origin"));
      continue;
    }
    try {
      const IsotropicMoments m = isotropic_moments(d, grid, phi, {W}, &w, &ang, opt.integ);
      r.lhs = m.variance;
      r.rhs = m.dirichlet[0];
      r.radial_part = m.split->radial;
      r.angular_part = m.split->angular;
      finalize(r);
      if (*r.radial_part + *r.angular_part > r.rhs * (1 + opt.tol) + 1e-14)
        r.note = "radial + angular exceeds the W* form";
      out.push_back(r);
    } catch (const NumericalError& e) {
      out.push_back(inconclusive(r, e));
    }
  }
  sort_reports(out);
  return out;
}

std::vector<InequalityReport> check_refined_outside_ball(const IsotropicDensity& d, const WeightFunction& K,
                                                         double R, const TestCorpus& corpus,
                                                         const CheckOptions& opt) {
  const int n = d.dim();
  std::vector<InequalityReport> out;
  char wl[96];
  std::snprintf(wl, sizeof wl, "2*K, R=%.6g", R);
  auto reject_all = [&](const std::string& why) {
    for (const TestFunction& phi : corpus.members)
      out.push_back(rejected(base_report(Theorem::refined_outside_ball, d.label(), wl, phi, opt), why));
    return out;
  };
  if (n < 2 || n > 4 || d.half_line()) return reject_all("needs 2 <= n <= 4");
  double Rc;
  try {
    Rc = critical_radius_b1(d, K);
  } catch (const Error& e) {
    return reject_all(std::string("no critical radius: ") + e.what());
  }
  if (R < Rc * (1 - 1e-9)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "R = %.6g is below the critical radius %.6g", R, Rc);
    return reject_all(buf);
  }
  const WeightFunction K2 = K.scaled(2.0);
  const HypersphericalGrid grid(n, opt.grid_order);

  for (const TestFunction& phi : corpus.members) {
    InequalityReport r = base_report(Theorem::refined_outside_ball, d.label(), wl, phi, opt);
    if (phi.dim() != n) {
      out.push_back(rejected(r, "corpus dimension differs from the density"));
      continue;
    }
    const Support& s = phi.support();
    if (s.kind != SupportKind::outside_ball || s.radius < R * (1 - 1e-12)) {
      out.push_back(rejected(r, "not supported outside B_R: " + support_name(s)));
      continue;
    }
    const SelfTestResult st = support_self_test(phi, corpus.seed ^ 0x5eedULL);
    if (!st.ok) {
      out.push_back(rejected(r, st.message));
      continue;
    }
    if (!moments_ok(phi, d.max_moment())) {
      out.push_back(rejected(r, moment_note(phi, d.max_moment())));
      continue;
    }
    try {
      const IsotropicMoments m = isotropic_moments(d, grid, phi, {K2}, nullptr, nullptr, opt.integ, {R});
      r.lhs = m.variance;
      r.rhs = m.dirichlet[0];
      finalize(r);
      out.push_back(r);
    } catch (const NumericalError& e) {
      out.push_back(inconclusive(r, e));
    }
  }
  sort_reports(out);
  return out;
}

double hybrid_c_of_r(const IsotropicDensity& d, double R) {
  if (!(R > 0)) throw DomainError("hybrid_c_of_r: need R > 0");
  const double f = d(R);
  if (!(f > 0)) throw DomainError("hybrid_c_of_r: density vanishes at R");
  return R * R * R / (std::pow(R, d.dim()) * f);
}

std::vector<InequalityReport> check_hybrid(const IsotropicDensity& d, const WeightFunction& W, double R,
                                           double c_mult, double c_r, const TestCorpus& corpus,
                                           const CheckOptions& opt) {
  const int n = d.dim();
  std::vector<InequalityReport> out;
  if (n < 2 || n > 4 || d.half_line()) {
    for (const TestFunction& phi : corpus.members)
      out.push_back(rejected(base_report(Theorem::hybrid, d.label(), W.description(), phi, opt),
                             "needs 2 <= n <= 4"));
    return out;
  }
  const HypersphericalGrid grid(n, opt.grid_order);
  for (const TestFunction& phi : corpus.members) {
    InequalityReport r = base_report(Theorem::hybrid, d.label(), W.description(), phi, opt);
    r.c_mult = c_mult;
    r.c_r = c_r;
    if (phi.dim() != n) {
      out.push_back(rejected(r, "corpus dimension differs from the density"));
      continue;
    }
    if (!phi.bounded()) {
      out.push_back(rejected(r, "phi or its gradient is unbounded"));
      continue;
    }
    try {
      const IsotropicMoments m = isotropic_moments(d, grid, phi, {W}, nullptr, nullptr, opt.integ, {R});
      const double surf = surface_dirichlet(d, grid, phi, R);
      const double base = m.dirichlet[0] + c_r * surf;
      r.lhs = m.variance;
      r.rhs = c_mult * base;
      r.volume_term = m.dirichlet[0];
      r.surface_term = surf;
      if (base > 0) r.empirical_constant = m.variance / base;
      else r.empirical_constant = m.variance > 1e-14 ? std::numeric_limits<double>::infinity() : 0.0;
      finalize(r);
      out.push_back(r);
    } catch (const NumericalError& e) {
      out.push_back(inconclusive(r, e));
    }
  }
  sort_reports(out);
  return out;
}

std::vector<InequalityReport> check_gaussian_anisotropic(const Eigen::MatrixXd& V, const Eigen::VectorXd& u,
                                                         const TestCorpus& corpus, const CheckOptions& opt) {
  const int n = static_cast<int>(V.rows());
  if (V.cols() != n || u.size() != n) throw DomainError("check_gaussian_anisotropic: shape mismatch");
  if ((V - V.transpose()).norm() > 1e-12 * std::max(1.0, V.norm()))
    throw DomainError("check_gaussian_anisotropic: V is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw DomainError("check_gaussian_anisotropic: V is not positive definite");
  const Eigen::VectorXd lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  const Eigen::MatrixXd A = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();

  std::string label = "gaussian_anisotropic:lambda=[";
  for (int k = 0; k < n; ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.6g", k ? "," : "", lam(k));
    label += buf;
  }
  label += "]";
  char wl[64];
  std::snprintf(wl, sizeof wl, "lambda_max=%.6g", lmax);

  const int nodes = opt.tensor_nodes > 0 ? opt.tensor_nodes : default_tensor_nodes(n);
  const Rules coarse(n, gauss_hermite_prob<double>(nodes)), fine(n, gauss_hermite_prob<double>(nodes + 8));

  std::vector<InequalityReport> out;
  for (const TestFunction& phi : corpus.members) {
    InequalityReport r = base_report(Theorem::gaussian_anisotropic, label, wl, phi, opt);
    if (n > 4) {
      out.push_back(rejected(r, "tensor quadrature supports n <= 4"));
      continue;
    }
    if (phi.dim() != n) {
      out.push_back(rejected(r, "corpus dimension differs from V"));
      continue;
    }
    if (phi.has_tag("origin_singular")) {
      out.push_back(rejected(r, "gradient singular at the origin; tensor rules do not resolve it"));
      continue;
    }
    try {
      Point x(n), g(n);
      auto ev = [&](const Point& z, const std::vector<int>&, double& v, double& di) {
        x = u + A * z;
        v = phi.eval(x, g);
        di = lmax * g.squaredNorm();
      };
      tensor_finish(r, tensor_moments(coarse, ev), tensor_moments(fine, ev));
      out.push_back(r);
    } catch (const NumericalError& e) {
      out.push_back(inconclusive(r, e));
    }
  }
  sort_reports(out);
  return out;
}

}  // namespace isofp
