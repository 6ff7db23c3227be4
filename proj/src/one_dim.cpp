#include "isofp/one_dim.hpp"

#include <algorithm>
#include <cstdio>

namespace isofp {

namespace {

double mean_of(const std::function<double(double)>& pdf, double lo, double hi, TailMap tail,
               const std::vector<double>& breaks) {
  Integrator integ;
  integ.tail = tail;
  integ.rel_tol = 1e-12;
  return integrate_interval([&](double x) { return x * pdf(x); }, lo, hi, integ, breaks).value;
}

// Composite Gauss-Legendre points and pdf-weighted weights on (lo, hi).
struct Discrete {
  std::vector<double> x, w;
};

void add_panels(Discrete& out, const GaussRule<double>& gl, const std::function<double(double)>& map,
                const std::function<double(double)>& jac, const std::function<double(double)>& pdf,
                const std::vector<double>& pts, int split) {
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const double h = (pts[k + 1] - pts[k]) / split;
    for (int s = 0; s < split; ++s) {
      const double a = pts[k] + s * h, c = a + 0.5 * h;
      for (int j = 0; j < gl.size(); ++j) {
        const double t = c + 0.5 * h * gl.nodes(j);
        const double x = map(t);
        const double jt = jac(t);
        if (!std::isfinite(x) || !std::isfinite(jt) || std::abs(x) > 1e150) continue;
        const double wt = 0.5 * h * gl.weights(j) * jt * pdf(x);
        if (wt > 0 && std::isfinite(wt)) {
          out.x.push_back(x);
          out.w.push_back(wt);
        }
      }
    }
  }
}

void discretize_right(Discrete& out, const std::function<double(double)>& pdf, double lo, double hi,
                      std::vector<double> breaks, TailMap tail) {
  static const GaussRule<double> gl = gauss_legendre<double>(20);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> edges{lo};
  for (double b : breaks)
    if (b > edges.back() && b < hi) edges.push_back(b);
  double tail_start = edges.back();
  if (std::isinf(hi) && tail == TailMap::log_rational && tail_start <= 0.0) {
    tail_start = std::max(1.0, tail_start + 1.0);
    edges.push_back(tail_start);
  }
  if (!std::isinf(hi)) edges.push_back(hi);
  auto id = [](double t) { return t; };
  auto one = [](double) { return 1.0; };
  for (size_t s = 0; s + 1 < edges.size(); ++s) {
    std::vector<double> pts;
    detail::graded_partition(pts, edges[s], edges[s + 1], true, true, 16);
    pts.push_back(edges[s + 1]);
    add_panels(out, gl, id, one, pdf, pts, 4);
  }
  if (std::isinf(hi)) {
    std::function<double(double)> map, jac;
    if (tail == TailMap::rational) {
      map = [=](double t) { return tail_start + t / (1.0 - t); };
      jac = [](double t) { return 1.0 / ((1.0 - t) * (1.0 - t)); };
    } else {
      map = [=](double t) { return tail_start * std::exp(t / (1.0 - t)); };
      jac = [=](double t) { return tail_start * std::exp(t / (1.0 - t)) / ((1.0 - t) * (1.0 - t)); };
    }
    std::vector<double> pts;
    detail::graded_partition(pts, 0.0, 1.0, false, true, 30);
    pts.push_back(1.0);
    add_panels(out, gl, map, jac, pdf, pts, 4);
  }
}

}  // namespace

OneDimDensity normal_density(double variance, double mean) {
  if (!(variance > 0)) throw DomainError("normal_density: variance must be > 0");
  OneDimDensity f;
  char buf[64];
  std::snprintf(buf, sizeof buf, "normal(%g,%g)", mean, variance);
  f.name = buf;
  const double c = 1.0 / std::sqrt(2.0 * kPi * variance);
  f.pdf = [=](double x) { return c * std::exp(-(x - mean) * (x - mean) / (2.0 * variance)); };
  f.mean = mean;
  f.breaks = {mean};
  f.normal_variance = variance;
  return f;
}

OneDimDensity uniform_density(double lo, double hi) {
  if (!(lo < hi) || std::isinf(lo) || std::isinf(hi)) throw DomainError("uniform_density: bad interval");
  OneDimDensity f;
  char buf[64];
  std::snprintf(buf, sizeof buf, "uniform(%g,%g)", lo, hi);
  f.name = buf;
  const double c = 1.0 / (hi - lo);
  f.pdf = [c](double) { return c; };
  f.lo = lo;
  f.hi = hi;
  f.mean = 0.5 * (lo + hi);
  return f;
}

OneDimDensity angular_density(int i, int n) {
  if (n < 2 || i < 1 || i > n - 1) throw DomainError("angular_density: need 1 <= i <= n-1, n >= 2");
  const int k = n - 1 - i;
  if (k == 0) {
    OneDimDensity f = uniform_density(0.0, 2.0 * kPi);
    f.name = "azimuth";
    return f;
  }
  OneDimDensity f;
  f.name = "sin^" + std::to_string(k);
  const double z = std::sqrt(kPi) * std::exp(std::lgamma(0.5 * (k + 1)) - std::lgamma(0.5 * k + 1.0));
  f.pdf = [k, z](double t) { return std::pow(std::sin(t), k) / z; };
  f.lo = 0.0;
  f.hi = kPi;
  f.mean = 0.5 * kPi;
  return f;
}

OneDimDensity radial_density(const IsotropicDensity& d) {
  OneDimDensity f;
  f.name = "radial(" + d.label() + ")";
  const RadialMarginal m = radial_marginal(d);
  f.pdf = [m](double r) { return m(r); };
  f.lo = 0.0;
  f.hi = d.support_radius();
  f.tail = d.integrator().tail;
  f.max_moment = d.max_moment();
  f.mean = mean_of(f.pdf, f.lo, f.hi, f.tail, {});
  return f;
}

OneDimDensity line_density(const IsotropicDensity& d) {
  if (d.dim() != 1 || d.half_line()) throw DomainError("line_density: needs an isotropic n = 1 density");
  OneDimDensity f;
  f.name = d.label();
  f.pdf = [d](double x) { return d(x); };
  f.lo = -d.support_radius();
  f.hi = d.support_radius();
  f.tail = d.integrator().tail;
  f.max_moment = d.max_moment();
  f.mean = 0.0;
  f.breaks = {0.0};
  if (d.kind() == DensityKind::gaussian) f.normal_variance = d.params().sigma;
  return f;
}

OneDimDensity gamma_density(double k, double beta) {
  if (!(k > 0) || !(beta > 0)) throw DomainError("gamma_density: need k, beta > 0");
  OneDimDensity f;
  char buf[64];
  std::snprintf(buf, sizeof buf, "gamma(%g,%g)", k, beta);
  f.name = buf;
  const double lc = k * std::log(beta) - std::lgamma(k);
  f.pdf = [=](double x) { return x > 0 ? std::exp(lc + (k - 1) * std::log(x) - beta * x) : 0.0; };
  f.lo = 0.0;
  f.mean = k / beta;
  return f;
}

GaussRule<double> gauss_rule(const OneDimDensity& f, int n) {
  if (f.normal_variance) {
    GaussRule<double> r = gauss_hermite_prob<double>(n);
    r.nodes = (r.nodes.array() * std::sqrt(*f.normal_variance) + f.mean).matrix();
    return r;
  }
  Discrete d;
  if (std::isinf(f.lo)) {
    // Split at the first break (or the mean) and reflect the left part.
    const double split = f.breaks.empty() ? f.mean : f.breaks.front();
    std::vector<double> left, right;
    for (double b : f.breaks) {
      if (b < split) left.push_back(-b);
      if (b > split) right.push_back(b);
    }
    auto refl = [&f](double x) { return f(-x); };
    Discrete l;
    discretize_right(l, refl, -split, std::numeric_limits<double>::infinity(), left, f.tail);
    for (size_t i = 0; i < l.x.size(); ++i) {
      d.x.push_back(-l.x[i]);
      d.w.push_back(l.w[i]);
    }
    discretize_right(d, [&f](double x) { return f(x); }, split, f.hi, right, f.tail);
  } else {
    discretize_right(d, [&f](double x) { return f(x); }, f.lo, f.hi, f.breaks, f.tail);
  }
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(d.x.data(), d.x.size());
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(d.w.data(), d.w.size());
  return gauss_rule_from_discrete<double>(x, w, n);
}

}  // namespace isofp
