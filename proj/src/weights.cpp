#include "isofp/weights.hpp"

#include <algorithm>
#include <cstdio>

namespace isofp {

double weight_from_density_kok(const IsotropicDensity& d, double rho, const Integrator& integ) {
  if (d.half_line()) throw DomainError("kok weight: defined for isotropic densities only");
  const double ip = d.support_radius();
  if (!(rho > 0) || !(rho < ip)) throw DomainError("kok weight: rho must lie in (0, i+)");
  const double lf = d.log_profile(rho);
  if (!std::isfinite(lf)) throw DomainError("kok weight: density vanishes at rho");
  // f(sqrt y)/f(rho) in log space: no underflow far in the tail.
  auto g = [&](double y) { return std::exp(d.log_profile(std::sqrt(y)) - lf); };
  const double y0 = rho * rho, y1 = std::isinf(ip) ? ip : ip * ip;
  Integrator in = d.integrator(integ);
  in.rel_tol = std::min(in.rel_tol, 1e-12);
  in.abs_tol = 0.0;
  std::vector<double> breaks;
  if (y0 + 1.0 < y1) breaks.push_back(y0 + 1.0);
  return 0.5 * integrate_interval(g, y0, y1, in, breaks).value;
}

WeightFunction kok_weight(const IsotropicDensity& d, const Integrator& integ) {
  return WeightFunction([d, integ](double r) { return weight_from_density_kok(d, r, integ); },
                        {WeightProvenance::kok_quadrature, {}, {}, {}}, 0.0, d.support_radius(),
                        "K-ok(" + d.label() + ")");
}

double p_weight_1d(const OneDimDensity& f, double m, double x, const Integrator& integ) {
  if (!(x > f.lo && x < f.hi)) throw DomainError("p_weight_1d: x outside (a, b)");
  const double fx = f(x);
  if (!(fx > 0)) throw DomainError("p_weight_1d: density vanishes at x");
  Integrator in = f.integrator(integ);
  in.abs_tol = 0.0;
  std::vector<double> br;
  if (x <= m) {
    for (double b : f.breaks)
      if (b > f.lo && b < x) br.push_back(b);
    if (std::isinf(f.lo) && x - 1.0 > f.lo) br.push_back(x - 1.0);
    return integrate_interval([&](double y) { return (m - y) * f(y) / fx; }, f.lo, x, in, br).value;
  }
  for (double b : f.breaks)
    if (b > x && b < f.hi) br.push_back(b);
  if (std::isinf(f.hi)) br.push_back(x + 1.0);
  return integrate_interval([&](double y) { return (y - m) * f(y) / fx; }, x, f.hi, in, br).value;
}

WeightFunction p_weight(const OneDimDensity& f, const Integrator& integ) {
  return WeightFunction([f, integ](double x) { return p_weight_1d(f, f.mean, x, integ); },
                        {WeightProvenance::p_formula, {}, {}, {}}, f.lo, f.hi, "P(" + f.name + ")");
}

WeightFunction equilibrium_weight(const IsotropicDensity& d) {
  if (auto k = closed_form_weight(d)) return *k;
  if (d.half_line()) {
    WeightFunction w = p_weight(radial_density(d));
    return w;
  }
  if (d.kind() == DensityKind::cauchy_type && !(d.params().beta > 1))
    throw DomainError("equilibrium weight: K is infinite for cauchy with beta <= 1");
  return kok_weight(d);
}

double steady_state_residual(const IsotropicDensity& d, const WeightFunction& K, double rho) {
  const double m = d.drift_center();
  double h = 1e-3 * std::max(std::abs(rho), 1e-2);
  h = std::min(h, 0.25 * rho);
  if (std::isfinite(d.support_radius())) h = std::min(h, 0.25 * (d.support_radius() - rho));
  auto kf = [&](double r) { return K(r) * d(r); };
  const double deriv =
      (-kf(rho + 2 * h) + 8 * kf(rho + h) - 8 * kf(rho - h) + kf(rho - 2 * h)) / (12 * h);
  const double fr = d(rho);
  return std::abs(deriv + (rho - m) * fr) / (fr * std::max(std::abs(rho - m), 1.0));
}

PQPair make_pq(std::function<double(double)> P, std::function<double(double)> Q, double lo, double hi,
               std::string description) {
  PQPair pq;
  pq.P = std::move(P);
  pq.Q = Q;
  pq.Qprime = [Q, lo, hi](double x) {
    double h = 1e-5 * std::max(std::abs(x), 1e-3);
    h = std::min({h, 0.25 * (x - lo), std::isinf(hi) ? h : 0.25 * (hi - x)});
    return (-Q(x + 2 * h) + 8 * Q(x + h) - 8 * Q(x - h) + Q(x - 2 * h)) / (12 * h);
  };
  pq.lo = lo;
  pq.hi = hi;
  pq.description = std::move(description);
  return pq;
}

PQPair cauchy_pq(double beta, int n, double alpha) {
  PQPair pq;
  const double nm1 = n - 1;
  pq.P = [alpha](double r) { return std::pow(1 + r * r, alpha); };
  pq.Q = [=](double r) {
    const double s = 1 + r * r;
    return 2 * (beta - alpha) * r * std::pow(s, alpha - 1) - nm1 * std::pow(s, alpha) / r;
  };
  pq.Qprime = [=](double r) {
    const double s = 1 + r * r;
    return (2 * (beta - alpha) * (1 + (2 * alpha - 1) * r * r) - 2 * alpha * nm1 * s) / std::pow(s, 2 - alpha) +
           nm1 * std::pow(s, alpha) / (r * r);
  };
  pq.alpha = alpha;
  pq.left_zero_ok = (n == 1);
  char buf[96];
  std::snprintf(buf, sizeof buf, "cauchy PQ beta=%g n=%d alpha=%g", beta, n, alpha);
  pq.description = buf;
  return pq;
}

PQPair barenblatt_pq(double p, int n, double a, double alpha) {
  PQPair pq;
  const double b = 1.0 / (p - 1.0), a2 = a * a, nm1 = n - 1;
  pq.P = [=](double r) { return std::pow(a2 - r * r, alpha); };
  pq.Q = [=](double r) {
    const double s = a2 - r * r;
    return 2 * (alpha + b) * r * std::pow(s, alpha - 1) - nm1 * std::pow(s, alpha) / r;
  };
  pq.Qprime = [=](double r) {
    const double s = a2 - r * r;
    return 2 * (alpha + b) * (a2 + (2 * alpha - 1) * r * r) / std::pow(s, 2 - alpha) +
           nm1 * (a2 + (2 * alpha - 1) * r * r) / (std::pow(s, 1 - alpha) * r * r);
  };
  pq.alpha = alpha;
  pq.lo = 0.0;
  pq.hi = a;
  pq.left_zero_ok = (n == 1);
  char buf[96];
  std::snprintf(buf, sizeof buf, "barenblatt PQ p=%g n=%d a=%g alpha=%g", p, n, a, alpha);
  pq.description = buf;
  return pq;
}

PQPair gaussian_radial_pq(double sigma, int n) {
  PQPair pq;
  const double c = (n - 1) * sigma;
  pq.P = [sigma](double) { return sigma; };
  pq.Q = [c](double r) { return r - c / r; };
  pq.Qprime = [c](double r) { return 1 + c / (r * r); };
  pq.left_zero_ok = (n == 1);
  char buf[96];
  std::snprintf(buf, sizeof buf, "gaussian radial PQ sigma=%g n=%d", sigma, n);
  pq.description = buf;
  return pq;
}

WeightFunction w_from_pq(const PQPair& pq, int validation_points) {
  const double lo = pq.lo, hi = pq.hi;
  // Validation grid: geometric near lo, uniform or geometric toward hi.
  const double span = std::isinf(hi) ? 1e3 : hi - lo;
  for (int k = 1; k < validation_points; ++k) {
    const double t = static_cast<double>(k) / validation_points;
    double x;
    if (std::isinf(hi)) x = lo + std::pow(10.0, -6.0 + 9.0 * t);
    else x = lo + span * t;
    const double P = pq.P(x), Qp = pq.Qprime(x);
    if (!(P > 0)) throw DomainError("w_from_pq: P <= 0 at x = " + std::to_string(x));
    if (!(Qp > 0)) throw DomainError("w_from_pq: Q' <= 0 at x = " + std::to_string(x));
  }
  const double eps = std::isinf(hi) ? 1e-9 : 1e-9 * span;
  const double ql = pq.Q(lo + eps);
  const double qh = std::isinf(hi) ? pq.Q(1e9) : pq.Q(hi - eps);
  if (pq.left_zero_ok ? !(ql <= 1e-6) : !(ql < 0)) throw DomainError("w_from_pq: Q must be negative at the left end");
  if (!(qh > 0)) throw DomainError("w_from_pq: Q must be positive at the right end");

  WeightFunction::Origin origin{WeightProvenance::pq_family, pq.alpha, {}, {}};
  auto P = pq.P;
  auto Qp = pq.Qprime;
  return WeightFunction([P, Qp, lo, hi](double x) {
                          if (!(x > lo) || !(x < hi)) return 0.0;
                          return P(x) / Qp(x);
                        },
                        origin, lo, hi, "P/Q' (" + pq.description + ")");
}

double cauchy_h(double beta, int n, double alpha) {
  const double bs = beta - 0.5 * (n - 1);
  return (2 * alpha - 1) * (bs - alpha);
}

AlphaOptimum cauchy_alpha_closed(double beta, int n) {
  if (!(beta > 0.5 * (n + 1))) throw DomainError("cauchy family: needs beta > (n+1)/2");
  const double bs = beta - 0.5 * (n - 1);
  const double alpha = std::min(0.5 * bs + 0.25, 1.0);
  const double h = cauchy_h(beta, n, alpha);
  // Closed branch constants rather than 1/(2h) so both paths are independent.
  const double coeff = beta < 0.5 * n + 1.0 ? 1.0 / ((beta - 0.5 * n) * (beta - 0.5 * n))
                                            : 1.0 / (2 * beta - (n + 1));
  return {alpha, h, coeff};
}

double barenblatt_h(double p, int n, double alpha) {
  const double b = 1.0 / (p - 1.0);
  return (2 * alpha - 1) * (alpha + b + n - 1);
}

AlphaOptimum barenblatt_alpha_closed(double p, int n) {
  if (!(p > 1)) throw DomainError("barenblatt family: needs p > 1");
  return {1.0, barenblatt_h(p, n, 1.0), (p - 1) / (2 * (n * (p - 1) + 1))};
}

AlphaOptimum golden_alpha(const std::function<double(double)>& h, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.5, b = 1.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = h(c), fd = h(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = h(d);
    }
  }
  double alpha = 0.5 * (a + b), best = h(alpha);
  if (h(1.0) >= best) {
    alpha = 1.0;
    best = h(1.0);
  }
  return {alpha, best, 1.0 / (2.0 * best)};
}

WeightFunction optimal_cauchy_weight(double beta, int n) {
  const AlphaOptimum opt = cauchy_alpha_closed(beta, n);
  const double c = opt.coefficient;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6g(1+rho^2), cauchy beta=%g n=%d", c, beta, n);
  return WeightFunction([c](double r) { return c * (1 + r * r); },
                        {WeightProvenance::pq_family, opt.alpha, {}, {}}, 0.0,
                        std::numeric_limits<double>::infinity(), buf);
}

WeightFunction optimal_barenblatt_weight(double p, int n, double a) {
  if (!(a > 0)) throw DomainError("barenblatt family: needs a > 0");
  const AlphaOptimum opt = barenblatt_alpha_closed(p, n);
  const double c = opt.coefficient, a2 = a * a;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6g(a^2-rho^2), barenblatt p=%g n=%d a=%g", c, p, n, a);
  return WeightFunction([c, a2](double r) { return std::max(0.0, c * (a2 - r * r)); },
                        {WeightProvenance::pq_family, opt.alpha, {}, {}}, 0.0, a, buf);
}

WeightFunction gamma_radial_weight(double beta) {
  if (!(beta > 0)) throw DomainError("gamma weight: beta must be > 0");
  char buf[64];
  std::snprintf(buf, sizeof buf, "rho/%g", beta);
  return WeightFunction([beta](double r) { return r / beta; }, {WeightProvenance::closed_form, {}, {}, {}},
                        0.0, std::numeric_limits<double>::infinity(), buf);
}

double angular_weight(int i, int n, double theta, const Integrator& integ) {
  if (n < 2 || i < 1 || i > n - 1) throw DomainError("angular_weight: need 1 <= i <= n-1");
  if (i == n - 1) {
    if (!(theta > 0 && theta < 2 * kPi)) throw DomainError("angular_weight: azimuth outside (0, 2 pi)");
    return kPi * theta - 0.5 * theta * theta;
  }
  if (!(theta > 0 && theta < kPi)) throw DomainError("angular_weight: polar angle outside (0, pi)");
  // Symmetric about pi/2.
  const double t = theta <= 0.5 * kPi ? theta : kPi - theta;
  const int k = n - 1 - i;
  // int_0^t (pi/2 - y) sin^k y dy / sin^k t, with the ratio formed inside so
  // small angles keep full relative accuracy.
  const double st = std::sin(t);
  Integrator in = integ;
  in.abs_tol = 0.0;
  return integrate_interval(
             [&](double y) { return (0.5 * kPi - y) * std::pow(std::sin(y) / st, k); }, 0.0, t, in)
      .value;
}

WeightFunction angular_weight_function(int i, int n) {
  const double hi = i == n - 1 ? 2 * kPi : kPi;
  return WeightFunction([i, n](double t) { return angular_weight(i, n, t); },
                        {WeightProvenance::angular, {}, i, {}}, 0.0, hi,
                        "P_" + std::to_string(i) + " (n=" + std::to_string(n) + ")");
}

WeightFunction radial_weight(const IsotropicDensity& d) {
  const DensityParams& p = d.params();
  switch (d.kind()) {
    case DensityKind::gaussian: return w_from_pq(gaussian_radial_pq(p.sigma, d.dim()));
    case DensityKind::cauchy_type: return optimal_cauchy_weight(p.beta, d.dim());
    case DensityKind::exponential_type: return gamma_radial_weight(p.beta);
    case DensityKind::barenblatt: return optimal_barenblatt_weight(p.p, d.dim(), p.a);
    case DensityKind::inverse_gamma_1d: return p_weight(radial_density(d));
  }
  throw DomainError("radial_weight: unknown kind");
}

WeightFunction composite_wstar(const IsotropicDensity& d, const WeightFunction& w_radial) {
  const double c = 0.5 * kPi * kPi;
  return WeightFunction([w_radial, c](double r) { return std::max(w_radial(r), c * r * r); },
                        {WeightProvenance::composite_wstar, {}, {}, {}}, 0.0, d.support_radius(),
                        "max{" + w_radial.description() + ", pi^2 rho^2/2}");
}

double critical_radius_b1(const IsotropicDensity& d, const WeightFunction& K) {
  const int n = d.dim();
  if (n == 1) return 0.0;
  const double ip = d.support_radius();
  auto ratio = [&](double r) { return (n - 1) * K(r) / (r * r); };
  // Dense geometric grid over the support; the ratio is eventually decreasing
  // for every catalog weight, so we locate the last exceedance and bisect.
  const int m = 4000;
  const double r_lo = 1e-6 * (std::isinf(ip) ? 1.0 : ip);
  // Beyond 1e6, 1 + r^2 rounds to r^2 and flat-tailed ratios look like ties.
  const double r_hi = std::isinf(ip) ? 1e6 : ip * (1 - 1e-12);
  std::vector<double> grid(m);
  for (int j = 0; j < m; ++j) grid[j] = r_lo * std::pow(r_hi / r_lo, static_cast<double>(j) / (m - 1));
  int last = -1;
  for (int j = 0; j < m; ++j)
    if (ratio(grid[j]) > 0.5) last = j;
  if (last == m - 1) throw DomainError("critical_radius_b1: (n-1)K/r^2 <= 1/2 never holds on the support");
  if (last < 0) return 0.0;
  double a = grid[last], b = grid[last + 1];
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    const double c = 0.5 * (a + b);
    (ratio(c) > 0.5 ? a : b) = c;
  }
  return b;
}

WeightFunction hybrid_weight(const WeightFunction& w, const WeightFunction& K, double R) {
  return WeightFunction([w, K, R](double r) { return r <= R ? std::max(w(r), r * r) : K(r); },
                        {WeightProvenance::hybrid, {}, {}, R}, 0.0, K.hi(),
                        "hybrid W(R=" + std::to_string(R) + ")");
}

}  // namespace isofp
