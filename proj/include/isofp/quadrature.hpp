#pragma once

#include "isofp/common.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <type_traits>
#include <vector>

namespace isofp {

enum class EndpointPolicy { open, closed };

// How [c, inf) is pulled back onto (0, 1).
//   rational:     x = c + t/(1-t)
//   log_rational: x = c * exp(t/(1-t)), c > 0; turns algebraic tails into
//                 exponential ones so heavy-tailed integrands converge.
enum class TailMap { rational, log_rational };

struct Integrator {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_subdivisions = 4000;
  EndpointPolicy lower = EndpointPolicy::open;
  EndpointPolicy upper = EndpointPolicy::open;
  TailMap tail = TailMap::rational;
};

template <class T>
struct QuadResult {
  T value;
  T error;
  int intervals = 0;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, Eigen::ArrayXd estimate, Eigen::ArrayXd error)
      : NumericalError(what), estimate_(std::move(estimate)), error_(std::move(error)) {}
  const Eigen::ArrayXd& estimate() const { return estimate_; }
  const Eigen::ArrayXd& error() const { return error_; }

 private:
  Eigen::ArrayXd estimate_;
  Eigen::ArrayXd error_;
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.0,
    0.148874338981631211, 0.294392862701460198, 0.433395394129247191,
    0.562757134668604683, 0.679409568299024406, 0.780817726586416897,
    0.865063366688984511, 0.930157491355708226, 0.973906528517171720,
    0.995657163025808081};
inline constexpr std::array<double, 11> kWgk = {
    0.149445554002916906,
    0.147739104901338491, 0.142775938577060081, 0.134709217311473326,
    0.123491976262065851, 0.109387158802297642, 0.0931254545836976055,
    0.0750396748109199528, 0.0547558965743519960, 0.0325581623079647275,
    0.0116946388673718743};
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> kWg = {
    0.295524224714752870, 0.269266719309996355, 0.219086362515982044,
    0.149451349150580593, 0.0666713443086881376};

template <class T>
inline constexpr bool is_scalar_v = std::is_arithmetic_v<T>;

template <class T>
auto vabs(const T& v) {
  if constexpr (is_scalar_v<T>) return std::abs(v);
  else return v.abs().eval();
}

template <class T>
T zero_like(const T& v) {
  if constexpr (is_scalar_v<T>) return T(0);
  else return T::Zero(v.size());
}

template <class T>
Eigen::ArrayXd to_array(const T& v) {
  if constexpr (is_scalar_v<T>) {
    Eigen::ArrayXd a(1);
    a(0) = v;
    return a;
  } else {
    return Eigen::ArrayXd(v);
  }
}

// One G10/K21 panel with the QUADPACK error heuristic, component-wise.
template <class F>
auto gk21(F& g, double a, double b) {
  using T = std::decay_t<decltype(g(0.5 * (a + b)))>;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::array<T, 10> fl, fr;
  const T fc = g(c);
  T resk = fc * kWgk[0];
  T resg = zero_like(fc);
  T resabs = vabs(fc) * kWgk[0];
  for (int i = 1; i <= 10; ++i) {
    const double dx = h * kXgk[i];
    fl[i - 1] = g(c - dx);
    fr[i - 1] = g(c + dx);
    resk = resk + (fl[i - 1] + fr[i - 1]) * kWgk[i];
    resabs = resabs + (vabs(fl[i - 1]) + vabs(fr[i - 1])) * kWgk[i];
    if (i % 2 == 1) resg = resg + (fl[i - 1] + fr[i - 1]) * kWg[i / 2];
  }
  const T mean = resk * 0.5;
  T resasc = vabs(fc - mean) * kWgk[0];
  for (int i = 1; i <= 10; ++i)
    resasc = resasc + (vabs(fl[i - 1] - mean) + vabs(fr[i - 1] - mean)) * kWgk[i];

  const double ah = std::abs(h);
  T err = vabs(resk - resg) * ah;
  resasc = resasc * ah;
  resabs = resabs * ah;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  auto fix = [&](double& e, double asc, double abs_) {
    if (asc != 0.0 && e != 0.0) e = asc * std::min(1.0, std::pow(200.0 * e / asc, 1.5));
    if (abs_ > tiny / (50.0 * eps)) e = std::max(50.0 * eps * abs_, e);
  };
  if constexpr (is_scalar_v<T>) {
    fix(err, resasc, resabs);
  } else {
    for (Eigen::Index k = 0; k < err.size(); ++k) fix(err(k), resasc(k), resabs(k));
  }
  return std::pair<T, T>(resk * h, err);
}

// Breakpoints graded geometrically toward an open endpoint.
inline void graded_partition(std::vector<double>& pts, double a, double b, bool open_a,
                             bool open_b, int levels = 6) {
  pts.push_back(a);
  if (open_a)
    for (int j = levels; j >= 1; --j) pts.push_back(a + (b - a) * std::ldexp(1.0, -j - 1));
  pts.push_back(0.5 * (a + b));
  if (open_b)
    for (int j = 1; j <= levels; ++j) pts.push_back(b - (b - a) * std::ldexp(1.0, -j - 1));
}

// Core adaptive driver; lo is finite.
template <class F>
auto integrate_right(F&& g, double lo, double hi, const Integrator& integ,
                     std::vector<double> breaks) {
  using T = std::decay_t<decltype(g(0.0))>;
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> edges{lo};
  for (double b : breaks)
    if (b > edges.back() && b < hi) edges.push_back(b);

  const bool infinite = std::isinf(hi);
  double tail_start = 0.0;
  if (infinite) {
    tail_start = edges.back();
    if (integ.tail == TailMap::log_rational && tail_start <= 0.0) {
      tail_start = std::max(1.0, tail_start + 1.0);
      edges.push_back(tail_start);
    }
  } else {
    edges.push_back(hi);
  }

  // Panels carry a segment id; segment ids >= edges.size()-1 refer to the tail.
  struct Seg {
    double a, b;
    bool mapped;
  };
  std::vector<Seg> segs;
  for (size_t i = 0; i + 1 < edges.size(); ++i) segs.push_back({edges[i], edges[i + 1], false});
  if (infinite) segs.push_back({0.0, 1.0, true});

  const TailMap tail = integ.tail;
  auto mapped_eval = [&](double t) -> T {
    const double s = t / (1.0 - t);
    const double ds = 1.0 / ((1.0 - t) * (1.0 - t));
    double x, jac;
    if (tail == TailMap::rational) {
      x = tail_start + s;
      jac = ds;
    } else {
      x = tail_start * std::exp(s);
      jac = x * ds;
    }
    // Integrands must decay; beyond 1e60 even the heaviest admissible tail
    // contributes nothing, while polynomial factors would overflow to inf * 0.
    if (!(x < 1e60) || !std::isfinite(jac)) {
      T probe = g(tail_start);
      return zero_like(probe);
    }
    return g(x) * jac;
  };

  T total{}, total_err{};
  bool first = true;
  auto eval_panel = [&](size_t seg, double a, double b) {
    std::pair<T, T> r;
    if (segs[seg].mapped) r = detail::gk21(mapped_eval, a, b);
    else r = detail::gk21(g, a, b);
    return r;
  };

  struct Item {
    size_t seg;
    double a, b;
    T value, error;
  };
  std::vector<Item> items;
  for (size_t s = 0; s < segs.size(); ++s) {
    const bool open_a = (s == 0 && integ.lower == EndpointPolicy::open);
    const bool open_b = segs[s].mapped || (s + 1 == segs.size() && integ.upper == EndpointPolicy::open);
    std::vector<double> pts;
    detail::graded_partition(pts, segs[s].a, segs[s].b, open_a, open_b);
    pts.push_back(segs[s].b);
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      auto [v, e] = eval_panel(s, pts[k], pts[k + 1]);
      items.push_back({s, pts[k], pts[k + 1], v, e});
      if (first) {
        total = v;
        total_err = e;
        first = false;
      } else {
        total = total + v;
        total_err = total_err + e;
      }
    }
  }

  auto converged = [&]() {
    if constexpr (detail::is_scalar_v<T>) {
      return total_err <= std::max(integ.rel_tol * std::abs(total), integ.abs_tol);
    } else {
      for (Eigen::Index k = 0; k < total.size(); ++k)
        if (total_err(k) > std::max(integ.rel_tol * std::abs(total(k)), integ.abs_tol)) return false;
      return true;
    }
  };
  auto priority = [&](const T& e) {
    if constexpr (detail::is_scalar_v<T>) {
      return e / std::max(integ.rel_tol * std::abs(total), integ.abs_tol);
    } else {
      double p = 0.0;
      for (Eigen::Index k = 0; k < e.size(); ++k)
        p = std::max(p, e(k) / std::max(integ.rel_tol * std::abs(total(k)), integ.abs_tol));
      return p;
    }
  };

  // Max-heap over panels keyed by normalized error.
  std::vector<std::pair<double, size_t>> pq;
  for (size_t i = 0; i < items.size(); ++i) pq.emplace_back(priority(items[i].error), i);
  std::make_heap(pq.begin(), pq.end());

  int splits = 0;
  while (!converged()) {
    if (pq.empty() || splits >= integ.max_subdivisions) {
      throw QuadratureError("integrate_interval: tolerance not reached", detail::to_array(total),
                            detail::to_array(total_err));
    }
    std::pop_heap(pq.begin(), pq.end());
    const size_t idx = pq.back().second;
    pq.pop_back();
    Item it = items[idx];
    const double mid = 0.5 * (it.a + it.b);
    if (!(mid > it.a && mid < it.b) || (it.b - it.a) < 1e-15 * std::max(1.0, std::abs(mid))) {
      continue;  // cannot split further; its error stays in the total
    }
    auto [v1, e1] = eval_panel(it.seg, it.a, mid);
    auto [v2, e2] = eval_panel(it.seg, mid, it.b);
    total = total - it.value + v1 + v2;
    total_err = total_err - it.error + e1 + e2;
    total_err = detail::vabs(total_err);  // guard against cancellation drift
    items[idx] = {it.seg, it.a, mid, v1, e1};
    items.push_back({it.seg, mid, it.b, v2, e2});
    pq.emplace_back(priority(e1), idx);
    std::push_heap(pq.begin(), pq.end());
    pq.emplace_back(priority(e2), items.size() - 1);
    std::push_heap(pq.begin(), pq.end());
    ++splits;
  }
  return QuadResult<T>{total, total_err, static_cast<int>(items.size())};
}

}  // namespace detail

// Global adaptive G10/K21 on [lo, hi] with hi possibly +inf and lo possibly
// -inf. `breaks` are interior points that must be panel edges (kinks, support
// edges). g may return double or a fixed- or dynamic-size Eigen array; all
// components share the panels and each must meet its own tolerance.
template <class F>
auto integrate_interval(F&& g, double lo, double hi, const Integrator& integ = {},
                        std::vector<double> breaks = {}) {
  if (!(lo < hi)) throw DomainError("integrate_interval: need lo < hi");
  if (!std::isinf(lo)) return detail::integrate_right(g, lo, hi, integ, std::move(breaks));

  // Reflect (-inf, c] onto [-c, inf); a doubly infinite range is split at the
  // first break (0 by default).
  std::sort(breaks.begin(), breaks.end());
  const double split = std::isinf(hi) ? (breaks.empty() ? 0.0 : breaks.front()) : hi;
  auto r = [&g](double x) { return g(-x); };
  std::vector<double> left, right;
  for (double b : breaks) {
    if (b < split) left.push_back(-b);
    else if (b > split) right.push_back(b);
  }
  Integrator li = integ;
  std::swap(li.lower, li.upper);
  if (!std::isinf(hi)) li.lower = integ.upper;
  else li.lower = EndpointPolicy::closed;
  auto res = detail::integrate_right(r, -split, std::numeric_limits<double>::infinity(), li, left);
  if (std::isinf(hi)) {
    Integrator ri = integ;
    ri.lower = EndpointPolicy::closed;
    auto rr = detail::integrate_right(g, split, hi, ri, right);
    res.value = res.value + rr.value;
    res.error = res.error + rr.error;
    res.intervals += rr.intervals;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Gauss rules

template <class Scalar = double>
struct GaussRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

// Golub-Welsch from three-term recurrence coefficients of the orthonormal
// polynomials: alpha(0..n-1), beta(1..n) (beta(0) unused), total mass mu0.
// beta(n) is used to Newton-polish nodes; weights come from the Christoffel
// function, which keeps the small tail weights relatively accurate.
template <class Scalar = double>
GaussRule<Scalar> rule_from_recurrence(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& alpha,
                                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& beta,
                                       Scalar mu0) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int n = static_cast<int>(alpha.size());
  Vec diag = alpha, sub(std::max(n - 1, 0));
  for (int k = 0; k + 1 < n; ++k) sub(k) = beta(k + 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolve failed");
  GaussRule<Scalar> rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  using std::sqrt;
  using std::abs;
  const bool can_polish = beta.size() > n;
  for (int i = 0; i < n; ++i) {
    Scalar x = rule.nodes(i);
    for (int it = 0; it < (can_polish ? 3 : 0); ++it) {
      // p_n and its derivative by the recurrence.
      Scalar p0 = 1 / sqrt(mu0), p1 = 0, d0 = 0, d1 = 0;
      for (int k = 0; k < n; ++k) {
        const Scalar p2 = ((x - alpha(k)) * p0 - (k > 0 ? beta(k) * p1 : Scalar(0))) / beta(k + 1);
        const Scalar d2 = (p0 + (x - alpha(k)) * d0 - (k > 0 ? beta(k) * d1 : Scalar(0))) / beta(k + 1);
        p1 = p0;
        p0 = p2;
        d1 = d0;
        d0 = d2;
      }
      if (d0 == Scalar(0)) break;
      const Scalar dx = p0 / d0;
      x -= dx;
      if (abs(dx) <= std::numeric_limits<Scalar>::epsilon() * (1 + abs(x))) break;
    }
    rule.nodes(i) = x;
    Scalar p0 = 1 / sqrt(mu0), p1 = 0, s = p0 * p0;
    for (int k = 0; k + 1 < n; ++k) {
      const Scalar p2 = ((x - alpha(k)) * p0 - (k > 0 ? beta(k) * p1 : Scalar(0))) / beta(k + 1);
      p1 = p0;
      p0 = p2;
      s += p0 * p0;
    }
    rule.weights(i) = 1 / s;
  }
  return rule;
}

// Gauss-Legendre on [-1, 1].
template <class Scalar = double>
GaussRule<Scalar> gauss_legendre(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n), b(n + 1);
  b(0) = 0;
  for (int k = 1; k <= n; ++k) b(k) = Scalar(k) / std::sqrt(Scalar(4 * k * k - 1));
  return rule_from_recurrence<Scalar>(a, b, Scalar(2));
}

// Gauss-Hermite for the standard normal measure (weights sum to 1).
template <class Scalar = double>
GaussRule<Scalar> gauss_hermite_prob(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n), b(n + 1);
  b(0) = 0;
  for (int k = 1; k <= n; ++k) b(k) = std::sqrt(Scalar(k));
  return rule_from_recurrence<Scalar>(a, b, Scalar(1));
}

// Gauss rule for a discrete measure sum_j w_j delta(x_j), via Lanczos with
// full reorthogonalization. Used to compress a fine composite rule for a
// continuous density into an n-point rule exact to degree 2n-1.
template <class Scalar = double>
GaussRule<Scalar> gauss_rule_from_discrete(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& w,
                                           int n) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index m = x.size();
  if (n < 1 || n >= m) throw DomainError("gauss_rule_from_discrete: need 1 <= n < support size");
  const Scalar mu0 = w.sum();
  Mat q(m, n + 1);
  q.col(0) = w.cwiseSqrt() / std::sqrt(mu0);
  Vec alpha(n), beta = Vec::Zero(n + 1);
  for (int k = 0; k < n; ++k) {
    Vec v = x.cwiseProduct(q.col(k));
    alpha(k) = q.col(k).dot(v);
    v -= alpha(k) * q.col(k);
    if (k > 0) v -= beta(k) * q.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * v);
    beta(k + 1) = v.norm();
    if (beta(k + 1) == Scalar(0)) throw NumericalError("Lanczos breakdown");
    q.col(k + 1) = v / beta(k + 1);
  }
  return rule_from_recurrence<Scalar>(alpha, beta, mu0);
}

}  // namespace isofp
