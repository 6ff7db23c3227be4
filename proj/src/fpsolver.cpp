#include "isofp/fpsolver.hpp"

#include "isofp/quadrature.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace isofp {

const char* theta_name(ThetaKind k) {
  switch (k) {
    case ThetaKind::chi2: return "chi2";
    case ThetaKind::entropy: return "entropy";
    case ThetaKind::hellinger2: return "hellinger2";
  }
  return "?";
}

const char* perturbation_name(Perturbation p) {
  switch (p) {
    case Perturbation::tanh: return "tanh";
    case Perturbation::bump: return "bump";
    case Perturbation::cosine: return "cosine";
  }
  return "?";
}

Perturbation parse_perturbation(const std::string& s) {
  for (Perturbation p : {Perturbation::tanh, Perturbation::bump, Perturbation::cosine})
    if (s == perturbation_name(p)) return p;
  throw DomainError("unknown perturbation '" + s + "' (tanh, bump, cosine)");
}

namespace {

double radial_mass(const IsotropicDensity& d, double lo, double hi) {
  const int n = d.dim();
  auto g = [&](double r) { return d.measure_factor() * std::pow(r, n - 1) * d(r); };
  Integrator in = d.integrator({1e-12, 1e-300});
  return integrate_interval(g, lo, hi, in).value;
}

double tail_radius(const IsotropicDensity& d, double tail_mass) {
  const double total = radial_mass(d, 0.0, std::numeric_limits<double>::infinity());
  auto tail = [&](double r) { return radial_mass(d, r, std::numeric_limits<double>::infinity()) / total; };
  double hi = 1.0;
  while (tail(hi) > tail_mass) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("truncation_radius: tail too heavy");
  }
  double lo = hi / 2.0;
  if (hi == 1.0) lo = 0.0;
  for (int it = 0; it < 60 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > tail_mass ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

double truncation_radius(const IsotropicDensity& d, double tail_mass) {
  if (std::isfinite(d.support_radius())) return d.support_radius();
  return tail_radius(d, tail_mass);
}

RadialGrid uniform_grid(const IsotropicDensity& d, int cells, double r_max) {
  if (cells < 4) throw DomainError("uniform_grid: need at least 4 cells");
  RadialGrid g;
  g.n = d.dim();
  g.measure = d.measure_factor();
  g.edges = Eigen::VectorXd::LinSpaced(cells + 1, 0.0, r_max);
  return g;
}

namespace {

// Cell volumes and centers from the edges.
void finish_grid(RadialGrid& g) {
  const int m = static_cast<int>(g.edges.size()) - 1;
  g.centers.resize(m);
  g.volumes.resize(m);
  for (int i = 0; i < m; ++i) {
    const double a = g.edges(i), b = g.edges(i + 1);
    g.centers(i) = 0.5 * (a + b);
    g.volumes(i) = g.measure * (std::pow(b, g.n) - std::pow(a, g.n)) / g.n;
  }
}

// Uniform when the truncated domain is short compared with the bulk of the
// mass; otherwise r = (H/k) sinh(k s) on s in [0, 1] with H the bulk radius,
// which keeps the bulk resolved and stretches geometrically into a heavy tail.
RadialGrid make_grid(const IsotropicDensity& d, const GridSpec& spec) {
  double r_max = spec.r_max;
  if (!(r_max > 0)) r_max = truncation_radius(d, spec.tail_mass);
  r_max = std::min(r_max, d.support_radius());
  RadialGrid g = uniform_grid(d, spec.cells, r_max);
  if (std::isinf(d.support_radius())) {
    const double bulk = tail_radius(d, 1e-4);
    if (r_max > 2.0 * bulk) {
      const double ratio = r_max / bulk;
      // sinh(k)/k = ratio
      double lo = 1e-6, hi = 1.0;
      while (std::sinh(hi) / hi < ratio) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::sinh(mid) / mid < ratio ? lo : hi) = mid;
      }
      const double k = 0.5 * (lo + hi);
      for (int i = 0; i <= spec.cells; ++i) g.edges(i) = bulk / k * std::sinh(k * i / spec.cells);
      g.edges(spec.cells) = r_max;
    }
  }
  finish_grid(g);
  return g;
}

}  // namespace

Solver::Solver(const IsotropicDensity& d, WeightFunction K, GridSpec spec) : d_(d), K_(std::move(K)) {
  grid_ = make_grid(d_, spec);
  const int m = grid_.cells();
  minf_.resize(m);
  for (int i = 0; i < m; ++i) minf_(i) = radial_mass(d_, grid_.edges(i), grid_.edges(i + 1));
  if (!(minf_.minCoeff() > 0)) throw NumericalError("Solver: equilibrium cell mass vanishes");
  minf_ /= minf_.sum();

  a_.resize(m - 1);
  for (int i = 0; i + 1 < m; ++i) {
    const double r = grid_.edges(i + 1);
    const double k = K_(r);
    if (!(k > 0)) throw DomainError("Solver: K is not positive at an interior face of " + d_.label());
    a_(i) = grid_.measure * std::pow(r, grid_.n - 1) * k * d_(r) / (grid_.centers(i + 1) - grid_.centers(i));
  }
}

FPState Solver::state_from_ratio(const Eigen::VectorXd& F, double t) const {
  FPState s;
  s.values = (F.array() * minf_.array() / grid_.volumes.array()).matrix();
  s.t = t;
  s.mass = F.dot(minf_);
  return s;
}

Eigen::VectorXd Solver::ratio(const FPState& s) const {
  return (s.values.array() * grid_.volumes.array() / minf_.array()).matrix();
}

FPState Solver::equilibrium_state() const {
  return state_from_ratio(Eigen::VectorXd::Ones(grid_.cells()));
}

FPState Solver::perturbed_state(Perturbation p, double eps) const {
  if (std::abs(eps) > 0.2) throw DomainError("perturbed_state: |eps| must be <= 0.2");
  const Eigen::VectorXd& c = grid_.centers;
  const double s = std::max(c.dot(minf_), 1e-3);  // mean radius
  const double span = std::isfinite(d_.support_radius()) ? d_.support_radius() : 4.0 * s;
  Eigen::VectorXd g(c.size());
  for (int i = 0; i < c.size(); ++i) {
    switch (p) {
      case Perturbation::tanh: g(i) = std::tanh(c(i) / s - 1.0); break;
      case Perturbation::bump: g(i) = std::exp(-(c(i) / s) * (c(i) / s)); break;
      case Perturbation::cosine: g(i) = std::cos(kPi * std::min(c(i) / span, 1.0)); break;
    }
  }
  g.array() -= g.dot(minf_);
  g /= g.cwiseAbs().maxCoeff();
  return state_from_ratio((1.0 + eps * g.array()).matrix());
}

void Solver::apply(const Eigen::VectorXd& F, Eigen::VectorXd& out) const {
  out.setZero(F.size());
  for (int i = 0; i < a_.size(); ++i) {
    const double J = a_(i) * (F(i + 1) - F(i));
    out(i) += J;
    out(i + 1) -= J;
  }
}

double Solver::steady_flux_residual() const {
  Eigen::VectorXd r;
  apply(Eigen::VectorXd::Ones(grid_.cells()), r);
  return r.cwiseAbs().maxCoeff() / a_.maxCoeff();
}

double Solver::max_explicit_dt() const {
  double dt = std::numeric_limits<double>::infinity();
  const int m = grid_.cells();
  for (int i = 0; i < m; ++i) {
    const double s = (i > 0 ? a_(i - 1) : 0.0) + (i + 1 < m ? a_(i) : 0.0);
    if (s > 0) dt = std::min(dt, minf_(i) / s);
  }
  return dt;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat implicit_matrix(const Eigen::VectorXd& minf, const Eigen::VectorXd& a, double dt) {
  const int m = static_cast<int>(minf.size());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * m);
  for (int i = 0; i < m; ++i) {
    double diag = minf(i);
    if (i > 0) {
      diag += dt * a(i - 1);
      t.emplace_back(i, i - 1, -dt * a(i - 1));
    }
    if (i + 1 < m) {
      diag += dt * a(i);
      t.emplace_back(i, i + 1, -dt * a(i));
    }
    t.emplace_back(i, i, diag);
  }
  SpMat M(m, m);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

// Entries in [-1e-14, 0) are rounding: zero them and rescale the rest to keep
// the mass. Anything more negative is a real failure.
void clamp_negative(Eigen::VectorXd& F, const Eigen::VectorXd& minf) {
  if (F.minCoeff() >= 0.0) return;
  if (F.minCoeff() < -1e-14) throw NumericalError("Solver: negative density");
  const double mass = F.dot(minf);
  F = F.cwiseMax(0.0);
  F *= mass / F.dot(minf);
}

}  // namespace

void Solver::step(FPState& s, double dt, Scheme scheme) const {
  if (!(dt > 0)) throw DomainError("step: dt must be positive");
  Eigen::VectorXd F = ratio(s);
  if (scheme == Scheme::explicit_euler) {
    if (dt > max_explicit_dt() * (1 + 1e-12)) throw DomainError("step: dt exceeds the explicit stability limit");
    Eigen::VectorXd r;
    apply(F, r);
    F += dt * (r.array() / minf_.array()).matrix();
  } else {
    Eigen::SimplicialLDLT<SpMat> solver(implicit_matrix(minf_, a_, dt));
    if (solver.info() != Eigen::Success) throw NumericalError("step: factorization failed");
    const Eigen::VectorXd rhs = (minf_.array() * F.array()).matrix();
    F = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw NumericalError("step: solve failed");
  }
  clamp_negative(F, minf_);
  s = state_from_ratio(F, s.t + dt);
}

double Solver::theta(const FPState& s, ThetaKind k) const {
  const Eigen::VectorXd F = ratio(s);
  double acc = 0.0;
  for (int i = 0; i < F.size(); ++i) {
    const double f = F(i);
    double v = 0.0;
    switch (k) {
      case ThetaKind::chi2: v = (f - 1) * (f - 1); break;
      case ThetaKind::entropy:
        if (!(f > 0)) throw NumericalError("theta: entropy needs F > 0");
        // f log f - f + 1 without cancellation near f = 1.
        v = f * std::log(f) - (f - 1);
        if (std::abs(f - 1) < 1e-4) {
          const double e = f - 1;
          v = e * e * (0.5 - e / 6.0 + e * e / 12.0);
        }
        break;
      case ThetaKind::hellinger2: {
        const double q = std::sqrt(f) + 1;
        v = (f - 1) * (f - 1) / (q * q);
        break;
      }
    }
    acc += minf_(i) * v;
  }
  return acc;
}

double Solver::theta_custom(const FPState& s, const std::function<double(double)>& phi) const {
  const Eigen::VectorXd F = ratio(s);
  double acc = 0.0;
  for (int i = 0; i < F.size(); ++i) acc += minf_(i) * phi(F(i));
  return acc;
}

double Solver::dissipation(const FPState& s, ThetaKind k) const {
  const Eigen::VectorXd F = ratio(s);
  double acc = 0.0;
  for (int i = 0; i < a_.size(); ++i) {
    const double dF = F(i + 1) - F(i);
    const double q = 0.5 * (std::sqrt(std::max(F(i), 0.0)) + std::sqrt(std::max(F(i + 1), 0.0)));
    const double Ff = q * q;
    double phi2 = 2.0;
    if (k == ThetaKind::entropy) {
      if (!(Ff > 0)) throw NumericalError("dissipation: entropy needs F > 0");
      phi2 = 1.0 / Ff;
    } else if (k == ThetaKind::hellinger2) {
      if (!(Ff > 0)) throw NumericalError("dissipation: hellinger needs F > 0");
      phi2 = 0.5 / (Ff * q);
    }
    acc += a_(i) * dF * dF * phi2;
  }
  return acc;
}

double Solver::entropy_dissipation_sqrt_form(const FPState& s) const {
  const Eigen::VectorXd F = ratio(s);
  double acc = 0.0;
  for (int i = 0; i < a_.size(); ++i) {
    const double d = std::sqrt(F(i + 1)) - std::sqrt(F(i));
    acc += 4.0 * a_(i) * d * d;
  }
  return acc;
}

double Solver::l1_distance(const FPState& s) const {
  return (ratio(s).array() - 1.0).abs().matrix().dot(minf_);
}

DecayTrace Solver::evolve(FPState s, const EvolveOptions& opt) const {
  if (!(opt.dt > 0) || !(opt.t_final > 0)) throw DomainError("evolve: need dt > 0 and t_final > 0");
  if (opt.scheme == Scheme::explicit_euler && opt.dt > max_explicit_dt() * (1 + 1e-12))
    throw DomainError("evolve: dt exceeds the explicit stability limit");
  DecayTrace tr;
  auto sample = [&](const FPState& st) {
    tr.times.push_back(st.t);
    tr.theta_chi2.push_back(theta(st, ThetaKind::chi2));
    tr.theta_entropy.push_back(theta(st, ThetaKind::entropy));
    tr.hellinger2.push_back(theta(st, ThetaKind::hellinger2));
    tr.dissipation_chi2.push_back(dissipation(st, ThetaKind::chi2));
    tr.dissipation_entropy.push_back(dissipation(st, ThetaKind::entropy));
    tr.mass.push_back(st.mass);
    tr.l1.push_back(l1_distance(st));
  };
  sample(s);
  const long steps = std::lround(opt.t_final / opt.dt);
  const double t0 = s.t;
  std::optional<Eigen::SimplicialLDLT<SpMat>> ldlt;
  if (opt.scheme == Scheme::implicit) {
    ldlt.emplace(implicit_matrix(minf_, a_, opt.dt));
    if (ldlt->info() != Eigen::Success) throw NumericalError("evolve: factorization failed");
  }
  Eigen::VectorXd F = ratio(s), r;
  for (long k = 1; k <= steps; ++k) {
    if (ldlt) {
      const Eigen::VectorXd rhs = (minf_.array() * F.array()).matrix();
      F = ldlt->solve(rhs);
      if (ldlt->info() != Eigen::Success) throw NumericalError("evolve: solve failed");
    } else {
      apply(F, r);
      F += opt.dt * (r.array() / minf_.array()).matrix();
    }
    clamp_negative(F, minf_);
    if (k % opt.sample_every == 0 || k == steps) sample(state_from_ratio(F, t0 + k * opt.dt));
  }
  tr.entropy0 = tr.theta_entropy.front();
  tr.fitted_rate = fit_decay_rate(tr.times, tr.theta_chi2);
  return tr;
}

double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& theta, double lo, double hi) {
  if (theta.empty() || !(theta[0] > 0)) return std::numeric_limits<double>::quiet_NaN();
  const double th0 = theta[0];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t k = 0; k < t.size(); ++k) {
    if (theta[k] >= lo * th0 && theta[k] <= hi * th0 && theta[k] > 0) {
      const double y = std::log(theta[k]);
      sx += t[k];
      sy += y;
      sxx += t[k] * t[k];
      sxy += t[k] * y;
      ++m;
    }
  }
  if (m < 3) return std::numeric_limits<double>::quiet_NaN();
  const double den = m * sxx - sx * sx;
  if (!(den > 0)) return std::numeric_limits<double>::quiet_NaN();
  return -(m * sxy - sx * sy) / den;
}

Thm2Report verify_thm2_hellinger(const DecayTrace& tr, double c, double slack) {
  Thm2Report r;
  const int m = tr.size();
  if (m < 20) {
    r.inconclusive = true;
    r.note = "trace too short";
    return r;
  }
  const std::vector<double>& h = tr.hellinger2;
  for (int k = 1; k < m; ++k) {
    if (h[k] > h[k - 1] + 1e-9) r.monotone = false;
    if (tr.l1[k] > 2.0 * std::sqrt(h[k]) * (1 + 1e-12) + 1e-15) r.l1_bound = false;
  }
  if (tr.l1[0] > 2.0 * std::sqrt(h[0]) * (1 + 1e-12) + 1e-15) r.l1_bound = false;

  // Above the rounding floor only.
  const double floor = std::max(1e-14 * h[0], 1e-26);
  int checked = 0;
  for (int k = 2 * m / 3 + 1; k < m; ++k) {
    if (h[k] <= floor || h[k - 1] <= floor) continue;
    ++checked;
    if (tr.times[k] * h[k] > tr.times[k - 1] * h[k - 1] * (1 + 1e-9)) r.tail_decreasing = false;
  }
  if (checked == 0 && h[0] > 0) r.note = "final third below the rounding floor";

  for (int k = 1; k < m; ++k) r.integral += 0.5 * (h[k] + h[k - 1]) * (tr.times[k] - tr.times[k - 1]);
  // Exponential tail beyond the last sample at the last observed rate.
  if (h[m - 1] > floor && h[m - 2] > h[m - 1]) {
    const double lam = std::log(h[m - 2] / h[m - 1]) / (tr.times[m - 1] - tr.times[m - 2]);
    if (lam > 0) r.integral += h[m - 1] / lam;
  }
  r.bound = 0.5 * c * tr.entropy0;
  r.integral_ok = r.integral <= r.bound * (1 + slack) + floor * (tr.times[m - 1] - tr.times[0]);
  return r;
}

}  // namespace isofp
