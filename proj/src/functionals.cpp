#include "isofp/functionals.hpp"

#include <algorithm>

namespace isofp {

namespace {

void require_sphere(const IsotropicDensity& d, const HypersphericalGrid& grid) {
  if (d.half_line()) throw DomainError("isotropic functionals: " + d.label() + " lives on a half-line");
  if (grid.dim() != d.dim()) throw DomainError("isotropic functionals: grid and density dimensions differ");
}

std::vector<double> radial_breaks(const IsotropicDensity& d, const TestFunction& phi, std::vector<double> extra) {
  const double hi = d.support_radius();
  std::vector<double> b;
  for (double r : phi.radial_breaks())
    if (r > 0 && r < hi) b.push_back(r);
  for (double r : extra)
    if (r > 0 && r < hi) b.push_back(r);
  return b;
}

// phi restricted to the sphere of radius R vanishes identically: skip work
// outside the support of compact members.
bool vanishes_at(const TestFunction& phi, double rho) {
  const Support& s = phi.support();
  if (s.kind == SupportKind::outside_ball) return rho <= s.radius;
  if (s.kind == SupportKind::inside_ball) return rho >= s.radius;
  return false;
}

std::pair<double, double> integration_range(const IsotropicDensity& d, const TestFunction& phi) {
  double lo = 0.0, hi = d.support_radius();
  const Support& s = phi.support();
  if (s.kind == SupportKind::outside_ball) lo = std::min(s.radius, hi);
  if (s.kind == SupportKind::inside_ball) hi = std::min(s.radius, hi);
  return {lo, hi};
}

}  // namespace

double expectation(const IsotropicDensity& d, const HypersphericalGrid& grid, const TestFunction& phi,
                   const Integrator& integ) {
  require_sphere(d, grid);
  Point x(d.dim()), g(d.dim());
  auto h = [&](double rho, int j) {
    x = rho * grid.direction(j);
    return phi.eval(x, g);
  };
  // The full range: phi need not vanish off its support after a shift.
  return isotropic_integral(d, grid, h, integ, 0.0, -1.0, radial_breaks(d, phi, {})).value;
}

double variance(const IsotropicDensity& d, const HypersphericalGrid& grid, const TestFunction& phi,
                const Integrator& integ) {
  const double m = expectation(d, grid, phi, integ);
  Point x(d.dim()), g(d.dim());
  auto h = [&](double rho, int j) {
    x = rho * grid.direction(j);
    const double v = phi.eval(x, g) - m;
    return v * v;
  };
  const double v = isotropic_integral(d, grid, h, integ, 0.0, -1.0, radial_breaks(d, phi, {})).value;
  return std::max(v, 0.0);
}

double variance(const IsotropicDensity& d, const TestFunction& phi, const Integrator& integ) {
  const HypersphericalGrid grid(d.dim());
  return variance(d, grid, phi, integ);
}

double weighted_dirichlet(const IsotropicDensity& d, const HypersphericalGrid& grid, const WeightFunction& w,
                          const TestFunction& phi, const Integrator& integ, std::vector<double> extra_breaks) {
  require_sphere(d, grid);
  const auto [lo, hi] = integration_range(d, phi);
  if (!(lo < hi)) return 0.0;
  Point x(d.dim()), g(d.dim());
  auto h = [&](double rho, int j) {
    x = rho * grid.direction(j);
    phi.eval(x, g);
    return g.squaredNorm();
  };
  // The weight factors out of the angular sum.
  const int n = d.dim();
  const double meas = d.measure_factor() / sphere_area(n);
  auto f = [&](double rho) {
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j) acc += h(rho, j) * grid.weight(j);
    return acc * w(rho) * meas * std::pow(rho, n - 1) * d(rho);
  };
  return integrate_interval(f, lo, hi, d.integrator(integ), radial_breaks(d, phi, std::move(extra_breaks))).value;
}

double weighted_dirichlet(const IsotropicDensity& d, const WeightFunction& w, const TestFunction& phi,
                          const Integrator& integ) {
  const HypersphericalGrid grid(d.dim());
  return weighted_dirichlet(d, grid, w, phi, integ);
}

DirichletSplit split_dirichlet_radial_angular(const IsotropicDensity& d, const HypersphericalGrid& grid,
                                              const TestFunction& phi, const WeightFunction& radial_w,
                                              const std::vector<WeightFunction>& angular,
                                              const Integrator& integ) {
  require_sphere(d, grid);
  const int n = d.dim();
  if (static_cast<int>(angular.size()) != n - 1)
    throw DomainError("split_dirichlet_radial_angular: need one angular weight per angle");
  DirichletSplit out;
  out.per_angle.assign(n - 1, 0.0);
  const auto [lo, hi] = integration_range(d, phi);
  if (!(lo < hi)) return out;

  // Per-node angular weights do not depend on rho.
  Eigen::MatrixXd pw(grid.size(), n - 1);
  for (int j = 0; j < grid.size(); ++j)
    for (int i = 0; i < n - 1; ++i) pw(j, i) = angular[i](grid.angles(j)(i));

  const double meas = d.measure_factor() / sphere_area(n);
  Point x(n), g(n);
  auto f = [&](double rho) {
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(n);
    for (int j = 0; j < grid.size(); ++j) {
      const Point& u = grid.direction(j);
      x = rho * u;
      phi.eval(x, g);
      const double dr = g.dot(u);
      acc(0) += grid.weight(j) * dr * dr;
      if (n > 1) {
        const Eigen::VectorXd dth = rho * (grid.direction_jacobian(j).transpose() * g);
        for (int i = 0; i < n - 1; ++i) acc(i + 1) += grid.weight(j) * pw(j, i) * dth(i) * dth(i);
      }
    }
    acc(0) *= radial_w(rho);
    return (acc * (meas * std::pow(rho, n - 1) * d(rho))).eval();
  };
  const Eigen::ArrayXd v =
      integrate_interval(f, lo, hi, d.integrator(integ), radial_breaks(d, phi, {})).value;
  out.radial = v(0);
  for (int i = 0; i < n - 1; ++i) {
    out.per_angle[i] = v(i + 1);
    out.angular += v(i + 1);
  }
  return out;
}

IsotropicMoments isotropic_moments(const IsotropicDensity& d, const HypersphericalGrid& grid,
                                   const TestFunction& phi, const std::vector<WeightFunction>& weights,
                                   const WeightFunction* radial_w, const std::vector<WeightFunction>* angular,
                                   const Integrator& integ, std::vector<double> extra_breaks) {
  require_sphere(d, grid);
  const int n = d.dim();
  const bool split = radial_w != nullptr;
  if (split && (!angular || static_cast<int>(angular->size()) != n - 1))
    throw DomainError("isotropic_moments: need one angular weight per angle");
  IsotropicMoments out;
  out.mean = expectation(d, grid, phi, integ);

  Eigen::MatrixXd pw;
  if (split) {
    pw.resize(grid.size(), n - 1);
    for (int j = 0; j < grid.size(); ++j)
      for (int i = 0; i < n - 1; ++i) pw(j, i) = (*angular)[i](grid.angles(j)(i));
  }
  const int nw = static_cast<int>(weights.size());
  const int ns = split ? n : 0;
  const double meas = d.measure_factor() / sphere_area(n);
  const double m = out.mean;
  Point x(n), g(n);
  auto f = [&](double rho) {
    // [ (phi-m)^2, |grad phi|^2, split components ]
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(2 + ns);
    for (int j = 0; j < grid.size(); ++j) {
      const Point& u = grid.direction(j);
      x = rho * u;
      const double c = phi.eval(x, g) - m;
      const double wj = grid.weight(j);
      acc(0) += wj * c * c;
      acc(1) += wj * g.squaredNorm();
      if (split) {
        const double dr = g.dot(u);
        acc(2) += wj * dr * dr;
        if (n > 1) {
          const Eigen::VectorXd dth = rho * (grid.direction_jacobian(j).transpose() * g);
          for (int i = 0; i < n - 1; ++i) acc(3 + i) += wj * pw(j, i) * dth(i) * dth(i);
        }
      }
    }
    Eigen::ArrayXd r(1 + nw + ns);
    r(0) = acc(0);
    for (int k = 0; k < nw; ++k) r(1 + k) = weights[k](rho) * acc(1);
    if (split) {
      r(1 + nw) = (*radial_w)(rho) * acc(2);
      for (int i = 0; i < n - 1; ++i) r(2 + nw + i) = acc(3 + i);
    }
    return (r * (meas * std::pow(rho, n - 1) * d(rho))).eval();
  };
  const Eigen::ArrayXd v = integrate_interval(f, 0.0, d.support_radius(), d.integrator(integ),
                                              radial_breaks(d, phi, std::move(extra_breaks)))
                               .value;
  out.variance = std::max(v(0), 0.0);
  for (int k = 0; k < nw; ++k) out.dirichlet.push_back(v(1 + k));
  if (split) {
    DirichletSplit s;
    s.radial = v(1 + nw);
    s.per_angle.assign(n - 1, 0.0);
    for (int i = 0; i < n - 1; ++i) {
      s.per_angle[i] = v(2 + nw + i);
      s.angular += v(2 + nw + i);
    }
    out.split = s;
  }
  return out;
}

double surface_dirichlet(const IsotropicDensity& d, const HypersphericalGrid& grid, const TestFunction& phi,
                         double R) {
  require_sphere(d, grid);
  if (!(R > 0) || R >= d.support_radius() || vanishes_at(phi, R)) return 0.0;
  Point x(d.dim()), g(d.dim());
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    x = R * grid.direction(j);
    phi.eval(x, g);
    acc += grid.weight(j) * g.squaredNorm();
  }
  return d(R) * std::pow(R, d.dim() - 1) * acc;
}

OneDimMoments one_dim_moments(const OneDimDensity& f, const std::function<double(double)>& phi,
                              const std::function<double(double)>& dphi, const WeightFunction& w,
                              const Integrator& integ, std::vector<double> extra_breaks) {
  std::vector<double> breaks = f.breaks;
  for (double b : extra_breaks)
    if (b > f.lo && b < f.hi) breaks.push_back(b);
  const Integrator in = f.integrator(integ);
  OneDimMoments m;
  m.mean = integrate_interval([&](double x) { return f(x) * phi(x); }, f.lo, f.hi, in, breaks).value;
  const double mean = m.mean;
  Eigen::ArrayXd v = integrate_interval(
                         [&](double x) {
                           const double px = f(x);
                           const double c = phi(x) - mean;
                           const double dp = dphi(x);
                           Eigen::Array2d r;
                           // Underflowed density: skip w, which divides by f.
                           r << px * c * c, px > 0 ? px * w(x) * dp * dp : 0.0;
                           return r;
                         },
                         f.lo, f.hi, in, breaks)
                         .value;
  m.variance = std::max(v(0), 0.0);
  m.dirichlet = v(1);
  return m;
}

}  // namespace isofp
