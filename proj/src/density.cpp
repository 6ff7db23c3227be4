#include "isofp/density.hpp"

#include <charconv>
#include <cstdio>
#include <map>

namespace isofp {

const char* kind_name(DensityKind k) {
  switch (k) {
    case DensityKind::gaussian: return "gaussian";
    case DensityKind::cauchy_type: return "cauchy";
    case DensityKind::exponential_type: return "exponential";
    case DensityKind::barenblatt: return "barenblatt";
    case DensityKind::inverse_gamma_1d: return "inverse_gamma";
  }
  return "?";
}

const char* provenance_name(WeightProvenance p) {
  switch (p) {
    case WeightProvenance::closed_form: return "closed_form";
    case WeightProvenance::kok_quadrature: return "kok_quadrature";
    case WeightProvenance::p_formula: return "p_formula";
    case WeightProvenance::pq_family: return "pq_family";
    case WeightProvenance::composite_wstar: return "composite_Wstar";
    case WeightProvenance::angular: return "angular";
    case WeightProvenance::hybrid: return "hybrid_W";
  }
  return "?";
}

IsotropicDensity::IsotropicDensity(DensityKind kind, DensityParams params, int n)
    : kind_(kind), params_(params), n_(n) {
  if (n < 1) throw DomainError("density: dimension must be >= 1");
  support_ = std::numeric_limits<double>::infinity();
  measure_ = sphere_area(n);
  switch (kind) {
    case DensityKind::gaussian:
      if (!(params.sigma > 0)) throw DomainError("gaussian: sigma must be > 0");
      norm_ = std::pow(2.0 * kPi * params.sigma, -0.5 * n);
      break;
    case DensityKind::cauchy_type:
      if (!(params.beta > 0.5 * n))
        throw DomainError("cauchy: beta must exceed n/2 (otherwise not integrable)");
      break;
    case DensityKind::exponential_type:
      if (!(params.beta > 0)) throw DomainError("exponential: beta must be > 0");
      norm_ = std::exp(n * std::log(params.beta) + std::lgamma(0.5 * n) - std::log(2.0) -
                       0.5 * n * std::log(kPi) - std::lgamma(n));
      break;
    case DensityKind::barenblatt:
      if (!(params.p > 1)) throw DomainError("barenblatt: p must be > 1");
      if (!(params.a > 0)) throw DomainError("barenblatt: a must be > 0");
      support_ = params.a;
      break;
    case DensityKind::inverse_gamma_1d:
      if (n != 1) throw DomainError("inverse_gamma: lives on (0, inf), n must be 1");
      if (!(params.mu > 0)) throw DomainError("inverse_gamma: mu must be > 0");
      measure_ = 1.0;
      norm_ = std::exp((1.0 + params.mu) * std::log(params.mu) - std::lgamma(1.0 + params.mu));
      break;
  }
  if (kind == DensityKind::cauchy_type || kind == DensityKind::barenblatt) {
    Integrator integ = integrator();
    integ.rel_tol = 1e-12;
    const auto m = integrate_interval(
        [this](double r) { return std::pow(r, n_ - 1) * profile(r); }, 0.0, support_, integ);
    norm_ = 1.0 / (measure_ * m.value);
  }
}

double IsotropicDensity::log_profile(double rho) const {
  if (kind_ == DensityKind::inverse_gamma_1d) {
    if (!(rho > 0)) return -std::numeric_limits<double>::infinity();
    return -params_.mu / rho - (2.0 + params_.mu) * std::log(rho);
  }
  const double r = std::abs(rho);
  switch (kind_) {
    case DensityKind::gaussian: return -r * r / (2.0 * params_.sigma);
    case DensityKind::cauchy_type: return -params_.beta * std::log1p(r * r);
    case DensityKind::exponential_type: return -params_.beta * r;
    case DensityKind::barenblatt: {
      const double s = params_.a * params_.a - r * r;
      return s > 0 ? std::log(s) / (params_.p - 1.0) : -std::numeric_limits<double>::infinity();
    }
    default: return -std::numeric_limits<double>::infinity();
  }
}

double IsotropicDensity::profile(double rho) const {
  if (kind_ == DensityKind::inverse_gamma_1d) {
    if (!(rho > 0)) return 0.0;
    return std::exp(-params_.mu / rho - (2.0 + params_.mu) * std::log(rho));
  }
  const double r = std::abs(rho);
  switch (kind_) {
    case DensityKind::gaussian: return std::exp(-r * r / (2.0 * params_.sigma));
    case DensityKind::cauchy_type: return std::pow(1.0 + r * r, -params_.beta);
    case DensityKind::exponential_type: return std::exp(-params_.beta * r);
    case DensityKind::barenblatt: {
      const double s = params_.a * params_.a - r * r;
      return s > 0 ? std::pow(s, 1.0 / (params_.p - 1.0)) : 0.0;
    }
    default: return 0.0;
  }
}

double IsotropicDensity::max_moment() const {
  if (kind_ == DensityKind::cauchy_type) return 2.0 * params_.beta - n_;
  if (kind_ == DensityKind::inverse_gamma_1d) return 1.0 + params_.mu;
  return std::numeric_limits<double>::infinity();
}

Integrator IsotropicDensity::integrator(Integrator base) const {
  if (algebraic_tail()) base.tail = TailMap::log_rational;
  return base;
}

std::string IsotropicDensity::label() const {
  char buf[128];
  switch (kind_) {
    case DensityKind::gaussian:
      std::snprintf(buf, sizeof buf, "gaussian:sigma=%g,n=%d", params_.sigma, n_);
      break;
    case DensityKind::cauchy_type:
      std::snprintf(buf, sizeof buf, "cauchy:beta=%g,n=%d", params_.beta, n_);
      break;
    case DensityKind::exponential_type:
      std::snprintf(buf, sizeof buf, "exponential:beta=%g,n=%d", params_.beta, n_);
      break;
    case DensityKind::barenblatt:
      std::snprintf(buf, sizeof buf, "barenblatt:a=%g,p=%g,n=%d", params_.a, params_.p, n_);
      break;
    case DensityKind::inverse_gamma_1d:
      std::snprintf(buf, sizeof buf, "inverse_gamma:mu=%g", params_.mu);
      break;
  }
  return buf;
}

IsotropicDensity make_density(DensityKind kind, DensityParams params, int n) {
  return IsotropicDensity(kind, params, n);
}

double eval_density(const IsotropicDensity& d, double rho) { return d(rho); }

namespace {

double parse_number(std::string_view key, std::string_view v) {
  double x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw DomainError("density spec: bad value for '" + std::string(key) + "': " + std::string(v));
  return x;
}

}  // namespace

IsotropicDensity parse_density(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  static const std::map<std::string, DensityKind, std::less<>> kinds = {
      {"gaussian", DensityKind::gaussian},
      {"cauchy", DensityKind::cauchy_type},
      {"cauchy_type", DensityKind::cauchy_type},
      {"exponential", DensityKind::exponential_type},
      {"exponential_type", DensityKind::exponential_type},
      {"barenblatt", DensityKind::barenblatt},
      {"inverse_gamma", DensityKind::inverse_gamma_1d},
      {"inverse_gamma_1d", DensityKind::inverse_gamma_1d},
  };
  const auto it = kinds.find(name);
  if (it == kinds.end()) throw DomainError("unknown density kind: " + std::string(name));
  const DensityKind kind = it->second;

  DensityParams params;
  int n = 1;
  bool have_beta = false;
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw DomainError("density spec: expected key=value, got " + std::string(item));
    const std::string_view key = item.substr(0, eq), val = item.substr(eq + 1);
    const double x = parse_number(key, val);
    if (key == "n") {
      if (x != std::floor(x) || x < 1) throw DomainError("density spec: n must be a positive integer");
      n = static_cast<int>(x);
    } else if (key == "sigma") {
      params.sigma = x;
    } else if (key == "beta") {
      params.beta = x;
      have_beta = true;
    } else if (key == "a") {
      params.a = x;
    } else if (key == "p") {
      params.p = x;
    } else if (key == "mu") {
      params.mu = x;
    } else {
      throw DomainError("density spec: unknown key '" + std::string(key) + "'");
    }
  }
  if (kind == DensityKind::cauchy_type && !have_beta) throw DomainError("cauchy: beta is required");
  return IsotropicDensity(kind, params, n);
}

double RadialMarginal::operator()(double rho) const {
  if (rho < 0) return 0.0;
  return sigma_n * std::pow(rho, base.dim() - 1) * base(rho);
}

RadialMarginal radial_marginal(const IsotropicDensity& d) {
  return RadialMarginal{d, d.measure_factor()};
}

std::optional<WeightFunction> closed_form_weight(const IsotropicDensity& d) {
  const DensityParams& p = d.params();
  const double hi = d.support_radius();
  WeightFunction::Origin origin{WeightProvenance::closed_form, {}, {}, {}};
  char desc[128];
  switch (d.kind()) {
    case DensityKind::gaussian: {
      const double s = p.sigma;
      std::snprintf(desc, sizeof desc, "K=%g", s);
      return WeightFunction([s](double) { return s; }, origin, 0.0, hi, desc);
    }
    case DensityKind::cauchy_type: {
      if (!(p.beta > 1)) return std::nullopt;
      const double c = 1.0 / (2.0 * (p.beta - 1.0));
      std::snprintf(desc, sizeof desc, "K=(1+rho^2)/(2(beta-1)), beta=%g", p.beta);
      return WeightFunction([c](double r) { return c * (1.0 + r * r); }, origin, 0.0, hi, desc);
    }
    case DensityKind::exponential_type: {
      const double b = p.beta;
      std::snprintf(desc, sizeof desc, "K=(1+beta rho)/beta^2, beta=%g", b);
      return WeightFunction([b](double r) { return (1.0 + b * std::abs(r)) / (b * b); }, origin, 0.0, hi, desc);
    }
    case DensityKind::barenblatt: {
      const double c = (p.p - 1.0) / (2.0 * p.p), a2 = p.a * p.a;
      std::snprintf(desc, sizeof desc, "K=(p-1)/(2p)(a^2-rho^2), a=%g, p=%g", p.a, p.p);
      return WeightFunction([c, a2](double r) { return std::max(0.0, c * (a2 - r * r)); }, origin,
                            0.0, hi, desc);
    }
    case DensityKind::inverse_gamma_1d: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace isofp
