#include "isofp/experiment.hpp"

#include "isofp/weights.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace isofp {

using nlohmann::json;

namespace {

const std::vector<Theorem> kAllTheorems = {Theorem::poincare_1d,          Theorem::product,
                                           Theorem::isotropic_wstar,      Theorem::refined_outside_ball,
                                           Theorem::hybrid,               Theorem::gaussian_anisotropic};

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw DomainError("config: " + where + " must be an object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw DomainError("config: unknown key '" + it.key() + "' in " + where);
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON has no infinities; they become strings so the payload stays lossless.
json jnum(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

std::string slug(const std::string& s) {
  std::string out;
  for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return out;
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i; (i = next++) < count;) body(i);
    });
  for (auto& th : pool) th.join();
}

Eigen::MatrixXd anisotropic_covariance(double sigma, int n) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
  const double a = kPi / 6;
  for (int k = 0; k + 1 < n; ++k) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(n, n);
    G(k, k) = G(k + 1, k + 1) = std::cos(a);
    G(k, k + 1) = -std::sin(a);
    G(k + 1, k) = std::sin(a);
    Q = G * Q;
  }
  Eigen::VectorXd lam(n);
  for (int k = 0; k < n; ++k) lam(k) = n == 1 ? 1.0 : 1.0 + 3.0 * k / (n - 1);
  return sigma * Q * lam.asDiagonal() * Q.transpose();
}

void mark_all(std::vector<InequalityReport>& v, const std::string& note) {
  for (auto& r : v)
    if (r.note.empty()) r.note = note;
    else r.note = note + "; " + r.note;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.densities = {"gaussian:sigma=1,n=2", "cauchy:beta=3,n=2", "exponential:beta=1,n=2", "barenblatt:a=1,p=2,n=2",
                 "inverse_gamma:mu=2"};
  c.theorems = kAllTheorems;
  return c;
}

ExperimentConfig parse_config(const json& j) {
  require_keys(j, "config",
               {"densities", "theorems", "corpus_seed", "tolerances", "solver", "hybrid", "weights", "output_dir"});
  ExperimentConfig c = default_config();
  if (j.contains("densities")) {
    c.densities.clear();
    for (const auto& s : j.at("densities")) {
      const std::string spec = s.get<std::string>();
      try {
        parse_density(spec);
      } catch (const Error& e) {
        throw DomainError("config: density '" + spec + "': " + e.what());
      }
      c.densities.push_back(spec);
    }
  }
  if (j.contains("theorems")) {
    const json& t = j.at("theorems");
    if (t.is_string() && t.get<std::string>() == "all") {
      c.theorems = kAllTheorems;
    } else {
      c.theorems.clear();
      for (const auto& s : t) {
        auto th = parse_theorem(s.get<std::string>());
        if (!th) throw DomainError("config: unknown theorem '" + s.get<std::string>() + "'");
        c.theorems.push_back(*th);
      }
    }
  }
  if (j.contains("corpus_seed")) c.corpus_seed = j.at("corpus_seed").get<std::uint64_t>();
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    require_keys(t, "tolerances", {"quad_rel_tol", "ratio_tol"});
    c.quad_rel_tol = t.value("quad_rel_tol", c.quad_rel_tol);
    c.ratio_tol = t.value("ratio_tol", c.ratio_tol);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    require_keys(s, "solver", {"enabled", "cells", "t_final", "dt", "truncation_mass", "perturbations", "eps"});
    c.evolve = s.value("enabled", c.evolve);
    c.solver.cells = s.value("cells", c.solver.cells);
    c.solver.t_final = s.value("t_final", c.solver.t_final);
    c.solver.dt = s.value("dt", c.solver.dt);
    c.solver.truncation_mass = s.value("truncation_mass", c.solver.truncation_mass);
    c.solver.eps = s.value("eps", c.solver.eps);
    if (s.contains("perturbations")) {
      c.solver.perturbations.clear();
      for (const auto& p : s.at("perturbations")) c.solver.perturbations.push_back(parse_perturbation(p.get<std::string>()));
    }
  }
  if (j.contains("hybrid")) {
    require_keys(j.at("hybrid"), "hybrid", {"c_mult"});
    c.c_mult = j.at("hybrid").value("c_mult", c.c_mult);
  }
  if (j.contains("weights")) {
    require_keys(j.at("weights"), "weights", {"points"});
    c.weight_points = j.at("weights").value("points", c.weight_points);
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();

  if (c.solver.cells < 8) throw DomainError("config: solver.cells must be at least 8");
  if (!(c.solver.dt > 0) || !(c.solver.t_final > 0)) throw DomainError("config: solver dt and t_final must be > 0");
  if (!(c.ratio_tol >= 0) || !(c.quad_rel_tol > 0)) throw DomainError("config: bad tolerances");
  if (c.weight_points < 2) throw DomainError("config: weights.points must be at least 2");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DomainError("config: cannot open " + file.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw DomainError("config: " + file.string() + ": " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json th = json::array();
  for (Theorem t : c.theorems) th.push_back(theorem_name(t));
  json pert = json::array();
  for (Perturbation p : c.solver.perturbations) pert.push_back(perturbation_name(p));
  return {{"densities", c.densities},
          {"theorems", th},
          {"corpus_seed", c.corpus_seed},
          {"tolerances", {{"quad_rel_tol", c.quad_rel_tol}, {"ratio_tol", c.ratio_tol}}},
          {"solver",
           {{"enabled", c.evolve},
            {"cells", c.solver.cells},
            {"t_final", c.solver.t_final},
            {"dt", c.solver.dt},
            {"truncation_mass", c.solver.truncation_mass},
            {"perturbations", pert},
            {"eps", c.solver.eps}}},
          {"hybrid", {{"c_mult", c.c_mult}}},
          {"weights", {{"points", c.weight_points}}},
          {"output_dir", c.output_dir.string()}};
}

CheckOptions check_options(const ExperimentConfig& c) {
  CheckOptions o;
  o.tol = c.ratio_tol;
  o.integ.rel_tol = c.quad_rel_tol;
  return o;
}

std::optional<double> rate_constant(const IsotropicDensity& d) {
  // One dimension: K is itself the P weight. Gaussian and exponential radial
  // weights stay below K with ratio -> 1 at infinity.
  if (d.dim() == 1 || d.half_line()) return 1.0;
  if (d.kind() == DensityKind::gaussian || d.kind() == DensityKind::exponential_type) return 1.0;
  try {
    // Cauchy-type and Barenblatt weights are constant multiples of K.
    return radial_weight(d)(0.0) / equilibrium_weight(d)(0.0);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

bool CheckItem::passed() const {
  if (skipped) return true;
  int ran = 0;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::rejected) continue;
    ++ran;
    if (!r.passed()) return false;
  }
  return ran > 0;
}

std::optional<std::string> inapplicable(const IsotropicDensity& d, Theorem t) {
  const int n = d.dim();
  switch (t) {
    case Theorem::poincare_1d: return std::nullopt;
    case Theorem::gaussian_anisotropic:
      if (d.kind() != DensityKind::gaussian) return "needs a Gaussian density";
      if (n > 4) return "tensor quadrature limited to n <= 4";
      return std::nullopt;
    default: break;
  }
  if (d.half_line()) return "half-line density has no isotropic extension";
  if (n == 1) {
    if (t == Theorem::refined_outside_ball || t == Theorem::hybrid) return "no ball complement to speak of in n = 1";
    return "needs n >= 2; the one-dimensional bound is poincare_1d";
  }
  if (n > 4) return "spherical quadrature limited to n <= 4";
  return std::nullopt;
}

CheckItem run_check(const IsotropicDensity& d, Theorem t, std::uint64_t seed, const CheckOptions& opt,
                    double c_mult) {
  CheckItem item;
  item.density = d.label();
  item.theorem = t;
  if (auto why = inapplicable(d, t)) {
    item.skipped = true;
    item.reason = *why;
    return item;
  }
  const int n = d.dim();
  try {
    switch (t) {
      case Theorem::poincare_1d: {
        const TestCorpus c = default_corpus(1, seed);
        if (n == 1 && !d.half_line()) {
          item.reports = check_poincare_1d(line_density(d), equilibrium_weight(d), c, opt);
        } else {
          item.reports = check_poincare_1d(radial_density(d), radial_weight(d), c, opt);
          mark_all(item.reports, "law of |X|");
        }
        break;
      }
      case Theorem::product: {
        const TestCorpus c = default_corpus(n, seed);
        item.reports = check_product_spherical(d, c, opt);
        if (d.kind() == DensityKind::gaussian) {
          const double s = d.params().sigma;
          std::vector<OneDimDensity> f(n, normal_density(s));
          std::vector<WeightFunction> w(
              n, WeightFunction([s](double) { return s; }, {}, -INFINITY, INFINITY, "sigma"));
          auto cart = check_product(f, w, c, opt);
          mark_all(cart, "cartesian factors");
          item.reports.insert(item.reports.end(), cart.begin(), cart.end());
        }
        break;
      }
      case Theorem::isotropic_wstar: item.reports = check_isotropic_wstar(d, default_corpus(n, seed), opt); break;
      case Theorem::refined_outside_ball:
      case Theorem::hybrid: {
        const WeightFunction K = equilibrium_weight(d);
        double R;
        try {
          R = critical_radius_b1(d, K);
        } catch (const DomainError& e) {
          item.skipped = true;
          item.reason = e.what();
          return item;
        }
        if (t == Theorem::refined_outside_ball) {
          const double outer = std::isinf(d.support_radius()) ? R + 3.0 : d.support_radius();
          item.reports = check_refined_outside_ball(d, K, R, outside_ball_corpus(n, R, outer, seed), opt);
        } else {
          if (!(R > 0)) R = 0.5 * std::min(1.0, d.support_radius());
          const WeightFunction W = hybrid_weight(radial_weight(d), K, R);
          item.reports =
              check_hybrid(d, W, R, c_mult, hybrid_c_of_r(d, R), bounded_corpus(n, R, seed), opt);
        }
        break;
      }
      case Theorem::gaussian_anisotropic: {
        const TestCorpus c = default_corpus(n, seed);
        const double s = d.params().sigma;
        item.reports = check_gaussian_anisotropic(s * Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n),
                                                  c, opt);
        mark_all(item.reports, "isotropic covariance");
        if (n > 1) {
          auto rot = check_gaussian_anisotropic(anisotropic_covariance(s, n), Eigen::VectorXd::Zero(n), c, opt);
          mark_all(rot, "rotated covariance");
          item.reports.insert(item.reports.end(), rot.begin(), rot.end());
        }
        break;
      }
    }
  } catch (const Error& e) {
    item.skipped = false;
    InequalityReport r;
    r.theorem = t;
    r.density = item.density;
    r.witness = "-";
    r.verdict = Verdict::inconclusive;
    r.note = e.what();
    item.reports = {r};
  }
  return item;
}

bool EvolveItem::passed() const {
  return error.empty() && max_theta_increase <= 0.0 && thm2.passed() && trace.fitted_rate >= rate_bound;
}

EvolveItem run_evolve(const IsotropicDensity& d, Perturbation p, const SolverConfig& s) {
  EvolveItem e;
  e.density = d.label();
  e.perturbation = p;
  e.c = rate_constant(d);
  if (e.c) e.rate_bound = 0.95 * 2.0 / *e.c;
  try {
    const Solver sv(d, equilibrium_weight(d), GridSpec{s.cells, 0.0, s.truncation_mass});
    e.trace = sv.evolve(sv.perturbed_state(p, s.eps), EvolveOptions{s.t_final, s.dt, 1, Scheme::implicit});
    const auto& th = e.trace.theta_chi2;
    // Relative slack: rounding in the sums, well below any real increase.
    for (int k = 1; k < e.trace.size(); ++k)
      e.max_theta_increase = std::max(e.max_theta_increase, th[k] - th[k - 1] - 1e-12 * th[0]);
    for (double m : e.trace.mass) e.mass_drift = std::max(e.mass_drift, std::abs(m - e.trace.mass[0]));
    e.thm2 = verify_thm2_hellinger(e.trace, e.c.value_or(INFINITY));
  } catch (const Error& ex) {
    e.error = ex.what();
  }
  return e;
}

json report_to_json(const InequalityReport& r) {
  json j = {{"theorem", theorem_name(r.theorem)},
            {"density", r.density},
            {"weight", r.weight},
            {"witness", r.witness},
            {"lhs", jnum(r.lhs)},
            {"rhs", jnum(r.rhs)},
            {"ratio", jnum(r.ratio)},
            {"ratio_error", jnum(r.ratio_error)},
            {"tol", r.tol},
            {"verdict", verdict_name(r.verdict)},
            {"note", r.note}};
  auto opt = [&](const char* k, const std::optional<double>& v) {
    if (v) j[k] = jnum(*v);
  };
  opt("radial_part", r.radial_part);
  opt("angular_part", r.angular_part);
  opt("volume_term", r.volume_term);
  opt("surface_term", r.surface_term);
  opt("c_mult", r.c_mult);
  opt("c_R", r.c_r);
  opt("empirical_constant", r.empirical_constant);
  return j;
}

json check_item_to_json(const CheckItem& c) {
  json j = {{"density", c.density}, {"theorem", theorem_name(c.theorem)}};
  if (c.skipped) {
    j["status"] = "skipped";
    j["reason"] = c.reason;
    return j;
  }
  int counts[4] = {0, 0, 0, 0};
  double worst = 0.0;
  json reps = json::array();
  for (const auto& r : c.reports) {
    ++counts[static_cast<int>(r.verdict)];
    if (r.verdict != Verdict::rejected && std::isfinite(r.ratio)) worst = std::max(worst, r.ratio);
    reps.push_back(report_to_json(r));
  }
  j["status"] = c.passed() ? "pass" : "fail";
  j["counts"] = {{"pass", counts[0]}, {"fail", counts[1]}, {"inconclusive", counts[2]}, {"rejected", counts[3]}};
  j["worst_ratio"] = worst;
  j["reports"] = reps;
  return j;
}

json evolve_item_to_json(const EvolveItem& e) {
  const auto& t = e.trace;
  json j = {{"density", e.density},
            {"perturbation", perturbation_name(e.perturbation)},
            {"status", e.passed() ? "pass" : "fail"},
            {"fitted_rate", jnum(t.fitted_rate)},
            {"c", e.c ? json(*e.c) : json(nullptr)},
            {"rate_bound", e.rate_bound},
            {"max_theta_increase", e.max_theta_increase},
            {"mass_drift", e.mass_drift},
            {"samples", t.size()},
            {"theta_chi2_final", t.size() ? jnum(t.theta_chi2.back()) : json(nullptr)},
            {"thm2",
             {{"monotone", e.thm2.monotone},
              {"tail_decreasing", e.thm2.tail_decreasing},
              {"l1_bound", e.thm2.l1_bound},
              {"integral", jnum(e.thm2.integral)},
              {"bound", jnum(e.thm2.bound)},
              {"integral_ok", e.thm2.integral_ok},
              {"inconclusive", e.thm2.inconclusive},
              {"note", e.thm2.note}}}};
  if (!e.error.empty()) j["error"] = e.error;
  return j;
}

std::string weights_csv(const IsotropicDensity& d, int points) {
  const WeightFunction K = equilibrium_weight(d);
  const auto closed = closed_form_weight(d);
  std::optional<WeightFunction> kok, wr, ws;
  if (!d.half_line()) kok = kok_weight(d);
  try {
    wr = radial_weight(d);
    if (d.dim() > 1 && !d.half_line()) ws = composite_wstar(d, *wr);
  } catch (const DomainError&) {
  }
  double hi = d.support_radius();
  if (std::isinf(hi)) hi = truncation_radius(d, 1e-4);
  std::ostringstream out;
  out << "rho,f,K,K_ok,K_closed,residual,w_radial,w_star\n";
  auto opt = [](const std::optional<WeightFunction>& w, double r) { return w ? num((*w)(r)) : std::string(); };
  for (int k = 1; k <= points; ++k) {
    const double r = hi * k / (points + 1);
    out << num(r) << ',' << num(d(r)) << ',' << num(K(r)) << ',' << opt(kok, r) << ',' << opt(closed, r) << ','
        << num(steady_state_residual(d, K, r)) << ',' << opt(wr, r) << ',' << opt(ws, r) << '\n';
  }
  return out.str();
}

std::string reports_csv(const std::vector<CheckItem>& items) {
  std::ostringstream out;
  out << "theorem,density,weight,witness,lhs,rhs,ratio,ratio_error,verdict,note\n";
  auto q = [](const std::string& s) {
    std::string r = "\"";
    for (char ch : s) r += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return r + "\"";
  };
  for (const auto& c : items) {
    if (c.skipped) {
      out << theorem_name(c.theorem) << ',' << q(c.density) << ",,,,,,,skipped," << q(c.reason) << '\n';
      continue;
    }
    for (const auto& r : c.reports)
      out << theorem_name(r.theorem) << ',' << q(c.density) << ',' << q(r.weight) << ',' << q(r.witness) << ','
          << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.ratio) << ',' << num(r.ratio_error) << ','
          << verdict_name(r.verdict) << ',' << q(r.note) << '\n';
  }
  return out.str();
}

std::string trace_csv(const DecayTrace& t) {
  std::ostringstream out;
  out << "t,theta_chi2,theta_entropy,hellinger2,I_chi2,I_entropy,mass,l1\n";
  for (int k = 0; k < t.size(); ++k)
    out << num(t.times[k]) << ',' << num(t.theta_chi2[k]) << ',' << num(t.theta_entropy[k]) << ','
        << num(t.hellinger2[k]) << ',' << num(t.dissipation_chi2[k]) << ',' << num(t.dissipation_entropy[k]) << ','
        << num(t.mass[k]) << ',' << num(t.l1[k]) << '\n';
  return out.str();
}

std::string summary_markdown(const json& reports, const json& rates) {
  std::ostringstream out;
  char buf[256];
  out << "# isofp run summary\n\n";
  if (reports.contains("corpus_seed")) out << "Corpus seed: " << reports["corpus_seed"].dump() << "\n\n";
  out << "## Inequality checks\n\n";
  out << "| density | theorem | status | pass | fail | inconclusive | rejected | worst ratio |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& it : reports.value("items", json::array())) {
    const std::string st = it.value("status", "");
    if (st == "skipped") {
      out << "| " << it["density"].get<std::string>() << " | " << it["theorem"].get<std::string>()
          << " | skipped: " << it.value("reason", "") << " | | | | | |\n";
      continue;
    }
    const json& c = it["counts"];
    std::snprintf(buf, sizeof buf, "%.9f", it.value("worst_ratio", 0.0));
    out << "| " << it["density"].get<std::string>() << " | " << it["theorem"].get<std::string>() << " | " << st
        << " | " << c["pass"] << " | " << c["fail"] << " | " << c["inconclusive"] << " | " << c["rejected"] << " | "
        << buf << " |\n";
  }
  if (rates.is_array() && !rates.empty()) {
    out << "\n## Relaxation\n\n";
    out << "| density | perturbation | status | fitted chi2 rate | 2/c | thm2 integral | thm2 bound |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& e : rates) {
      auto show = [&](const json& v) {
        if (v.is_number()) {
          std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
          return std::string(buf);
        }
        return v.is_null() ? std::string("-") : v.dump();
      };
      const json& c = e["c"];
      const std::string two_over_c = c.is_number() ? show(json(2.0 / c.get<double>())) : "-";
      out << "| " << e["density"].get<std::string>() << " | " << e["perturbation"].get<std::string>() << " | "
          << e["status"].get<std::string>() << " | " << show(e["fitted_rate"]) << " | " << two_over_c << " | "
          << show(e["thm2"]["integral"]) << " | " << show(e["thm2"]["bound"]) << " |\n";
    }
  }
  return out.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  std::string hex;
  char b[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

RunResult run(const ExperimentConfig& c, int threads) {
  namespace fs = std::filesystem;
  const auto started = std::chrono::system_clock::now();
  std::vector<IsotropicDensity> dens;
  for (const auto& s : c.densities) dens.push_back(parse_density(s));
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec) throw DomainError("run: cannot create " + c.output_dir.string() + ": " + ec.message());

  // Jobs in config order; each writes only its own slot.
  const CheckOptions opt = check_options(c);
  const int nd = static_cast<int>(dens.size());
  const int nt = static_cast<int>(c.theorems.size());
  std::vector<CheckItem> checks(nd * nt);
  std::vector<EvolveItem> evolves;
  std::vector<std::pair<int, Perturbation>> ejobs;
  if (c.evolve)
    for (int i = 0; i < nd; ++i)
      for (Perturbation p : c.solver.perturbations) ejobs.push_back({i, p});
  evolves.resize(ejobs.size());
  const int total = nd * nt + static_cast<int>(ejobs.size());
  parallel_for(total, threads, [&](int k) {
    if (k < nd * nt) {
      checks[k] = run_check(dens[k / nt], c.theorems[k % nt], c.corpus_seed, opt, c.c_mult);
    } else {
      const auto& [i, p] = ejobs[k - nd * nt];
      evolves[k - nd * nt] = run_evolve(dens[i], p, c.solver);
    }
  });

  RunResult res;
  std::map<std::string, std::string> files;  // name -> contents; one writer, sorted
  for (const auto& d : dens) files["weights_" + slug(d.label()) + ".csv"] = weights_csv(d, c.weight_points);

  json items = json::array();
  for (const auto& ci : checks) {
    items.push_back(check_item_to_json(ci));
    ++res.items;
    if (ci.skipped) ++res.skipped;
    else if (!ci.passed()) ++res.failed;
  }
  const json reports = {{"corpus_seed", c.corpus_seed}, {"items", items}};
  files["reports.json"] = reports.dump(2) + "\n";
  files["reports.csv"] = reports_csv(checks);

  json rates = json::array();
  for (const auto& e : evolves) {
    const std::string name = "trace_" + slug(e.density) + "_" + perturbation_name(e.perturbation) + ".csv";
    json j = evolve_item_to_json(e);
    if (e.error.empty()) {
      files[name] = trace_csv(e.trace);
      j["trace"] = name;
    }
    rates.push_back(j);
    ++res.items;
    if (!e.passed()) ++res.failed;
  }
  files["rates.json"] = rates.dump(2) + "\n";
  files["summary.md"] = summary_markdown(reports, rates);
  files["config.json"] = config_to_json(c).dump(2) + "\n";

  json manifest = json::array();
  for (const auto& [name, body] : files) {
    std::ofstream out(c.output_dir / name, std::ios::binary);
    out << body;
    if (!out) throw Error("run: failed writing " + (c.output_dir / name).string());
    manifest.push_back({{"path", name}, {"bytes", body.size()}, {"sha256", sha256_hex(body)}});
    res.files.push_back(c.output_dir / name);
  }
  const std::string mbody = json{{"files", manifest}}.dump(2) + "\n";
  std::ofstream(c.output_dir / "manifest.json", std::ios::binary) << mbody;
  res.files.push_back(c.output_dir / "manifest.json");

  // Timestamps live here only, so everything above is reproducible.
  auto iso = [](std::chrono::system_clock::time_point tp) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(tp);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return std::string(buf);
  };
  const auto finished = std::chrono::system_clock::now();
  const json meta = {{"started", iso(started)},
                     {"finished", iso(finished)},
                     {"seconds", std::chrono::duration<double>(finished - started).count()},
                     {"manifest_sha256", sha256_hex(mbody)},
                     {"items", res.items},
                     {"failed", res.failed},
                     {"skipped", res.skipped}};
  std::ofstream(c.output_dir / "metadata.json") << meta.dump(2) << "\n";
  res.files.push_back(c.output_dir / "metadata.json");
  res.exit_code = res.failed == 0 ? 0 : 1;
  return res;
}

}  // namespace isofp
