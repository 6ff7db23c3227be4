#pragma once

#include "isofp/density.hpp"
#include "isofp/fpsolver.hpp"
#include "isofp/inequality.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace isofp {

struct SolverConfig {
  int cells = 400;
  double t_final = 10.0;
  double dt = 1e-2;
  double truncation_mass = 1e-12;
  std::vector<Perturbation> perturbations{Perturbation::tanh};
  double eps = 0.2;
};

struct ExperimentConfig {
  std::vector<std::string> densities;
  std::vector<Theorem> theorems;
  std::uint64_t corpus_seed = 20240611;
  double quad_rel_tol = 1e-10;
  double ratio_tol = 1e-6;
  double c_mult = 4.0;
  // Points of the interior grid in the weights tables.
  int weight_points = 50;
  bool evolve = true;
  SolverConfig solver;
  std::filesystem::path output_dir = "isofp_out";
};

// Every catalog kind and every theorem.
ExperimentConfig default_config();

// Unknown keys, densities or theorems throw DomainError naming the culprit.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& file);
nlohmann::json config_to_json(const ExperimentConfig& c);

CheckOptions check_options(const ExperimentConfig& c);

// Constant c with radial_weight <= c K on the support: the chi-square rate
// of the radial evolution is then at least 2/c. None when no radial weight
// exists for the parameters.
std::optional<double> rate_constant(const IsotropicDensity& d);

// A (density, theorem) pair, run or skipped.
struct CheckItem {
  std::string density;
  Theorem theorem;
  bool skipped = false;
  std::string reason;
  std::vector<InequalityReport> reports;
  // All non-rejected reports pass and at least one ran.
  bool passed() const;
};

// Skip reason when the pair does not apply, else nullopt.
std::optional<std::string> inapplicable(const IsotropicDensity& d, Theorem t);
CheckItem run_check(const IsotropicDensity& d, Theorem t, std::uint64_t seed, const CheckOptions& opt,
                    double c_mult = 4.0);

struct EvolveItem {
  std::string density;
  Perturbation perturbation = Perturbation::tanh;
  DecayTrace trace;
  std::optional<double> c;
  double rate_bound = 0.0;  // 0.95 * 2/c, 0 without c
  double max_theta_increase = 0.0;
  double mass_drift = 0.0;
  Thm2Report thm2;
  std::string error;
  bool passed() const;
};

EvolveItem run_evolve(const IsotropicDensity& d, Perturbation p, const SolverConfig& s);

nlohmann::json report_to_json(const InequalityReport& r);
nlohmann::json check_item_to_json(const CheckItem& c);
nlohmann::json evolve_item_to_json(const EvolveItem& e);

// rho, f, K, K-ok, residual, radial weight, W* on an interior grid.
std::string weights_csv(const IsotropicDensity& d, int points);
std::string reports_csv(const std::vector<CheckItem>& items);
std::string trace_csv(const DecayTrace& t);
std::string summary_markdown(const nlohmann::json& reports, const nlohmann::json& rates);

std::string sha256_hex(const std::string& bytes);

struct RunResult {
  int exit_code = 0;
  int items = 0, failed = 0, skipped = 0;
  std::vector<std::filesystem::path> files;
};

// Writes the weights, reports, traces, summary, manifest and metadata into
// output_dir. Failures are recorded per item; the run continues.
RunResult run(const ExperimentConfig& c, int threads = 0);

}  // namespace isofp
