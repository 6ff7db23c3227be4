#include "isofp/experiment.hpp"
#include "isofp/weights.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void emit(const std::string& out_dir, const std::string& name, const std::string& body) {
  if (out_dir.empty()) {
    std::cout << body;
    return;
  }
  fs::create_directories(out_dir);
  std::ofstream(fs::path(out_dir) / name, std::ios::binary) << body;
  std::cerr << "wrote " << (fs::path(out_dir) / name).string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Poincare inequalities and Fokker-Planck relaxation for isotropic densities"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_file, out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_file, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Corpus seed (overrides the config)");
  app.add_option("--out", out_dir, "Output directory (stdout when omitted, except for run)");

  std::string density;
  auto* weights = app.add_subcommand("weights", "Tabulate f, K, K-ok, residual and radial weights");
  weights->add_option("--density,-d", density, "e.g. cauchy:beta=3,n=2")->required();
  int points = 50;
  weights->add_option("--points", points, "Interior grid points");

  auto* check = app.add_subcommand("check", "Run one inequality check over the test corpus");
  std::string theorem;
  double tol = -1.0;
  check->add_option("--theorem,-t", theorem, "poincare_1d|product|isotropic_Wstar|refined_outside_ball|hybrid|"
                                              "gaussian_anisotropic")
      ->required();
  check->add_option("--density,-d", density)->required();
  check->add_option("--corpus-seed", seed);
  check->add_option("--tol", tol, "Ratio tolerance");

  auto* evolve = app.add_subcommand("evolve", "Relax a perturbed equilibrium and record the decay trace");
  evolve->add_option("--density,-d", density)->required();
  std::string perturbation = "tanh";
  evolve->add_option("--perturbation", perturbation, "tanh|bump|cosine");
  isofp::SolverConfig sc;
  evolve->add_option("--cells", sc.cells);
  evolve->add_option("--t-final", sc.t_final);
  evolve->add_option("--dt", sc.dt);
  evolve->add_option("--eps", sc.eps);

  auto* run = app.add_subcommand("run", "Run the configured experiment matrix");
  int threads = 0;
  run->add_option("--threads", threads, "Worker threads (0: hardware)");

  auto* report = app.add_subcommand("report", "Rebuild summary.md from a run directory");
  std::string run_dir;
  report->add_option("dir", run_dir, "Run output directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    isofp::ExperimentConfig cfg = config_file.empty() ? isofp::default_config() : isofp::load_config(config_file);
    if (seed) cfg.corpus_seed = *seed;
    if (tol >= 0) cfg.ratio_tol = tol;

    if (*weights) {
      const auto d = isofp::parse_density(density);
      emit(out_dir, "weights_" + d.label() + ".csv", isofp::weights_csv(d, points));
      return 0;
    }
    if (*check) {
      auto th = isofp::parse_theorem(theorem);
      if (!th) throw isofp::DomainError("unknown theorem '" + theorem + "'");
      const auto d = isofp::parse_density(density);
      const auto item = isofp::run_check(d, *th, cfg.corpus_seed, isofp::check_options(cfg), cfg.c_mult);
      json j = isofp::check_item_to_json(item);
      j["corpus_seed"] = cfg.corpus_seed;
      if (out_dir.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        emit(out_dir, "reports.json", j.dump(2) + "\n");
        emit(out_dir, "reports.csv", isofp::reports_csv({item}));
      }
      std::cerr << theorem << " on " << d.label() << ": " << j["status"].get<std::string>() << "\n";
      return item.passed() ? 0 : 1;
    }
    if (*evolve) {
      const auto d = isofp::parse_density(density);
      const auto e = isofp::run_evolve(d, isofp::parse_perturbation(perturbation), sc);
      const json j = isofp::evolve_item_to_json(e);
      if (out_dir.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        emit(out_dir, "trace.csv", isofp::trace_csv(e.trace));
        emit(out_dir, "rates.json", j.dump(2) + "\n");
      }
      return e.passed() ? 0 : 1;
    }
    if (*run) {
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto r = isofp::run(cfg, threads);
      std::cerr << r.items << " items, " << r.skipped << " skipped, " << r.failed << " failed; outputs in "
                << cfg.output_dir.string() << "\n";
      return r.exit_code;
    }
    if (*report) {
      auto read = [&](const char* name) {
        std::ifstream in(fs::path(run_dir) / name);
        if (!in) throw isofp::DomainError(std::string("report: missing ") + name);
        return json::parse(in);
      };
      const json reports = read("reports.json");
      json rates = json::array();
      if (fs::exists(fs::path(run_dir) / "rates.json")) rates = read("rates.json");
      const std::string md = isofp::summary_markdown(reports, rates);
      std::cout << md;
      std::ofstream(fs::path(run_dir) / "summary.md", std::ios::binary) << md;
      return 0;
    }
  } catch (const isofp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
