#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "bwc/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kResource = 3, kNumerical = 4 };

struct Common {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool dry_run = false;
  bool verbose = false;
};

bwc::ExperimentConfig load(const Common& o) {
  bwc::ExperimentConfig c = bwc::load_config(o.config);
  if (o.seed) c = bwc::with_seed(c, *o.seed);
  return c;
}

void echo(const bwc::ExperimentConfig& c, const bwc::RunOptions& r) {
  std::cout << fmt::format("config hash {}\noutput {}\n", bwc::config_hash(c), r.out_dir.string());
  std::cout << c.normalized.dump(2) << '\n';
}

int run(const std::string& command, const Common& o) {
  const bwc::ExperimentConfig c = load(o);
  if (command == "validate-config") {
    std::cout << "config ok, hash " << bwc::config_hash(c) << '\n';
    return kOk;
  }
  const bwc::RunOptions r{bwc::resolve_output_dir(c, o.out), o.threads};
  if (o.dry_run) {
    echo(c, r);
    return kOk;
  }
  if (command == "build-ref") {
    for (const auto& b : bwc::build_references(c, r))
      std::cout << fmt::format("{} chi={} eps_trot={:.3e} eps_trunc={:.3e} eps_comp={:.3e}\n", b.mpo_file.string(),
                               b.reference.achieved_chi, b.reference.budget.eps_trot, b.reference.budget.eps_trunc,
                               b.reference.budget.eps_comp);
  } else if (command == "optimize") {
    const bwc::ExperimentResult res = bwc::run_experiment(c, r);
    for (const auto& run : res.runs)
      std::cout << fmt::format("L={} seed={} init={:.4e} final={:.4e} ratio={:.2f}\n", run.layers, run.seed,
                               run.record.initial_cost(), run.record.final_cost(),
                               run.record.initial_cost() / run.record.final_cost());
    std::cout << "summary " << res.summary_csv.string() << '\n';
  } else if (command == "scaling") {
    const bwc::ScalingResult res = bwc::scaling_study(c, r);
    for (const auto& f : res.fits)
      std::cout << fmt::format("{}: slope sqrt(C_HS) = {:.3f}, slope C_HS = {:.3f} ({} points)\n", f.family,
                               f.slope_sqrt_cost, f.slope_cost, f.points_used);
    std::cout << "data " << res.csv.string() << "\nfits " << res.fit_json.string() << '\n';
  } else if (command == "compare-methods") {
    const bwc::CompareResult res = bwc::compare_methods(c, r);
    for (std::size_t i = 0; i < res.riemannian.size(); ++i)
      std::cout << fmt::format("L={} riemannian={:.4e} ({} it) sweep={:.4e} ({} it)\n", res.riemannian[i].layers,
                               res.riemannian[i].record.final_cost(), res.riemannian[i].record.iterations,
                               res.sweep[i].record.final_cost(), res.sweep[i].record.iterations);
    std::cout << "comparison " << res.csv.string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brickwall circuit compression against MPO references"};
  app.require_subcommand(1);
  Common o;
  app.add_option("--config", o.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory (default: config, then $BWC_OUTPUT_ROOT, then ./bwc-out)");
  app.add_option("--seed", o.seed, "Override the config seed");
  app.add_option("--threads", o.threads, "Worker threads for independent runs")->check(CLI::PositiveNumber);
  app.add_flag("--dry-run", o.dry_run, "Echo the resolved config without computing");
  app.add_flag("-v,--verbose", o.verbose, "Debug logging");
  app.fallthrough();

  std::string command;
  for (const char* name : {"build-ref", "optimize", "scaling", "compare-methods", "validate-config"}) {
    static const std::map<std::string, std::string> help = {
        {"build-ref", "Build and store the reference MPO with its error budget"},
        {"optimize", "Reference, initialization and optimization for every layer count"},
        {"scaling", "Cost against Trotter step for Trotter and optimized families"},
        {"compare-methods", "Riemannian ADAM against the local sweep"},
        {"validate-config", "Check the config and exit"}};
    app.add_subcommand(name, help.at(name))->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  spdlog::set_level(o.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    return run(command, o);
  } catch (const bwc::ResourceGuardError& e) {
    spdlog::error("resource guard: {}", e.what());
    return kResource;
  } catch (const bwc::NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kNumerical;
  } catch (const bwc::ParameterError& e) {
    spdlog::error("config error: {}", e.what());
    return kConfig;
  } catch (const std::invalid_argument& e) {
    spdlog::error("config error: {}", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
}
