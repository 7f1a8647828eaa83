#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bwc/circuit.hpp"
#include "bwc/errors.hpp"
#include "bwc/models.hpp"
#include "bwc/optimizers.hpp"
#include "bwc/reference.hpp"

namespace bwc {

class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

enum class InitPolicy { automatic, trotter1, trotter2, trotter4 };

struct ScalingBlock {
  std::vector<double> dt;
  std::vector<std::string> families = {"trotter2", "trotter4", "optimized"};
};

struct ExperimentConfig {
  nlohmann::json model;               // raw model block, realized per instance
  std::vector<std::uint64_t> seeds;   // disorder instances; empty for clean models
  std::uint64_t seed = 0;
  double t = 1.0;
  int ref_order = 4;
  int ref_n_reps = 20;
  int ref_chi_max = kUnboundedChi;
  std::optional<double> eps_thres;    // derived from c_final or the Trotter heuristic when absent
  std::optional<double> c_final;
  ReferenceMethod ref_method = ReferenceMethod::automatic;
  std::vector<int> layers;
  InitPolicy init = InitPolicy::automatic;
  OptimizeOptions optimizer;
  std::optional<ScalingBlock> scaling;
  std::string output;
  nlohmann::json normalized;          // echo used for hashing
};

/// Strict parse: unknown keys, wrong types and invalid values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Re-derives the seed-dependent parts after an override.
ExperimentConfig with_seed(const ExperimentConfig& c, std::uint64_t seed);
std::string config_hash(const ExperimentConfig& c);

/// One Hamiltonian per disorder seed, or a single one for clean models.
std::vector<HamiltonianSpec> instances(const ExperimentConfig& c);

struct RunOptions {
  std::filesystem::path out_dir;
  int threads = 1;
};

/// Output root: explicit flag, then the config, then $BWC_OUTPUT_ROOT, then "bwc-out".
std::filesystem::path resolve_output_dir(const ExperimentConfig& c, const std::optional<std::string>& flag);

BrickwallCircuit initial_circuit(const HamiltonianSpec& spec, double t, int L, InitPolicy policy, const Mpo& u_ref);

struct RunOutcome {
  std::uint64_t seed = 0;
  int layers = 0;
  RunRecord record;
  std::filesystem::path record_file;
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;
  std::filesystem::path summary_csv;
};

ExperimentResult run_experiment(const ExperimentConfig& c, const RunOptions& opts);

struct SlopeFit {
  std::string family;
  double slope_sqrt_cost = 0.0;
  double slope_cost = 0.0;
  double residual_sqrt_cost = 0.0;
  double residual_cost = 0.0;
  int points_used = 0;
};

struct ScalingPoint {
  std::string family;
  double dt = 0.0;
  int n_steps = 0;
  int layers = 0;
  double cost_hs = 0.0;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  std::vector<SlopeFit> fits;
  std::filesystem::path csv;
  std::filesystem::path fit_json;
};

/// Log-log least-squares slopes of sqrt(C_HS) and C_HS against dt; non-positive costs are dropped.
SlopeFit fit_slope(const std::string& family, const std::vector<double>& dt, const std::vector<double>& cost);

ScalingResult scaling_study(const ExperimentConfig& c, const RunOptions& opts);

struct CompareResult {
  std::vector<RunOutcome> riemannian;
  std::vector<RunOutcome> sweep;
  std::filesystem::path csv;
};

CompareResult compare_methods(const ExperimentConfig& c, const RunOptions& opts);

struct BuildRefOutcome {
  ReferenceResult reference;
  std::filesystem::path mpo_file;
  std::filesystem::path budget_file;
};

std::vector<BuildRefOutcome> build_references(const ExperimentConfig& c, const RunOptions& opts);

ReferenceSpec reference_spec(const ExperimentConfig& c, const HamiltonianSpec& h);

nlohmann::json circuit_to_json(const BrickwallCircuit& c);
BrickwallCircuit circuit_from_json(const nlohmann::json& j);

}  // namespace bwc
