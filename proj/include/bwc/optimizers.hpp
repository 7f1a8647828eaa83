#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bwc/circuit.hpp"
#include "bwc/cost_gradient.hpp"
#include "bwc/mpo.hpp"
#include "bwc/stiefel.hpp"

namespace bwc {

struct AdamHyperparams {
  double alpha = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps_div = 1e-12;
  bool bias_correction = false;
  /// Learning rate at step t is alpha / (1 + lr_decay * t). Zero keeps it constant.
  double lr_decay = 0.0;
};

struct RiemannianAdamState {
  int step = 0;
  TangentBundle first_momentum;  // empty until the first step
  double second_momentum = 0.0;
  AdamHyperparams hyper;
};

/// One Riemannian ADAM update of every gate. `euclidean_gradient` must be taken at the current circuit.
void riemannian_adam_step(BrickwallCircuit& circuit, RiemannianAdamState& state,
                          const GateIndexed<Mat4>& euclidean_gradient);
void riemannian_adam_step(BrickwallCircuit& circuit, RiemannianAdamState& state, const GradientResult& grad);

enum class SweepOrder { top_down, bottom_up };

/// One local-update step: every layer visited once in `order`, gates updated left-right-left.
/// Returns the overlap T of the updated circuit. `log` receives the sequence of gate updates.
cplx local_sweep_step(BrickwallCircuit& circuit, const Mpo& u_ref, SweepOrder order, int chi_max = kUnboundedChi,
                      std::vector<GatePlacement>* log = nullptr);

/// Relative-deviation criterion on the latest entry with window n = ceil(0.01 i).
bool early_stop(const std::vector<double>& trajectory, double tol = 1e-5);

enum class OptimizerMethod { riemannian, sweep };
enum class StopReason { max_iter, early_stop, target_cost };

std::string to_string(OptimizerMethod m);
std::string to_string(StopReason r);
OptimizerMethod optimizer_method_from_string(const std::string& s);

struct OptimizeOptions {
  OptimizerMethod method = OptimizerMethod::riemannian;
  int max_iter = 1000;
  bool early_stopping = true;
  double early_stop_tol = 1e-5;
  std::optional<double> target_cost;
  AdamHyperparams adam;
  int chi_max = kUnboundedChi;
  /// Sweep steps alternate top-down and bottom-up starting from this order.
  SweepOrder first_sweep = SweepOrder::top_down;
  /// Log progress every this many iterations; zero disables.
  int log_every = 0;
};

struct RunRecord {
  nlohmann::json config;
  /// C_HS after each iteration, preceded by the initial cost.
  std::vector<double> trajectory;
  int iterations = 0;
  StopReason stop_reason = StopReason::max_iter;
  double wall_time = 0.0;
  std::uint64_t seed = 0;
  BrickwallCircuit circuit;
  std::string circuit_file;

  double initial_cost() const { return trajectory.front(); }
  double final_cost() const { return trajectory.back(); }
  nlohmann::json to_json() const;
};

RunRecord optimize(BrickwallCircuit circuit, const Mpo& u_ref, const OptimizeOptions& options);

nlohmann::json to_json(const OptimizeOptions& o);

}  // namespace bwc
