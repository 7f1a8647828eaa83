#include "bwc/optimizers.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/SVD>
#include <spdlog/spdlog.h>

#include "bwc/errors.hpp"
#include "bwc/linalg.hpp"

namespace bwc {

void riemannian_adam_step(BrickwallCircuit& circuit, RiemannianAdamState& state,
                          const GateIndexed<Mat4>& euclidean_gradient) {
  const AdamHyperparams& h = state.hyper;
  GateIndexed<Mat4> gates = circuit.gate_matrices();
  TangentBundle grad = riemannian_gradient(gates, euclidean_gradient);

  if (state.first_momentum.empty()) state.first_momentum = zero_bundle(gates);
  double gg = 0.0;
  for (std::size_t l = 0; l < gates.size(); ++l) {
    for (std::size_t i = 0; i < gates[l].size(); ++i) {
      // Transport of the old momentum: projection onto the tangent space at the current gate.
      const Mat4 moved = project_to_tangent(gates[l][i], state.first_momentum[l][i].vector).vector;
      state.first_momentum[l][i] = {gates[l][i], h.beta1 * moved + (1.0 - h.beta1) * grad[l][i].vector};
      gg += inner_product(grad[l][i], grad[l][i]);
    }
  }
  state.second_momentum = h.beta2 * state.second_momentum + (1.0 - h.beta2) * gg;
  ++state.step;

  double m_scale = 1.0;
  double v = state.second_momentum;
  if (h.bias_correction) {
    m_scale = 1.0 / (1.0 - std::pow(h.beta1, state.step));
    v /= 1.0 - std::pow(h.beta2, state.step);
  }
  const double lr = h.alpha / (1.0 + h.lr_decay * (state.step - 1));
  const double factor = -lr * m_scale / (std::sqrt(v) + h.eps_div);

  for (std::size_t l = 0; l < gates.size(); ++l)
    for (std::size_t i = 0; i < gates[l].size(); ++i)
      gates[l][i] = retract_polar(gates[l][i], {gates[l][i], factor * state.first_momentum[l][i].vector});
  circuit.set_gate_matrices(gates);
}

void riemannian_adam_step(BrickwallCircuit& circuit, RiemannianAdamState& state, const GradientResult& grad) {
  riemannian_adam_step(circuit, state, grad.euclidean_gradient);
}

namespace {

Mat4 local_update(const Mat4& derivative) {
  const Mat4 target = derivative.conjugate();
  Eigen::JacobiSVD<Mat4> svd(target);
  const auto& s = svd.singularValues();
  if (s(3) <= 1e-12 * std::max(s(0), 1e-300)) spdlog::debug("rank-deficient local environment, polar completed by SVD");
  return polar_unitary_factor(target);
}

// Updates every gate of `layer` twice (left to right, then right to left) and returns the closed overlap.
cplx sweep_layer(BrickwallCircuit& circuit, int l, const Mpo& top, const Mpo& bottom,
                 std::vector<GatePlacement>* log) {
  const Layer layer = circuit.layer(l);
  LayerContraction lc(top, bottom, layer);
  const int n = lc.n_units();
  std::vector<Mat4> gates;
  for (const auto& g : layer) gates.push_back(g.matrix);
  auto gate_ptr = [&](int u) -> const Mat4* {
    const int g = lc.gate_index(u);
    return g >= 0 ? &gates[static_cast<std::size_t>(g)] : nullptr;
  };
  auto update = [&](int u, const DenseTensor& left, const DenseTensor& right) {
    const int g = lc.gate_index(u);
    if (g < 0) return;
    gates[static_cast<std::size_t>(g)] = local_update(lc.derivative(left, u, right));
    if (log) log->push_back({l, g, layer[static_cast<std::size_t>(g)].qubit});
  };

  const std::vector<DenseTensor> rights = lc.right_boundaries(layer);
  std::vector<DenseTensor> lefts(static_cast<std::size_t>(n));
  DenseTensor left = LayerContraction::trivial_boundary();
  for (int u = 0; u < n; ++u) {
    lefts[static_cast<std::size_t>(u)] = left;
    update(u, left, rights[static_cast<std::size_t>(u)]);
    if (u + 1 < n) left = lc.absorb_left(left, u, gate_ptr(u));
  }
  DenseTensor right = LayerContraction::trivial_boundary();
  for (int u = n - 1; u >= 0; --u) {
    update(u, lefts[static_cast<std::size_t>(u)], right);
    right = lc.absorb_right(right, u, gate_ptr(u));
  }
  for (std::size_t i = 0; i < gates.size(); ++i) circuit.set_gate(l, static_cast<int>(i), gates[i]);
  return right(0, 0);
}

}  // namespace

cplx local_sweep_step(BrickwallCircuit& circuit, const Mpo& u_ref, SweepOrder order, int chi_max,
                      std::vector<GatePlacement>* log) {
  if (circuit.n_qubits() != u_ref.n_sites()) throw ParameterError("circuit and reference differ in qubit count");
  const int L = circuit.n_layers();
  if (L == 0) return std::conj(mpo_trace(u_ref));
  cplx overlap;
  if (order == SweepOrder::top_down) {
    std::vector<Mpo> bottoms = bottom_environments(circuit, chi_max);
    Mpo top = adjoint(u_ref);
    for (int l = L - 1; l >= 0; --l) {
      overlap = sweep_layer(circuit, l, top, bottoms[static_cast<std::size_t>(l)], log);
      bottoms[static_cast<std::size_t>(l)] = Mpo();
      if (l > 0) top = merge_layer(top, circuit.layer(l), MergeSide::below, chi_max).first;
    }
  } else {
    std::vector<Mpo> tops = top_environments(circuit, u_ref, chi_max);
    Mpo bottom = identity_mpo(circuit.n_qubits());
    for (int l = 0; l < L; ++l) {
      overlap = sweep_layer(circuit, l, tops[static_cast<std::size_t>(l)], bottom, log);
      tops[static_cast<std::size_t>(l)] = Mpo();
      if (l + 1 < L) bottom = merge_layer(bottom, circuit.layer(l), MergeSide::above, chi_max).first;
    }
  }
  if (!std::isfinite(overlap.real()) || !std::isfinite(overlap.imag()))
    throw NumericalError("non-finite overlap in local sweep");
  return overlap;
}

bool early_stop(const std::vector<double>& trajectory, double tol) {
  if (trajectory.empty()) throw ParameterError("early_stop needs a non-empty trajectory");
  const std::size_t i = trajectory.size() - 1;
  if (i < 1) return false;
  const auto n = static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(i)));
  const double a = trajectory[i - n];
  const double b = trajectory[i];
  const double denom = a + b;
  if (denom == 0.0) return true;
  return 2.0 * std::abs((a - b) / denom) <= tol;
}

std::string to_string(OptimizerMethod m) { return m == OptimizerMethod::riemannian ? "riemannian" : "sweep"; }

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::max_iter: return "max_iter";
    case StopReason::early_stop: return "early_stop";
    case StopReason::target_cost: return "target_cost";
  }
  return "unknown";
}

OptimizerMethod optimizer_method_from_string(const std::string& s) {
  if (s == "riemannian") return OptimizerMethod::riemannian;
  if (s == "sweep") return OptimizerMethod::sweep;
  throw ParameterError("unknown optimizer method '" + s + "'");
}

nlohmann::json to_json(const OptimizeOptions& o) {
  nlohmann::json j = {{"method", to_string(o.method)},
                      {"max_iter", o.max_iter},
                      {"early_stop", o.early_stopping},
                      {"early_stop_tol", o.early_stop_tol},
                      {"alpha", o.adam.alpha},
                      {"beta1", o.adam.beta1},
                      {"beta2", o.adam.beta2},
                      {"bias_correction", o.adam.bias_correction}};
  if (o.target_cost) j["target_cost"] = *o.target_cost;
  if (o.chi_max != kUnboundedChi) j["chi_max"] = o.chi_max;
  return j;
}

nlohmann::json RunRecord::to_json() const {
  return {{"format", "runrecord-v1"},
          {"config", config},
          {"trajectory", trajectory},
          {"iterations", iterations},
          {"stop_reason", to_string(stop_reason)},
          {"wall_time", wall_time},
          {"seed", seed},
          {"n_layers", circuit.n_layers()},
          {"circuit_file", circuit_file}};
}

RunRecord optimize(BrickwallCircuit circuit, const Mpo& u_ref, const OptimizeOptions& options) {
  if (options.max_iter < 0) throw ParameterError("max_iter must be non-negative");
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = to_json(options);
  const int n = circuit.n_qubits();

  auto should_stop = [&]() -> std::optional<StopReason> {
    if (options.target_cost && rec.trajectory.back() <= *options.target_cost) return StopReason::target_cost;
    if (options.early_stopping && rec.trajectory.size() > 1 && early_stop(rec.trajectory, options.early_stop_tol))
      return StopReason::early_stop;
    return std::nullopt;
  };
  auto progress = [&]() {
    if (options.log_every > 0 && rec.iterations % options.log_every == 0)
      spdlog::info("{} iteration {}: C_HS = {:.6e}", to_string(options.method), rec.iterations, rec.trajectory.back());
  };

  if (options.method == OptimizerMethod::riemannian) {
    RiemannianAdamState state;
    state.hyper = options.adam;
    GradientResult grad = evaluate(circuit, u_ref, options.chi_max);
    rec.trajectory.push_back(grad.cost_hs);
    if (auto r = should_stop()) rec.stop_reason = *r;
    else {
      while (rec.iterations < options.max_iter) {
        riemannian_adam_step(circuit, state, grad);
        grad = evaluate(circuit, u_ref, options.chi_max);
        rec.trajectory.push_back(grad.cost_hs);
        ++rec.iterations;
        progress();
        if (auto r = should_stop()) {
          rec.stop_reason = *r;
          break;
        }
      }
    }
  } else {
    rec.trajectory.push_back(cost_only(circuit, u_ref, options.chi_max).cost_hs);
    SweepOrder order = options.first_sweep;
    if (auto r = should_stop()) rec.stop_reason = *r;
    else {
      while (rec.iterations < options.max_iter) {
        const cplx t = local_sweep_step(circuit, u_ref, order, options.chi_max);
        order = order == SweepOrder::top_down ? SweepOrder::bottom_up : SweepOrder::top_down;
        rec.trajectory.push_back(costs_from_overlap(t, n).cost_hs);
        ++rec.iterations;
        progress();
        if (auto r = should_stop()) {
          rec.stop_reason = *r;
          break;
        }
      }
    }
  }
  rec.circuit = std::move(circuit);
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace bwc
