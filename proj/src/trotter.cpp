#include "bwc/trotter.hpp"

#include <cmath>
#include <functional>
#include <variant>

#include "bwc/errors.hpp"
#include "bwc/gates.hpp"

namespace bwc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

/// Single-qubit factors applied to every qubit at one point of the sequence.
struct OneSite {
  std::vector<Mat2> ops;
};

using Item = std::variant<Layer, OneSite>;

struct Splitting {
  std::vector<std::function<Layer(double)>> groups;
  std::function<OneSite(double)> one_site;
  std::vector<Layer> reversal;
};

int degree(int q, int n) { return (q > 0 ? 1 : 0) + (q + 1 < n ? 1 : 0); }

std::function<Layer(double)> bond_group(int n, int parity, std::function<Mat4(int, double)> gate) {
  return [=](double dt) {
    Layer layer;
    for (int q = parity; q + 1 < n; q += 2) layer.push_back({gate(q, dt), q});
    return layer;
  };
}

Splitting spin_splitting(const HamiltonianSpec& spec) {
  const int n = spec.n_sites;
  std::function<Mat4(int, double)> gate;
  std::visit(overloaded{
                 [&](const IsingModel& m) {
                   gate = [m, n](int q, double dt) {
                     const double a = 2.0 / degree(q, n), b = 2.0 / degree(q + 1, n);
                     return ising_gate(m.J, a * m.g, b * m.g, a * m.h, b * m.h, dt);
                   };
                 },
                 [&](const IsingDisorderedModel& m) {
                   gate = [m, n](int q, double dt) {
                     const auto i = static_cast<std::size_t>(q);
                     const double a = 2.0 / degree(q, n), b = 2.0 / degree(q + 1, n);
                     return ising_gate(m.J[i], a * m.g[i], b * m.g[i + 1], a * m.h[i], b * m.h[i + 1], dt);
                   };
                 },
                 [&](const HeisenbergModel& m) {
                   gate = [m, n](int q, double dt) {
                     std::array<double, 3> h1{}, h2{};
                     for (int a = 0; a < 3; ++a) {
                       h1[a] = 2.0 * m.h[a] / degree(q, n);
                       h2[a] = 2.0 * m.h[a] / degree(q + 1, n);
                     }
                     return heisenberg_gate(m.J, h1, h2, dt);
                   };
                 },
                 [](const auto&) {},
             },
             spec.model);
  Splitting s;
  s.groups = {bond_group(n, 0, gate), bond_group(n, 1, gate)};
  return s;
}

Splitting fermi_hubbard_splitting(const HamiltonianSpec& spec) {
  const auto& m = std::get<FermiHubbardModel>(spec.model);
  const int n = spec.n_sites;
  const double T = m.T, V_pair = 0.5 * m.V;
  Splitting s;
  auto kinetic = bond_group(n, 1, [T](int, double dt) { return fh_kinetic_gate(T, dt); });
  auto interaction = bond_group(n, 0, [V_pair](int, double dt) { return fh_interaction_swap_gate(V_pair, dt); });
  s.groups = {kinetic, interaction, kinetic};
  s.reversal = {bond_group(n, 0, [](int, double) { return fswap(); })(0.0)};
  return s;
}

Splitting molecular_splitting(const HamiltonianSpec& spec) {
  const auto& m = std::get<MolecularDiagonalModel>(spec.model);
  const int n = spec.n_sites;
  Splitting s;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) order[static_cast<std::size_t>(p)] = p;
  for (int k = 0; k < n; ++k) {
    const int parity = k % 2;
    std::vector<std::pair<int, int>> pairs;
    for (int q = parity; q + 1 < n; q += 2) {
      pairs.emplace_back(order[static_cast<std::size_t>(q)], order[static_cast<std::size_t>(q + 1)]);
      std::swap(order[static_cast<std::size_t>(q)], order[static_cast<std::size_t>(q + 1)]);
    }
    const Eigen::MatrixXd T = m.T, V = m.V;
    s.groups.push_back([=](double dt) {
      Layer layer;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [a, b] = pairs[i];
        layer.push_back({fsim_gate(T(a, b), V(a, b), dt), parity + 2 * static_cast<int>(i)});
      }
      return layer;
    });
  }
  for (int k = n - 1; k >= 0; --k) s.reversal.push_back(bond_group(n, k % 2, [](int, double) { return fswap(); })(0.0));
  const Eigen::VectorXd diag = m.T.diagonal();
  s.one_site = [diag](double dt) {
    OneSite o;
    for (Eigen::Index p = 0; p < diag.size(); ++p) {
      Mat2 u = Mat2::Identity();
      u(1, 1) = std::exp(cplx{0.0, -dt * diag(p)});
      o.ops.push_back(u);
    }
    return o;
  };
  return s;
}

Splitting splitting_for(const HamiltonianSpec& spec) {
  validate(spec);
  if (std::holds_alternative<FermiHubbardModel>(spec.model)) return fermi_hubbard_splitting(spec);
  if (std::holds_alternative<MolecularDiagonalModel>(spec.model)) return molecular_splitting(spec);
  return spin_splitting(spec);
}

void append_u1(std::vector<Item>& seq, const Splitting& s, double dt) {
  if (s.one_site) seq.emplace_back(s.one_site(dt));
  for (const auto& g : s.groups) seq.emplace_back(g(dt));
  for (const auto& r : s.reversal) seq.emplace_back(r);
}

void append_u2(std::vector<Item>& seq, const Splitting& s, double dt) {
  if (s.one_site) seq.emplace_back(s.one_site(0.5 * dt));
  for (const auto& g : s.groups) seq.emplace_back(g(0.5 * dt));
  for (auto it = s.groups.rbegin(); it != s.groups.rend(); ++it) seq.emplace_back((*it)(0.5 * dt));
  if (s.one_site) seq.emplace_back(s.one_site(0.5 * dt));
}

void append_step(std::vector<Item>& seq, const Splitting& s, int order, double dt) {
  switch (order) {
    case 1: append_u1(seq, s, dt); return;
    case 2: append_u2(seq, s, dt); return;
    case 4: {
      const double s2 = suzuki_s2();
      for (double f : {s2, s2, 1.0 - 4.0 * s2, s2, s2}) append_u2(seq, s, f * dt);
      return;
    }
    default: throw ParameterError("Trotter order must be 1, 2 or 4");
  }
}

/// Multiplies a single-qubit factor into the gate acting on `q`; `before` applies it first.
void fold_into(Gate& gate, int q, const Mat2& op, bool before) {
  const Mat2 id = Mat2::Identity();
  const Mat4 f = q == gate.qubit ? kron2(op, id) : kron2(id, op);
  gate.matrix = before ? Mat4(gate.matrix * f) : Mat4(f * gate.matrix);
}

Gate* gate_on(Layer& layer, int q) {
  for (auto& g : layer)
    if (g.qubit == q || g.qubit + 1 == q) return &g;
  return nullptr;
}

std::vector<Layer> fold_and_merge(std::vector<Item> seq, int n) {
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const auto* one = std::get_if<OneSite>(&seq[k]);
    if (!one) continue;
    for (int q = 0; q < n; ++q) {
      const Mat2& op = one->ops[static_cast<std::size_t>(q)];
      if (op.isIdentity(0.0)) continue;
      bool done = false;
      for (std::size_t j = k + 1; j < seq.size() && !done; ++j)
        if (auto* layer = std::get_if<Layer>(&seq[j]))
          if (Gate* g = gate_on(*layer, q)) {
            fold_into(*g, q, op, true);
            done = true;
          }
      for (std::size_t j = k; j-- > 0 && !done;)
        if (auto* layer = std::get_if<Layer>(&seq[j]))
          if (Gate* g = gate_on(*layer, q)) {
            fold_into(*g, q, op, false);
            done = true;
          }
      if (!done) throw ParameterError("single-site term on a qubit no gate touches");
    }
  }
  std::vector<Layer> out;
  for (auto& item : seq) {
    auto* layer = std::get_if<Layer>(&item);
    if (!layer || layer->empty()) continue;
    if (!out.empty() && same_placement(out.back(), *layer)) {
      for (std::size_t i = 0; i < layer->size(); ++i)
        out.back()[i].matrix = (*layer)[i].matrix * out.back()[i].matrix;
    } else {
      out.push_back(std::move(*layer));
    }
  }
  return out;
}

BrickwallCircuit build(const HamiltonianSpec& spec, int order, int n_steps, double dt) {
  if (order != 1 && order != 2 && order != 4) throw ParameterError("Trotter order must be 1, 2 or 4");
  if (n_steps < 1) throw ParameterError("at least one Trotter step is required");
  const Splitting s = splitting_for(spec);
  std::vector<Item> seq;
  for (int k = 0; k < n_steps; ++k) append_step(seq, s, order, dt);
  BrickwallCircuit c(spec.n_sites);
  for (auto& layer : fold_and_merge(std::move(seq), spec.n_sites)) c.add_layer(std::move(layer));
  return c;
}

}  // namespace

double suzuki_s2() { return 1.0 / (4.0 - std::cbrt(4.0)); }

BrickwallCircuit trotter_step(const HamiltonianSpec& spec, int order, double dt) {
  return build(spec, order, 1, dt);
}

BrickwallCircuit trotter_circuit(const HamiltonianSpec& spec, int order, int n_steps, double t) {
  return build(spec, order, n_steps, t / n_steps);
}

int trotter_layer_count(const HamiltonianSpec& spec, int order, int n_steps) {
  return build(spec, order, n_steps, 0.1).n_layers();
}

BrickwallCircuit fermi_hubbard_swap_network_step(const HamiltonianSpec& spec, int order, double dt) {
  if (!std::holds_alternative<FermiHubbardModel>(spec.model))
    throw ParameterError("fermi_hubbard_swap_network_step needs a Fermi-Hubbard spec");
  return trotter_step(spec, order, dt);
}

BrickwallCircuit concatenate(const BrickwallCircuit& first, const BrickwallCircuit& second) {
  if (first.n_qubits() != second.n_qubits()) throw ParameterError("circuits differ in qubit count");
  BrickwallCircuit out = first;
  for (const auto& layer : second.layers()) out.add_layer(layer);
  return out;
}

void append_merging(BrickwallCircuit& target, const BrickwallCircuit& next) {
  if (target.n_qubits() != next.n_qubits()) throw ParameterError("circuits differ in qubit count");
  std::vector<Layer> layers = target.layers();
  for (const auto& layer : next.layers()) {
    if (!layers.empty() && same_placement(layers.back(), layer)) {
      for (std::size_t i = 0; i < layer.size(); ++i)
        layers.back()[i].matrix = layer[i].matrix * layers.back()[i].matrix;
    } else {
      layers.push_back(layer);
    }
  }
  BrickwallCircuit out(target.n_qubits());
  for (auto& l : layers) out.add_layer(std::move(l));
  target = std::move(out);
}

}  // namespace bwc
