#include "bwc/cost_gradient.hpp"

#include <cmath>

#include "bwc/errors.hpp"

namespace bwc {

namespace {

DenseTensor gate_tensor(const Mat4& g) { return DenseTensor::from_matrix(g).reshaped({2, 2, 2, 2}); }

void check_qubits(const BrickwallCircuit& circuit, const Mpo& u_ref) {
  if (circuit.n_qubits() != u_ref.n_sites())
    throw ParameterError("circuit acts on " + std::to_string(circuit.n_qubits()) + " qubits but the reference on " +
                         std::to_string(u_ref.n_sites()));
}

void check_finite(cplx overlap) {
  if (!std::isfinite(overlap.real()) || !std::isfinite(overlap.imag()))
    throw NumericalError("non-finite overlap encountered");
}

}  // namespace

CostResult costs_from_overlap(cplx overlap, int n_qubits) {
  const double d = std::ldexp(1.0, n_qubits);
  return {overlap, 1.0 - std::norm(overlap / d), 1.0 - overlap.real() / d};
}

LayerContraction::LayerContraction(const Mpo& top, const Mpo& bottom, const Layer& layer)
    : top_(top), bottom_(bottom) {
  const int n = top.n_sites();
  if (bottom.n_sites() != n) throw ParameterError("environments differ in site count");
  std::vector<int> gate_at(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < layer.size(); ++i) {
    const int q = layer[i].qubit;
    if (q < 0 || q + 1 >= n) throw ParameterError("gate outside the chain");
    gate_at[static_cast<std::size_t>(q)] = static_cast<int>(i);
  }
  for (int j = 0; j < n;) {
    const int g = gate_at[static_cast<std::size_t>(j)];
    units_.push_back({j, g});
    j += g >= 0 ? 2 : 1;
  }
}

DenseTensor LayerContraction::trivial_boundary() {
  DenseTensor t({1, 1});
  t(0, 0) = 1.0;
  return t;
}

DenseTensor LayerContraction::absorb_left(const DenseTensor& left, int unit, const Mat4* gate) const {
  const Unit& u = units_[static_cast<std::size_t>(unit)];
  const DenseTensor& t1 = top_.site(u.site);
  const DenseTensor& b1 = bottom_.site(u.site);
  DenseTensor x1 = contract(left, t1, {{0, 0}});  // (lb, x1, y1, m)
  if (u.gate < 0) return contract(x1, b1, {{0, 0}, {1, 2}, {2, 1}});
  if (!gate) throw ParameterError("gate matrix required for a gate unit");
  DenseTensor x2 = contract(x1, b1, {{0, 0}, {1, 2}});                 // (y1, m, z1, n)
  DenseTensor x3 = contract(x2, gate_tensor(*gate), {{0, 0}, {2, 2}});  // (m, n, y2, z2)
  DenseTensor x4 = contract(x3, top_.site(u.site + 1), {{0, 0}, {2, 2}});  // (n, z2, x2, rt)
  return contract(x4, bottom_.site(u.site + 1), {{0, 0}, {1, 1}, {2, 2}});
}

DenseTensor LayerContraction::absorb_right(const DenseTensor& right, int unit, const Mat4* gate) const {
  const Unit& u = units_[static_cast<std::size_t>(unit)];
  if (u.gate < 0) {
    DenseTensor x = contract(top_.site(u.site), right, {{3, 0}});  // (lt, x, y, rb)
    return contract(x, bottom_.site(u.site), {{1, 2}, {2, 1}, {3, 3}});
  }
  if (!gate) throw ParameterError("gate matrix required for a gate unit");
  DenseTensor y1 = contract(top_.site(u.site + 1), right, {{3, 0}});  // (m, x2, y2, rb)
  DenseTensor y2 = contract(y1, bottom_.site(u.site + 1), {{1, 2}, {3, 3}});  // (m, y2, n, z2)
  DenseTensor z = contract(top_.site(u.site), y2, {{3, 0}});  // (lt, x1, y1, y2, n, z2)
  DenseTensor z2 = contract(z, gate_tensor(*gate), {{2, 0}, {3, 1}, {5, 3}});  // (lt, x1, n, z1)
  return contract(z2, bottom_.site(u.site), {{1, 2}, {2, 3}, {3, 1}});
}

Mat4 LayerContraction::derivative(const DenseTensor& left, int unit, const DenseTensor& right) const {
  const Unit& u = units_[static_cast<std::size_t>(unit)];
  if (u.gate < 0) throw ParameterError("derivative requested for an untouched site");
  DenseTensor x1 = contract(left, top_.site(u.site), {{0, 0}});
  DenseTensor x2 = contract(x1, bottom_.site(u.site), {{0, 0}, {1, 2}});  // (y1, m, z1, n)
  DenseTensor y1 = contract(top_.site(u.site + 1), right, {{3, 0}});
  DenseTensor y2 = contract(y1, bottom_.site(u.site + 1), {{1, 2}, {3, 3}});  // (m, y2, n, z2)
  DenseTensor d = contract(x2, y2, {{1, 0}, {3, 2}}).permuted({0, 2, 1, 3});  // (y1, y2, z1, z2)
  return d.to_matrix(2);
}

std::vector<DenseTensor> LayerContraction::right_boundaries(const Layer& layer) const {
  const int n = n_units();
  std::vector<DenseTensor> out(static_cast<std::size_t>(n));
  out[static_cast<std::size_t>(n - 1)] = trivial_boundary();
  for (int u = n - 1; u > 0; --u) {
    const int g = gate_index(u);
    out[static_cast<std::size_t>(u - 1)] =
        absorb_right(out[static_cast<std::size_t>(u)], u, g >= 0 ? &layer[static_cast<std::size_t>(g)].matrix : nullptr);
  }
  return out;
}

std::vector<Mat4> LayerContraction::all_derivatives(const Layer& layer, cplx* overlap) const {
  const std::vector<DenseTensor> rights = right_boundaries(layer);
  std::vector<Mat4> out(layer.size());
  DenseTensor left = trivial_boundary();
  for (int u = 0; u < n_units(); ++u) {
    const int g = gate_index(u);
    const Mat4* gm = g >= 0 ? &layer[static_cast<std::size_t>(g)].matrix : nullptr;
    if (g >= 0) out[static_cast<std::size_t>(g)] = derivative(left, u, rights[static_cast<std::size_t>(u)]);
    left = absorb_left(left, u, gm);
  }
  if (overlap) *overlap = left(0, 0);
  return out;
}

std::vector<Mpo> top_environments(const BrickwallCircuit& circuit, const Mpo& u_ref, int chi_max) {
  check_qubits(circuit, u_ref);
  const int L = circuit.n_layers();
  std::vector<Mpo> tops(static_cast<std::size_t>(L));
  if (L == 0) return tops;
  tops[static_cast<std::size_t>(L - 1)] = adjoint(u_ref);
  for (int l = L - 1; l > 0; --l)
    tops[static_cast<std::size_t>(l - 1)] =
        merge_layer(tops[static_cast<std::size_t>(l)], circuit.layer(l), MergeSide::below, chi_max).first;
  return tops;
}

std::vector<Mpo> bottom_environments(const BrickwallCircuit& circuit, int chi_max) {
  const int L = circuit.n_layers();
  std::vector<Mpo> bots(static_cast<std::size_t>(L));
  if (L == 0) return bots;
  bots[0] = identity_mpo(circuit.n_qubits());
  for (int l = 0; l + 1 < L; ++l)
    bots[static_cast<std::size_t>(l + 1)] =
        merge_layer(bots[static_cast<std::size_t>(l)], circuit.layer(l), MergeSide::above, chi_max).first;
  return bots;
}

GradientResult evaluate(const BrickwallCircuit& circuit, const Mpo& u_ref, int chi_max) {
  check_qubits(circuit, u_ref);
  const int L = circuit.n_layers();
  GradientResult out;
  if (L == 0) {
    out.overlap = std::conj(mpo_trace(u_ref));
  } else {
    std::vector<Mpo> tops = top_environments(circuit, u_ref, chi_max);
    Mpo bottom = identity_mpo(circuit.n_qubits());
    out.overlap_derivative.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
      const Layer& layer = circuit.layer(l);
      LayerContraction lc(tops[static_cast<std::size_t>(l)], bottom, layer);
      cplx t;
      out.overlap_derivative[static_cast<std::size_t>(l)] = lc.all_derivatives(layer, &t);
      if (l == 0) out.overlap = t;
      if (l + 1 < L) bottom = merge_layer(bottom, layer, MergeSide::above, chi_max).first;
      tops[static_cast<std::size_t>(l)] = Mpo();
    }
  }
  check_finite(out.overlap);
  const CostResult c = costs_from_overlap(out.overlap, circuit.n_qubits());
  out.cost_hs = c.cost_hs;
  out.cost_frobenius = c.cost_frobenius;
  out.euclidean_gradient.resize(out.overlap_derivative.size());
  for (std::size_t l = 0; l < out.overlap_derivative.size(); ++l)
    for (const auto& d : out.overlap_derivative[l])
      out.euclidean_gradient[l].push_back(-2.0 * out.overlap * d.conjugate());
  return out;
}

CostResult cost_only(const BrickwallCircuit& circuit, const Mpo& u_ref, int chi_max) {
  check_qubits(circuit, u_ref);
  Mpo m = adjoint(u_ref);
  for (int l = circuit.n_layers() - 1; l >= 0; --l) m = merge_layer(m, circuit.layer(l), MergeSide::below, chi_max).first;
  const cplx t = mpo_trace(m);
  check_finite(t);
  return costs_from_overlap(t, circuit.n_qubits());
}

GateIndexed<std::array<double, 15>> parameter_gradient(const GradientResult& grad,
                                                       const GateIndexed<WeylParams>& params) {
  if (params.size() != grad.euclidean_gradient.size()) throw ParameterError("Weyl parameters missing for some layers");
  GateIndexed<std::array<double, 15>> out(params.size());
  for (std::size_t l = 0; l < params.size(); ++l) {
    if (params[l].size() != grad.euclidean_gradient[l].size())
      throw ParameterError("Weyl parameters missing for some gates");
    for (std::size_t i = 0; i < params[l].size(); ++i) {
      const auto jac = weyl_jacobian(params[l][i]);
      const Mat4& g = grad.euclidean_gradient[l][i];
      std::array<double, 15> v{};
      for (int k = 0; k < 15; ++k) v[k] = (g.adjoint() * jac[k]).trace().real();
      out[l].push_back(v);
    }
  }
  return out;
}

BrickwallCircuit circuit_from_weyl(const BrickwallCircuit& layout, const GateIndexed<WeylParams>& params) {
  if (params.size() != static_cast<std::size_t>(layout.n_layers()))
    throw ParameterError("Weyl parameters missing for some layers");
  BrickwallCircuit out(layout.n_qubits());
  for (int l = 0; l < layout.n_layers(); ++l) {
    const Layer& src = layout.layer(l);
    if (params[static_cast<std::size_t>(l)].size() != src.size())
      throw ParameterError("Weyl parameters missing for some gates");
    Layer layer;
    for (std::size_t i = 0; i < src.size(); ++i)
      layer.push_back({weyl_gate(params[static_cast<std::size_t>(l)][i]), src[i].qubit});
    out.add_layer(std::move(layer));
  }
  return out;
}

GateIndexed<std::array<double, 15>> parameter_gradient(const BrickwallCircuit& circuit,
                                                       const GateIndexed<WeylParams>& params, const Mpo& u_ref,
                                                       int chi_max) {
  return parameter_gradient(evaluate(circuit_from_weyl(circuit, params), u_ref, chi_max), params);
}

}  // namespace bwc
