#include "bwc/circuit.hpp"

#include <algorithm>
#include <string>

#include "bwc/errors.hpp"
#include "bwc/linalg.hpp"

namespace bwc {

void check_dense_size(int n_qubits) {
  if (n_qubits > kMaxDenseQubits)
    throw ResourceGuardError("dense representation of " + std::to_string(n_qubits) +
                             " qubits exceeds the limit of " + std::to_string(kMaxDenseQubits));
}

Layer normalized_layer(Layer layer, int n_qubits) {
  std::sort(layer.begin(), layer.end(), [](const Gate& a, const Gate& b) { return a.qubit < b.qubit; });
  int next_free = 0;
  for (const auto& g : layer) {
    if (g.qubit < 0 || g.qubit + 1 >= n_qubits)
      throw ParameterError("gate on qubit " + std::to_string(g.qubit) + " lies outside the chain");
    if (g.qubit < next_free) throw ParameterError("overlapping gates in one layer");
    if (!g.matrix.allFinite()) throw NumericalError("gate with non-finite entries");
    if (!is_unitary(g.matrix)) throw ParameterError("gate is not unitary");
    next_free = g.qubit + 2;
  }
  return layer;
}

BrickwallCircuit::BrickwallCircuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 2) throw ParameterError("a brickwall circuit needs at least 2 qubits");
}

std::size_t BrickwallCircuit::gate_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.size();
  return n;
}

void BrickwallCircuit::add_layer(Layer layer) {
  layers_.push_back(normalized_layer(std::move(layer), n_qubits_));
}

void BrickwallCircuit::set_gate(int layer, int position, const Mat4& matrix) {
  if (!matrix.allFinite()) throw NumericalError("gate with non-finite entries");
  if (!is_unitary(matrix)) throw ParameterError("gate is not unitary");
  layers_.at(static_cast<std::size_t>(layer)).at(static_cast<std::size_t>(position)).matrix = matrix;
}

GateIndexed<Mat4> BrickwallCircuit::gate_matrices() const {
  GateIndexed<Mat4> out(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l)
    for (const auto& g : layers_[l]) out[l].push_back(g.matrix);
  return out;
}

void BrickwallCircuit::set_gate_matrices(const GateIndexed<Mat4>& gates) {
  if (gates.size() != layers_.size()) throw ParameterError("gate index set differs from circuit");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (gates[l].size() != layers_[l].size()) throw ParameterError("gate index set differs from circuit");
    for (std::size_t i = 0; i < gates[l].size(); ++i)
      set_gate(static_cast<int>(l), static_cast<int>(i), gates[l][i]);
  }
}

std::vector<GatePlacement> BrickwallCircuit::placements() const {
  std::vector<GatePlacement> out;
  for (std::size_t l = 0; l < layers_.size(); ++l)
    for (std::size_t i = 0; i < layers_[l].size(); ++i)
      out.push_back({static_cast<int>(l), static_cast<int>(i), layers_[l][i].qubit});
  return out;
}

Layer identity_layer(int n_qubits, int parity) {
  Layer layer;
  for (int q = parity; q + 1 < n_qubits; q += 2) layer.push_back({Mat4::Identity(), q});
  return layer;
}

bool same_placement(const Layer& a, const Layer& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].qubit != b[i].qubit) return false;
  return true;
}

void apply_gate_left(MatrixXc& m, const Mat4& g, int qubit, int n_qubits) {
  check_dense_size(n_qubits);
  // Row index bits: high (qubits < qubit), pair (2 bits), low (n - qubit - 2 bits).
  const Eigen::Index low = Eigen::Index{1} << (n_qubits - qubit - 2);
  const Eigen::Index high = Eigen::Index{1} << qubit;
  Eigen::Matrix<cplx, 4, Eigen::Dynamic> block(4, m.cols());
  for (Eigen::Index h = 0; h < high; ++h)
    for (Eigen::Index lo = 0; lo < low; ++lo) {
      Eigen::Index rows[4];
      for (int k = 0; k < 4; ++k) rows[k] = (h * 4 + k) * low + lo;
      for (int k = 0; k < 4; ++k) block.row(k) = m.row(rows[k]);
      block = g * block;
      for (int k = 0; k < 4; ++k) m.row(rows[k]) = block.row(k);
    }
}

MatrixXc layer_to_dense(const Layer& layer, int n_qubits) {
  check_dense_size(n_qubits);
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  MatrixXc m = MatrixXc::Identity(d, d);
  for (const auto& g : layer) apply_gate_left(m, g.matrix, g.qubit, n_qubits);
  return m;
}

MatrixXc circuit_to_dense(const BrickwallCircuit& circuit) {
  const int n = circuit.n_qubits();
  check_dense_size(n);
  const Eigen::Index d = Eigen::Index{1} << n;
  MatrixXc m = MatrixXc::Identity(d, d);
  for (const auto& layer : circuit.layers())
    for (const auto& g : layer) apply_gate_left(m, g.matrix, g.qubit, n);
  return m;
}

}  // namespace bwc
