#pragma once

#include <vector>

#include "bwc/stiefel.hpp"
#include "bwc/tensor.hpp"

namespace bwc {

/// Two-qubit gate on qubits (qubit, qubit + 1). Qubit 0 is the most significant
/// bit of the dense basis, so the 4x4 matrix is indexed by (b_qubit b_qubit+1).
struct Gate {
  Mat4 matrix;
  int qubit = 0;
};

using Layer = std::vector<Gate>;

struct GatePlacement {
  int layer = 0;
  int position = 0;
  int qubit = 0;
  bool operator==(const GatePlacement&) const = default;
};

/// Ordered list of brickwall layers. Layer 0 acts first, so W = W^{L-1} ... W^0.
class BrickwallCircuit {
 public:
  explicit BrickwallCircuit(int n_qubits = 2);

  int n_qubits() const { return n_qubits_; }
  int n_layers() const { return static_cast<int>(layers_.size()); }
  std::size_t gate_count() const;
  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(int l) const { return layers_.at(static_cast<std::size_t>(l)); }

  /// Appends a layer after validating placement and unitarity. Gates are kept sorted by qubit.
  void add_layer(Layer layer);
  void set_gate(int layer, int position, const Mat4& matrix);

  GateIndexed<Mat4> gate_matrices() const;
  void set_gate_matrices(const GateIndexed<Mat4>& gates);
  std::vector<GatePlacement> placements() const;

 private:
  int n_qubits_;
  std::vector<Layer> layers_;
};

/// Validates and sorts a layer for an n-qubit chain.
Layer normalized_layer(Layer layer, int n_qubits);
/// Identity gates on bonds (p, p+1), (p+2, p+3), ... for parity p in {0, 1}.
Layer identity_layer(int n_qubits, int parity);
bool same_placement(const Layer& a, const Layer& b);

/// m <- (I ⊗ g ⊗ I) m with g on (qubit, qubit + 1).
void apply_gate_left(MatrixXc& m, const Mat4& g, int qubit, int n_qubits);
MatrixXc layer_to_dense(const Layer& layer, int n_qubits);
MatrixXc circuit_to_dense(const BrickwallCircuit& circuit);

inline constexpr int kMaxDenseQubits = 12;
void check_dense_size(int n_qubits);

}  // namespace bwc
