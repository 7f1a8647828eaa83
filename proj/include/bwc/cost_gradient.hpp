#pragma once

#include <array>
#include <vector>

#include "bwc/circuit.hpp"
#include "bwc/mpo.hpp"
#include "bwc/stiefel.hpp"
#include "bwc/weyl.hpp"

namespace bwc {

struct CostResult {
  cplx overlap;  // T(W) = Tr(U_ref^dagger W)
  double cost_hs = 0.0;
  double cost_frobenius = 0.0;
};

/// C_HS = 1 - |T|^2 / d^2 and C_F = 1 - Re T / d with d = 2^n.
CostResult costs_from_overlap(cplx overlap, int n_qubits);

struct GradientResult {
  cplx overlap;
  double cost_hs = 0.0;
  double cost_frobenius = 0.0;
  /// dT/dG per gate: T = sum_ab G_ab D_ab, indexed [out, in] like the gate.
  GateIndexed<Mat4> overlap_derivative;
  /// Gradient of the loss -|T|^2 under the real metric Re Tr(X^dagger Y): -2 T conj(D).
  GateIndexed<Mat4> euclidean_gradient;

  double loss() const { return -std::norm(overlap); }
};

GradientResult evaluate(const BrickwallCircuit& circuit, const Mpo& u_ref, int chi_max = kUnboundedChi);
CostResult cost_only(const BrickwallCircuit& circuit, const Mpo& u_ref, int chi_max = kUnboundedChi);

/// d(loss)/d(alpha) for the 15 Weyl parameters of every gate.
GateIndexed<std::array<double, 15>> parameter_gradient(const GradientResult& grad,
                                                       const GateIndexed<WeylParams>& params);
GateIndexed<std::array<double, 15>> parameter_gradient(const BrickwallCircuit& circuit,
                                                       const GateIndexed<WeylParams>& params, const Mpo& u_ref,
                                                       int chi_max = kUnboundedChi);
/// Circuit whose gates are the Weyl reconstructions of `params` on the given placements.
BrickwallCircuit circuit_from_weyl(const BrickwallCircuit& layout, const GateIndexed<WeylParams>& params);

/// E_top for every layer: entry l is U_ref^dagger W^{L-1} ... W^{l+1}.
std::vector<Mpo> top_environments(const BrickwallCircuit& circuit, const Mpo& u_ref, int chi_max);
/// E_bottom for every layer: entry l is W^{l-1} ... W^0.
std::vector<Mpo> bottom_environments(const BrickwallCircuit& circuit, int chi_max);

/// Contractions of one layer between a top and a bottom environment. Units are the gates and the
/// untouched sites of the layer, left to right. Boundaries are (top bond, bottom bond) matrices.
class LayerContraction {
 public:
  LayerContraction(const Mpo& top, const Mpo& bottom, const Layer& layer);

  int n_units() const { return static_cast<int>(units_.size()); }
  /// Gate position within the layer, or -1 for an untouched site.
  int gate_index(int unit) const { return units_[static_cast<std::size_t>(unit)].gate; }

  static DenseTensor trivial_boundary();
  DenseTensor absorb_left(const DenseTensor& left, int unit, const Mat4* gate) const;
  DenseTensor absorb_right(const DenseTensor& right, int unit, const Mat4* gate) const;
  Mat4 derivative(const DenseTensor& left, int unit, const DenseTensor& right) const;

  /// Right boundaries: entry u covers units u+1 .. end.
  std::vector<DenseTensor> right_boundaries(const Layer& layer) const;
  /// dT/dG for every gate of the layer; `overlap` receives the closed contraction.
  std::vector<Mat4> all_derivatives(const Layer& layer, cplx* overlap) const;

 private:
  struct Unit {
    int site;
    int gate;
  };
  const Mpo& top_;
  const Mpo& bottom_;
  std::vector<Unit> units_;
};

}  // namespace bwc
