#pragma once

#include "bwc/circuit.hpp"
#include "bwc/models.hpp"

namespace bwc {

/// s_2 = 1 / (4 - 4^(1/3)) of the fourth-order Suzuki composition.
double suzuki_s2();

/// One product-formula step of order 1, 2 or 4 as a brickwall circuit.
BrickwallCircuit trotter_step(const HamiltonianSpec& spec, int order, double dt);

/// n_steps steps of size t / n_steps with adjacent equal-placement layers merged.
BrickwallCircuit trotter_circuit(const HamiltonianSpec& spec, int order, int n_steps, double t);

int trotter_layer_count(const HamiltonianSpec& spec, int order, int n_steps);

/// Fermi-Hubbard step through the interleaved swap network; throws for other models.
BrickwallCircuit fermi_hubbard_swap_network_step(const HamiltonianSpec& spec, int order, double dt);

/// Layers of `first` followed by layers of `second`, without merging.
BrickwallCircuit concatenate(const BrickwallCircuit& first, const BrickwallCircuit& second);

/// Appends the layers of `next`, multiplying the boundary layers together when their placements agree.
void append_merging(BrickwallCircuit& target, const BrickwallCircuit& next);

}  // namespace bwc
