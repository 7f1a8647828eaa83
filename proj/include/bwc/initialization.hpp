#pragma once

#include <functional>
#include <string>

#include "bwc/circuit.hpp"
#include "bwc/models.hpp"

namespace bwc {

/// Order-2 block (applied first) followed by an order-4 block, then identity layers.
struct InitCandidate {
  int order2_steps = 0;
  int order4_steps = 0;
  double t_order2 = 0.0;
  double t_order4 = 0.0;
  int identity_layers = 0;
};

/// Lower is better; typically a Hilbert-Schmidt cost against a reference.
using InitScorer = std::function<double(const InitCandidate&)>;

struct InitResult {
  BrickwallCircuit circuit;
  InitCandidate candidate;
  double score = 0.0;
  std::string rule;  // "trotter", "concatenation" or "padded"
};

BrickwallCircuit build_candidate(const HamiltonianSpec& spec, const InitCandidate& c);
int candidate_layer_count(const HamiltonianSpec& spec, const InitCandidate& c);

/// Scores candidates by their exact cost against exp(-iHt) on a chain of at most `max_qubits`.
InitScorer dense_proxy_scorer(const HamiltonianSpec& spec, double t, int max_qubits = 8);

/// Picks an L-layer circuit: matching Trotterization, else an order-2 + order-4 concatenation with
/// t_order2 + t_order4 = t, else the best shorter candidate padded with identity layers.
InitResult initialize_circuit(const HamiltonianSpec& spec, double t, int L, const InitScorer& scorer);

/// initialize_circuit with the dense proxy scorer.
InitResult initialize_circuit(const HamiltonianSpec& spec, double t, int L);

}  // namespace bwc
