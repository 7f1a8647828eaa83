#include "bwc/initialization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

#include "bwc/errors.hpp"
#include "bwc/trotter.hpp"

namespace bwc {

namespace {

int parity_of(const Layer& layer) { return layer.empty() ? 0 : layer.front().qubit % 2; }

class LayerCounter {
 public:
  explicit LayerCounter(const HamiltonianSpec& spec) : spec_(spec) {}
  int operator()(int order, int n) {
    auto key = std::make_pair(order, n);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_[key] = trotter_layer_count(spec_, order, n);
  }

 private:
  const HamiltonianSpec& spec_;
  std::map<std::pair<int, int>, int> cache_;
};

struct Scored {
  InitCandidate candidate;
  double score = std::numeric_limits<double>::infinity();
};

/// Minimizes the score over t_order2 in [0, t] by a coarse grid and golden-section refinement.
Scored best_split(InitCandidate c, double t, const InitScorer& scorer) {
  auto eval = [&](double t1) {
    c.t_order2 = t1;
    c.t_order4 = t - t1;
    return scorer(c);
  };
  constexpr int kGrid = 8;
  std::vector<double> grid(kGrid + 1), val(kGrid + 1);
  int best = 0;
  for (int k = 0; k <= kGrid; ++k) {
    grid[k] = t * k / kGrid;
    val[k] = eval(grid[k]);
    if (val[k] < val[best]) best = k;
  }
  double lo = grid[std::max(0, best - 1)], hi = grid[std::min(kGrid, best + 1)];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  while (hi - lo > 1e-4 * std::max(std::abs(t), 1e-12)) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = eval(x2);
    }
  }
  Scored out;
  const double t1 = f1 < f2 ? x1 : x2;
  out.score = std::min(f1, f2);
  if (val[best] < out.score) {
    out.score = val[best];
    out.candidate = c;
    out.candidate.t_order2 = grid[best];
  } else {
    out.candidate = c;
    out.candidate.t_order2 = t1;
  }
  out.candidate.t_order4 = t - out.candidate.t_order2;
  return out;
}

Scored score_pure(const HamiltonianSpec&, int order, int n, double t, const InitScorer& scorer) {
  InitCandidate c;
  if (order == 2) {
    c.order2_steps = n;
    c.t_order2 = t;
  } else {
    c.order4_steps = n;
    c.t_order4 = t;
  }
  return {c, scorer(c)};
}

}  // namespace

BrickwallCircuit build_candidate(const HamiltonianSpec& spec, const InitCandidate& c) {
  BrickwallCircuit circuit(spec.n_sites);
  if (c.order2_steps > 0) circuit = concatenate(circuit, trotter_circuit(spec, 2, c.order2_steps, c.t_order2));
  if (c.order4_steps > 0) circuit = concatenate(circuit, trotter_circuit(spec, 4, c.order4_steps, c.t_order4));
  int parity = circuit.n_layers() ? 1 - parity_of(circuit.layers().back()) : 0;
  for (int k = 0; k < c.identity_layers; ++k) {
    Layer layer = identity_layer(spec.n_sites, parity);
    if (layer.empty()) layer = identity_layer(spec.n_sites, 0);
    circuit.add_layer(std::move(layer));
    parity = 1 - parity;
  }
  return circuit;
}

int candidate_layer_count(const HamiltonianSpec& spec, const InitCandidate& c) {
  int count = c.identity_layers;
  if (c.order2_steps > 0) count += trotter_layer_count(spec, 2, c.order2_steps);
  if (c.order4_steps > 0) count += trotter_layer_count(spec, 4, c.order4_steps);
  return count;
}

InitScorer dense_proxy_scorer(const HamiltonianSpec& spec, double t, int max_qubits) {
  int n = std::min(spec.n_sites, std::min(max_qubits, kMaxDenseQubits));
  if (std::holds_alternative<FermiHubbardModel>(spec.model) && n % 2) --n;
  const HamiltonianSpec proxy = resized(spec, n);
  auto exact = std::make_shared<MatrixXc>(exact_propagator(proxy, t));
  return [proxy, exact](const InitCandidate& c) {
    const MatrixXc w = circuit_to_dense(build_candidate(proxy, c));
    const double d = static_cast<double>(w.rows());
    return 1.0 - std::norm((exact->adjoint() * w).trace() / d);
  };
}

InitResult initialize_circuit(const HamiltonianSpec& spec, double t, int L, const InitScorer& scorer) {
  LayerCounter count(spec);
  if (L < count(2, 1))
    throw ParameterError("L = " + std::to_string(L) + " is below the " + std::to_string(count(2, 1)) +
                         " layers of one order-2 step");
  auto finish = [&](const Scored& s, const std::string& rule) {
    InitCandidate c = s.candidate;
    int used = 0;
    if (c.order2_steps) used += count(2, c.order2_steps);
    if (c.order4_steps) used += count(4, c.order4_steps);
    c.identity_layers = L - used;
    InitResult r{build_candidate(spec, c), c, s.score, rule};
    return r;
  };

  // (1) repeated Trotterization of one order
  Scored best;
  for (int order : {2, 4})
    for (int n = 1; count(order, n) <= L; ++n)
      if (count(order, n) == L) {
        Scored s = score_pure(spec, order, n, t, scorer);
        if (s.score < best.score) best = s;
      }
  if (std::isfinite(best.score)) return finish(best, "trotter");

  // (2) order-2 block followed by an order-4 block
  for (int n4 = 1; count(4, n4) + count(2, 1) <= L; ++n4)
    for (int n2 = 1; count(4, n4) + count(2, n2) <= L; ++n2)
      if (count(4, n4) + count(2, n2) == L) {
        InitCandidate c;
        c.order2_steps = n2;
        c.order4_steps = n4;
        Scored s = best_split(c, t, scorer);
        if (s.score < best.score) best = s;
      }
  if (std::isfinite(best.score)) return finish(best, "concatenation");

  // (3) longest shorter candidates of each kind, padded with identity layers
  for (int order : {2, 4}) {
    int n = 0;
    while (count(order, n + 1) < L) ++n;
    if (n > 0) {
      Scored s = score_pure(spec, order, n, t, scorer);
      if (s.score < best.score) best = s;
    }
  }
  for (int n4 = 1; count(4, n4) + count(2, 1) < L; ++n4) {
    int n2 = 1;
    while (count(4, n4) + count(2, n2 + 1) < L) ++n2;
    InitCandidate c;
    c.order2_steps = n2;
    c.order4_steps = n4;
    Scored s = best_split(c, t, scorer);
    if (s.score < best.score) best = s;
  }
  return finish(best, "padded");
}

InitResult initialize_circuit(const HamiltonianSpec& spec, double t, int L) {
  return initialize_circuit(spec, t, L, dense_proxy_scorer(spec, t));
}

}  // namespace bwc
