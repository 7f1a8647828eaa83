#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "bwc/tensor.hpp"

namespace bwc {

/// H = sum_i J Z_i Z_{i+1} + sum_i (g X_i + h Z_i), open chain.
struct IsingModel {
  double J = 1.0, g = 0.75, h = 0.6;
};

/// Site-dependent Ising couplings: J has n-1 entries, g and h have n.
struct IsingDisorderedModel {
  std::vector<double> J, g, h;
  std::uint64_t seed = 0;
};

/// H = sum_i sum_a J^a s^a_i s^a_{i+1} + sum_i sum_a h^a s^a_i.
struct HeisenbergModel {
  std::array<double, 3> J{1.0, 1.0, -0.5};
  std::array<double, 3> h{0.75, 0.0, 0.0};
};

/// Spinful chain with n_sites spin orbitals (n_sites / 2 spatial orbitals):
/// H = -T sum_<pq>,s (a+_ps a_qs + h.c.) + V/2 sum_p n_p_up n_p_down.
struct FermiHubbardModel {
  double T = 1.0, V = 4.0;
};

/// H = sum_pq T_pq a+_p a_q + 1/2 sum_{p != q} V_pq n_p n_q with real symmetric T and V.
struct MolecularDiagonalModel {
  Eigen::MatrixXd T;
  Eigen::MatrixXd V;
};

using ModelVariant =
    std::variant<IsingModel, IsingDisorderedModel, HeisenbergModel, FermiHubbardModel, MolecularDiagonalModel>;

struct HamiltonianSpec {
  ModelVariant model;
  int n_sites = 2;
};

/// Throws ParameterError on inconsistent sizes or values.
void validate(const HamiltonianSpec& spec);
std::string model_name(const HamiltonianSpec& spec);

HamiltonianSpec ising_spec(int n, double J, double g, double h);
HamiltonianSpec heisenberg_spec(int n, const std::array<double, 3>& J, const std::array<double, 3>& h);
HamiltonianSpec fermi_hubbard_spec(int n_spin_orbitals, double T, double V);

/// Couplings drawn uniformly from [x/2, 3x/2] with a seeded mt19937_64.
HamiltonianSpec sample_disorder(double J, double g, double h, int n_sites, std::uint64_t seed);

/// Same model family on a different chain length (disordered couplings are truncated).
HamiltonianSpec resized(const HamiltonianSpec& spec, int n_sites);

/// Qubit index of spin orbital (site, spin) in the interleaved swap-network ordering.
/// spin 0 is up, 1 is down.
int fh_qubit(int site, int spin);

MatrixXc dense_hamiltonian(const HamiltonianSpec& spec);
MatrixXc exact_propagator(const HamiltonianSpec& spec, double t);

nlohmann::json to_json(const HamiltonianSpec& spec);
HamiltonianSpec spec_from_json(const nlohmann::json& j);

}  // namespace bwc
