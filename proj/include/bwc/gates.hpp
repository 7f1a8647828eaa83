#pragma once

#include <array>

#include "bwc/tensor.hpp"

namespace bwc {

Mat2 pauli_x();
Mat2 pauli_y();
Mat2 pauli_z();
Mat4 kron2(const Mat2& a, const Mat2& b);
Mat4 swap_gate();

/// exp(-i dt (J ZZ + g1/2 XI + g2/2 IX + h1/2 ZI + h2/2 IZ)).
Mat4 ising_gate(double J, double g1, double g2, double h1, double h2, double dt);

/// exp(-i dt (sum_a h1[a]/2 s^a I + h2[a]/2 I s^a + J[a] s^a s^a)).
Mat4 heisenberg_gate(const std::array<double, 3>& J, const std::array<double, 3>& h1,
                     const std::array<double, 3>& h2, double dt);

Mat4 fswap();
/// Hopping exp(i T dt (XX + YY) / 2) on adjacent spin orbitals.
Mat4 fh_kinetic_gate(double T, double dt);
/// fswap with the phase exp(-i V dt) on the doubly occupied state.
Mat4 fh_interaction_swap_gate(double V, double dt);
/// Combined hopping, density interaction and fermionic swap of two adjacent orbitals.
Mat4 fsim_gate(double T, double V, double dt);

}  // namespace bwc
