#include "bwc/gates.hpp"

#include <cmath>

#include "bwc/linalg.hpp"

namespace bwc {

namespace {
const cplx I1{0.0, 1.0};
}

Mat2 pauli_x() { return (Mat2() << 0, 1, 1, 0).finished(); }
Mat2 pauli_y() { return (Mat2() << 0, -I1, I1, 0).finished(); }
Mat2 pauli_z() { return (Mat2() << 1, 0, 0, -1).finished(); }

Mat4 kron2(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Mat4 swap_gate() {
  Mat4 s = Mat4::Zero();
  s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
  return s;
}

Mat4 ising_gate(double J, double g1, double g2, double h1, double h2, double dt) {
  const Mat2 id = Mat2::Identity();
  const Mat4 h = J * kron2(pauli_z(), pauli_z()) + 0.5 * g1 * kron2(pauli_x(), id) +
                 0.5 * g2 * kron2(id, pauli_x()) + 0.5 * h1 * kron2(pauli_z(), id) +
                 0.5 * h2 * kron2(id, pauli_z());
  return expm_hermitian(h, -I1 * dt);
}

Mat4 heisenberg_gate(const std::array<double, 3>& J, const std::array<double, 3>& h1,
                     const std::array<double, 3>& h2, double dt) {
  const Mat2 id = Mat2::Identity();
  const std::array<Mat2, 3> s{pauli_x(), pauli_y(), pauli_z()};
  Mat4 h = Mat4::Zero();
  for (int a = 0; a < 3; ++a)
    h += J[a] * kron2(s[a], s[a]) + 0.5 * h1[a] * kron2(s[a], id) + 0.5 * h2[a] * kron2(id, s[a]);
  return expm_hermitian(h, -I1 * dt);
}

Mat4 fswap() {
  Mat4 f = swap_gate();
  f(3, 3) = -1.0;
  return f;
}

Mat4 fh_kinetic_gate(double T, double dt) {
  const double c = std::cos(T * dt), s = std::sin(T * dt);
  Mat4 g = Mat4::Identity();
  g(1, 1) = g(2, 2) = c;
  g(1, 2) = g(2, 1) = I1 * s;
  return g;
}

Mat4 fh_interaction_swap_gate(double V, double dt) {
  Mat4 g = fswap();
  g(3, 3) = -std::exp(-I1 * V * dt);
  return g;
}

Mat4 fsim_gate(double T, double V, double dt) {
  const double c = std::cos(T * dt), s = std::sin(T * dt);
  Mat4 g = Mat4::Zero();
  g(0, 0) = 1.0;
  g(1, 1) = g(2, 2) = -I1 * s;
  g(1, 2) = g(2, 1) = c;
  g(3, 3) = -std::exp(-I1 * V * dt);
  return g;
}

}  // namespace bwc
