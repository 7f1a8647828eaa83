#include "bwc/weyl.hpp"

#include <cmath>

#include "bwc/gates.hpp"
#include "bwc/linalg.hpp"

namespace bwc {

namespace {

const cplx I1{0.0, 1.0};

Mat2 corner(const WeylParams& p, int j) { return rz(p.theta[j]) * ry(p.psi[j]) * rz(p.phi[j]); }

Mat4 core(const WeylParams& p) {
  const Mat4 h = p.a * kron2(pauli_x(), pauli_x()) + p.b * kron2(pauli_y(), pauli_y()) +
                 p.c * kron2(pauli_z(), pauli_z());
  return expm_hermitian(h, I1);
}

}  // namespace

std::array<double, 15> WeylParams::to_array() const {
  std::array<double, 15> v{a, b, c};
  for (int j = 0; j < 4; ++j) {
    v[3 + 3 * j] = theta[j];
    v[4 + 3 * j] = psi[j];
    v[5 + 3 * j] = phi[j];
  }
  return v;
}

WeylParams WeylParams::from_array(const std::array<double, 15>& v) {
  WeylParams p;
  p.a = v[0];
  p.b = v[1];
  p.c = v[2];
  for (int j = 0; j < 4; ++j) {
    p.theta[j] = v[3 + 3 * j];
    p.psi[j] = v[4 + 3 * j];
    p.phi[j] = v[5 + 3 * j];
  }
  return p;
}

Mat2 rz(double angle) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::exp(-0.5 * I1 * angle);
  m(1, 1) = std::exp(0.5 * I1 * angle);
  return m;
}

Mat2 ry(double angle) {
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  return (Mat2() << c, -s, s, c).finished();
}

Mat4 weyl_gate(const WeylParams& p) {
  return kron2(corner(p, 0), corner(p, 1)) * core(p) * kron2(corner(p, 2), corner(p, 3));
}

std::array<Mat4, 15> weyl_jacobian(const WeylParams& p) {
  std::array<Mat2, 4> k;
  for (int j = 0; j < 4; ++j) k[j] = corner(p, j);
  const Mat4 v = core(p);
  const Mat4 left = kron2(k[0], k[1]);
  const Mat4 right = kron2(k[2], k[3]);

  std::array<Mat4, 15> out;
  out[0] = I1 * left * kron2(pauli_x(), pauli_x()) * v * right;
  out[1] = I1 * left * kron2(pauli_y(), pauli_y()) * v * right;
  out[2] = I1 * left * kron2(pauli_z(), pauli_z()) * v * right;

  for (int j = 0; j < 4; ++j) {
    const Mat2 z_half = -0.5 * I1 * pauli_z();
    const Mat2 y_half = -0.5 * I1 * pauli_y();
    const std::array<Mat2, 3> dk{
        z_half * k[j],
        rz(p.theta[j]) * y_half * ry(p.psi[j]) * rz(p.phi[j]),
        rz(p.theta[j]) * ry(p.psi[j]) * z_half * rz(p.phi[j]),
    };
    for (int a = 0; a < 3; ++a) {
      std::array<Mat2, 4> f = k;
      f[j] = dk[a];
      out[3 + 3 * j + a] = kron2(f[0], f[1]) * v * kron2(f[2], f[3]);
    }
  }
  return out;
}

}  // namespace bwc
