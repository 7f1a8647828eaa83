#pragma once

#include <array>

#include "bwc/tensor.hpp"

namespace bwc {

/// G = (K1 ⊗ K2) exp(i(a XX + b YY + c ZZ)) (K3 ⊗ K4) with K_j = RZ(theta_j) RY(psi_j) RZ(phi_j).
struct WeylParams {
  double a = 0.0, b = 0.0, c = 0.0;
  std::array<double, 4> theta{}, psi{}, phi{};

  /// Flat order: a, b, c, then (theta_j, psi_j, phi_j) for j = 1..4.
  std::array<double, 15> to_array() const;
  static WeylParams from_array(const std::array<double, 15>& v);
};

Mat2 rz(double angle);
Mat2 ry(double angle);

Mat4 weyl_gate(const WeylParams& p);
/// dG/d(alpha) for every parameter in the flat order.
std::array<Mat4, 15> weyl_jacobian(const WeylParams& p);

}  // namespace bwc
