#pragma once

#include <vector>

#include "bwc/tensor.hpp"

namespace bwc {

/// Per-gate storage indexed [layer][position], mirroring a circuit.
template <class T>
using GateIndexed = std::vector<std::vector<T>>;

/// A tangent vector together with the unitary it is attached to.
struct TangentVector {
  Mat4 base;
  Mat4 vector;
};

using TangentBundle = GateIndexed<TangentVector>;

Mat4 skew(const Mat4& m);

/// Re Tr(x^dagger y). Throws ParameterError when the base points differ.
double inner_product(const TangentVector& x, const TangentVector& y);
double bundle_inner_product(const TangentBundle& x, const TangentBundle& y);

TangentVector project_to_tangent(const Mat4& g, const Mat4& eta);
Mat4 retract_polar(const Mat4& g, const TangentVector& xi);
TangentVector vector_transport(const Mat4& g, const TangentVector& eta, const TangentVector& xi);

TangentBundle riemannian_gradient(const GateIndexed<Mat4>& gates,
                                  const GateIndexed<Mat4>& euclidean_gradient);

bool is_tangent(const TangentVector& x, double tol = 1e-10);

TangentBundle zero_bundle(const GateIndexed<Mat4>& gates);

}  // namespace bwc
