#include "bwc/stiefel.hpp"

#include "bwc/errors.hpp"
#include "bwc/linalg.hpp"

namespace bwc {

namespace {

void check_same_shape(const GateIndexed<Mat4>& a, const auto& b) {
  if (a.size() != b.size()) throw ParameterError("gate index sets differ in layer count");
  for (std::size_t l = 0; l < a.size(); ++l)
    if (a[l].size() != b[l].size()) throw ParameterError("gate index sets differ in layer " + std::to_string(l));
}

}  // namespace

Mat4 skew(const Mat4& m) { return 0.5 * (m - m.adjoint()); }

double inner_product(const TangentVector& x, const TangentVector& y) {
  if ((x.base - y.base).norm() > kUnitaryTol)
    throw ParameterError("inner product of tangent vectors at different base points");
  return (x.vector.adjoint() * y.vector).trace().real();
}

double bundle_inner_product(const TangentBundle& x, const TangentBundle& y) {
  if (x.size() != y.size()) throw ParameterError("tangent bundles differ in layer count");
  double s = 0.0;
  for (std::size_t l = 0; l < x.size(); ++l) {
    if (x[l].size() != y[l].size()) throw ParameterError("tangent bundles differ in gate count");
    for (std::size_t i = 0; i < x[l].size(); ++i) s += inner_product(x[l][i], y[l][i]);
  }
  return s;
}

TangentVector project_to_tangent(const Mat4& g, const Mat4& eta) {
  return {g, g * skew(g.adjoint() * eta)};
}

Mat4 retract_polar(const Mat4& g, const TangentVector& xi) {
  return polar_unitary_factor(Mat4(g + xi.vector));
}

TangentVector vector_transport(const Mat4& g, const TangentVector& eta, const TangentVector& xi) {
  return project_to_tangent(retract_polar(g, eta), xi.vector);
}

TangentBundle riemannian_gradient(const GateIndexed<Mat4>& gates,
                                  const GateIndexed<Mat4>& euclidean_gradient) {
  check_same_shape(gates, euclidean_gradient);
  TangentBundle out(gates.size());
  for (std::size_t l = 0; l < gates.size(); ++l) {
    out[l].reserve(gates[l].size());
    for (std::size_t i = 0; i < gates[l].size(); ++i)
      out[l].push_back(project_to_tangent(gates[l][i], euclidean_gradient[l][i]));
  }
  return out;
}

bool is_tangent(const TangentVector& x, double tol) {
  const Mat4 a = x.base.adjoint() * x.vector;
  return (a + a.adjoint()).norm() <= tol;
}

TangentBundle zero_bundle(const GateIndexed<Mat4>& gates) {
  TangentBundle out(gates.size());
  for (std::size_t l = 0; l < gates.size(); ++l)
    for (const auto& g : gates[l]) out[l].push_back({g, Mat4::Zero()});
  return out;
}

}  // namespace bwc
