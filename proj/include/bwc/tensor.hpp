#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bwc {

using cplx = std::complex<double>;
using Shape = std::vector<std::size_t>;
using MatrixXc = Eigen::MatrixXcd;
using Mat4 = Eigen::Matrix4cd;
using Mat2 = Eigen::Matrix2cd;

/// Dense complex array stored in row-major order.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape);
  DenseTensor(Shape shape, std::vector<cplx> data);

  /// Rank-2 tensor holding the entries of `m`.
  static DenseTensor from_matrix(const MatrixXc& m);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }

  std::span<const cplx> data() const { return data_; }
  std::span<cplx> data() { return data_; }

  template <class... I>
  cplx& operator()(I... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <class... I>
  const cplx& operator()(I... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  DenseTensor reshaped(Shape new_shape) const&;
  DenseTensor reshaped(Shape new_shape) &&;
  DenseTensor permuted(std::span<const std::size_t> perm) const;
  DenseTensor permuted(std::initializer_list<std::size_t> perm) const {
    return permuted(std::span<const std::size_t>(perm.begin(), perm.size()));
  }
  DenseTensor conj() const;
  DenseTensor scaled(cplx factor) const;

  /// Matrix view grouping the first `row_axes` axes as rows.
  MatrixXc to_matrix(std::size_t row_axes) const;
  double norm() const;

 private:
  std::size_t offset(std::initializer_list<std::size_t> idx) const;

  Shape shape_;
  std::vector<cplx> data_;
};

using AxisPairs = std::vector<std::pair<std::size_t, std::size_t>>;

/// Contract the paired axes of `a` and `b`. Free axes of `a` come first, then those of `b`.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b, const AxisPairs& pairs);

std::size_t shape_product(const Shape& shape);

}  // namespace bwc
