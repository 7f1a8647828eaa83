#include "bwc/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "bwc/errors.hpp"

namespace bwc {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

bool is_identity_perm(std::span<const std::size_t> perm) {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != i) return false;
  return true;
}

}  // namespace

std::size_t shape_product(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
  for (auto d : shape_)
    if (d == 0) throw DimensionError("tensor axis of length zero in shape " + shape_str(shape_));
  data_.assign(shape_product(shape_), cplx{0.0, 0.0});
}

DenseTensor::DenseTensor(Shape shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto d : shape_)
    if (d == 0) throw DimensionError("tensor axis of length zero in shape " + shape_str(shape_));
  if (shape_product(shape_) != data_.size())
    throw DimensionError("shape " + shape_str(shape_) + " does not match " +
                         std::to_string(data_.size()) + " stored values");
}

DenseTensor DenseTensor::from_matrix(const MatrixXc& m) {
  DenseTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  Eigen::Map<RowMat>(t.data_.data(), m.rows(), m.cols()) = m;
  return t;
}

std::size_t DenseTensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) throw DimensionError("axis " + std::to_string(axis) + " out of range");
  return shape_[axis];
}

std::size_t DenseTensor::offset(std::initializer_list<std::size_t> idx) const {
  if (idx.size() != shape_.size()) throw DimensionError("index rank mismatch");
  std::size_t off = 0;
  std::size_t k = 0;
  for (auto i : idx) {
    if (i >= shape_[k]) throw DimensionError("index out of range");
    off = off * shape_[k] + i;
    ++k;
  }
  return off;
}

DenseTensor DenseTensor::reshaped(Shape new_shape) const& {
  DenseTensor copy = *this;
  return std::move(copy).reshaped(std::move(new_shape));
}

DenseTensor DenseTensor::reshaped(Shape new_shape) && {
  if (shape_product(new_shape) != data_.size())
    throw DimensionError("cannot reshape " + shape_str(shape_) + " to " + shape_str(new_shape));
  return DenseTensor(std::move(new_shape), std::move(data_));
}

DenseTensor DenseTensor::permuted(std::span<const std::size_t> perm) const {
  const std::size_t r = shape_.size();
  if (perm.size() != r) throw DimensionError("permutation rank mismatch");
  std::vector<bool> seen(r, false);
  for (auto p : perm) {
    if (p >= r || seen[p]) throw DimensionError("invalid axis permutation");
    seen[p] = true;
  }
  if (is_identity_perm(perm)) return *this;

  std::vector<std::size_t> in_stride(r, 1);
  for (std::size_t k = r; k-- > 1;) in_stride[k - 1] = in_stride[k] * shape_[k];

  Shape out_shape(r);
  std::vector<std::size_t> stride(r);
  for (std::size_t k = 0; k < r; ++k) {
    out_shape[k] = shape_[perm[k]];
    stride[k] = in_stride[perm[k]];
  }
  std::vector<cplx> out(data_.size());
  const std::size_t inner = out_shape[r - 1];
  const std::size_t inner_stride = stride[r - 1];
  std::vector<std::size_t> idx(r, 0);
  std::size_t in_off = 0;
  std::size_t pos = 0;
  while (pos < out.size()) {
    const cplx* src = data_.data() + in_off;
    if (inner_stride == 1) {
      std::copy(src, src + inner, out.data() + pos);
    } else {
      for (std::size_t j = 0; j < inner; ++j) out[pos + j] = src[j * inner_stride];
    }
    pos += inner;
    // advance the odometer over all but the innermost axis
    std::size_t k = r - 1;
    while (k-- > 0) {
      ++idx[k];
      in_off += stride[k];
      if (idx[k] < out_shape[k]) break;
      in_off -= stride[k] * out_shape[k];
      idx[k] = 0;
    }
  }
  return DenseTensor(std::move(out_shape), std::move(out));
}

DenseTensor DenseTensor::conj() const {
  DenseTensor out = *this;
  for (auto& x : out.data_) x = std::conj(x);
  return out;
}

DenseTensor DenseTensor::scaled(cplx factor) const {
  DenseTensor out = *this;
  for (auto& x : out.data_) x *= factor;
  return out;
}

MatrixXc DenseTensor::to_matrix(std::size_t row_axes) const {
  if (row_axes > shape_.size()) throw DimensionError("row axis count exceeds tensor rank");
  std::size_t rows = 1;
  for (std::size_t k = 0; k < row_axes; ++k) rows *= shape_[k];
  const std::size_t cols = data_.size() / rows;
  return Eigen::Map<const RowMat>(data_.data(), rows, cols);
}

double DenseTensor::norm() const {
  double s = 0.0;
  for (const auto& x : data_) s += std::norm(x);
  return std::sqrt(s);
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b, const AxisPairs& pairs) {
  const std::size_t ra = a.rank();
  const std::size_t rb = b.rank();
  std::vector<bool> used_a(ra, false), used_b(rb, false);
  std::size_t inner = 1;
  for (const auto& [ia, ib] : pairs) {
    if (ia >= ra || ib >= rb) throw DimensionError("contraction axis out of range");
    if (used_a[ia] || used_b[ib]) throw DimensionError("contraction axis paired twice");
    if (a.shape()[ia] != b.shape()[ib])
      throw DimensionError("contracted axes have lengths " + std::to_string(a.shape()[ia]) +
                           " and " + std::to_string(b.shape()[ib]));
    used_a[ia] = used_b[ib] = true;
    inner *= a.shape()[ia];
  }

  std::vector<std::size_t> perm_a, perm_b;
  Shape out_shape;
  std::size_t rows = 1, cols = 1;
  for (std::size_t k = 0; k < ra; ++k)
    if (!used_a[k]) {
      perm_a.push_back(k);
      out_shape.push_back(a.shape()[k]);
      rows *= a.shape()[k];
    }
  for (const auto& pr : pairs) perm_a.push_back(pr.first);
  for (const auto& pr : pairs) perm_b.push_back(pr.second);
  for (std::size_t k = 0; k < rb; ++k)
    if (!used_b[k]) {
      perm_b.push_back(k);
      out_shape.push_back(b.shape()[k]);
      cols *= b.shape()[k];
    }

  // Avoid copies when the operands are already laid out as matrices.
  const DenseTensor* pa = &a;
  const DenseTensor* pb = &b;
  DenseTensor ta, tb;
  if (!is_identity_perm(perm_a)) {
    ta = a.permuted(perm_a);
    pa = &ta;
  }
  if (!is_identity_perm(perm_b)) {
    tb = b.permuted(perm_b);
    pb = &tb;
  }
  if (out_shape.empty()) out_shape.push_back(1);
  DenseTensor out(out_shape);
  Eigen::Map<const RowMat> ma(pa->data().data(), rows, inner);
  Eigen::Map<const RowMat> mb(pb->data().data(), inner, cols);
  Eigen::Map<RowMat>(out.data().data(), rows, cols).noalias() = ma * mb;
  return out;
}

}  // namespace bwc
