#include "bwc/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "bwc/errors.hpp"

namespace bwc {

MatrixXc TruncatedSVD::reconstruct() const {
  return left_isometry * singular_values.cast<cplx>().asDiagonal() * right_factor;
}

TruncatedSVD svd_truncate(const MatrixXc& m, int chi_max) {
  if (chi_max < 1) throw ParameterError("chi_max must be at least 1");
  Eigen::BDCSVD<MatrixXc> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::Index full = s.size();
  const Eigen::Index keep = std::min<Eigen::Index>(full, chi_max);
  TruncatedSVD out;
  out.left_isometry = svd.matrixU().leftCols(keep);
  out.singular_values = s.head(keep);
  out.right_factor = svd.matrixV().leftCols(keep).adjoint();
  out.discarded_weight = s.tail(full - keep).squaredNorm();
  return out;
}

TruncatedSVD svd_truncate(const DenseTensor& m, int chi_max) {
  if (m.rank() != 2) throw DimensionError("svd_truncate expects a matrix");
  return svd_truncate(m.to_matrix(1), chi_max);
}

QRResult qr_isometry(const MatrixXc& m) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<MatrixXc> qr(m);
  QRResult out;
  out.q = qr.householderQ() * MatrixXc::Identity(m.rows(), k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

RQResult rq_isometry(const MatrixXc& m) {
  QRResult t = qr_isometry(m.adjoint());
  return {t.r.adjoint(), t.q.adjoint()};
}

MatrixXc polar_unitary_factor(const MatrixXc& m) {
  if (m.rows() != m.cols()) throw DimensionError("polar factor needs a square matrix");
  Eigen::JacobiSVD<MatrixXc> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Mat4 polar_unitary_factor(const Mat4& m) {
  Eigen::JacobiSVD<Mat4> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

bool is_hermitian(const MatrixXc& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

MatrixXc expm_hermitian(const MatrixXc& h, cplx prefactor) {
  if (h.rows() != h.cols()) throw DimensionError("expm_hermitian needs a square matrix");
  if (!is_hermitian(h, 1e-10)) throw ParameterError("expm_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * prefactor).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Mat4 expm_hermitian(const Mat4& h, cplx prefactor) {
  return expm_hermitian(MatrixXc(h), prefactor);
}

ExactSplit rank_revealing_split(const MatrixXc& m, double rel_tol) {
  Eigen::ColPivHouseholderQR<MatrixXc> qr(m.rows(), m.cols());
  qr.setThreshold(rel_tol);
  qr.compute(m);
  const Eigen::Index rank = std::max<Eigen::Index>(1, qr.rank());
  ExactSplit out;
  out.left = qr.householderQ() * MatrixXc::Identity(m.rows(), rank);
  MatrixXc r = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
  out.right = r * qr.colsPermutation().transpose();
  return out;
}

bool is_unitary(const MatrixXc& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - MatrixXc::Identity(m.rows(), m.cols())).norm() <= tol;
}

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
  MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace bwc
