#pragma once

#include <Eigen/Dense>

#include "bwc/tensor.hpp"

namespace bwc {

struct TruncatedSVD {
  MatrixXc left_isometry;           // rows x k, orthonormal columns
  Eigen::VectorXd singular_values;  // k values, descending
  MatrixXc right_factor;            // k x cols, the V^dagger rows
  double discarded_weight = 0.0;

  MatrixXc reconstruct() const;
};

TruncatedSVD svd_truncate(const MatrixXc& m, int chi_max);
TruncatedSVD svd_truncate(const DenseTensor& m, int chi_max);

struct QRResult {
  MatrixXc q;  // rows x k with orthonormal columns
  MatrixXc r;  // k x cols
};
struct RQResult {
  MatrixXc r;  // rows x k
  MatrixXc q;  // k x cols with orthonormal rows
};

/// Thin QR with k = min(rows, cols).
QRResult qr_isometry(const MatrixXc& m);
/// Thin RQ with k = min(rows, cols).
RQResult rq_isometry(const MatrixXc& m);

/// Unitary factor U of m = U P. Rank-deficient input gets the SVD completion U V^dagger.
MatrixXc polar_unitary_factor(const MatrixXc& m);
Mat4 polar_unitary_factor(const Mat4& m);

/// exp(prefactor * h) for Hermitian h via eigendecomposition.
MatrixXc expm_hermitian(const MatrixXc& h, cplx prefactor);
Mat4 expm_hermitian(const Mat4& h, cplx prefactor);

/// Rank-revealing split m = left * right with left having orthonormal columns.
/// Columns whose pivot falls below rel_tol times the largest are dropped.
struct ExactSplit {
  MatrixXc left;
  MatrixXc right;
};
ExactSplit rank_revealing_split(const MatrixXc& m, double rel_tol);

inline constexpr double kUnitaryTol = 1e-10;

bool is_unitary(const MatrixXc& m, double tol = kUnitaryTol);
bool is_hermitian(const MatrixXc& m, double tol);

MatrixXc kron(const MatrixXc& a, const MatrixXc& b);

}  // namespace bwc
