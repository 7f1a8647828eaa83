#include <gtest/gtest.h>

#include "bwc/errors.hpp"
#include "bwc/linalg.hpp"
#include "bwc/tensor.hpp"
#include "support/oracle.hpp"

using namespace bwc;

namespace {

DenseTensor random_tensor(Shape shape, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  DenseTensor t(shape);
  for (auto& x : t.data()) x = cplx(nd(rng), nd(rng));
  return t;
}

}  // namespace

TEST(DenseTensor, ConstructionRejectsBadShapes) {
  EXPECT_THROW(DenseTensor({2, 0, 3}), DimensionError);
  EXPECT_THROW(DenseTensor({2, 2}, std::vector<cplx>(3)), DimensionError);
  DenseTensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rank(), 2u);
}

TEST(DenseTensor, RowMajorIndexing) {
  std::vector<cplx> v(24);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  DenseTensor t({2, 3, 4}, v);
  EXPECT_EQ(t(1, 2, 3), cplx(23.0));
  EXPECT_EQ(t(0, 1, 2), cplx(6.0));
  EXPECT_EQ(t.reshaped({6, 4})(4, 1), cplx(17.0));
  EXPECT_THROW(t.reshaped({5, 5}), DimensionError);
}

TEST(DenseTensor, PermuteMatchesLoop) {
  std::mt19937_64 rng(1);
  DenseTensor t = random_tensor({2, 3, 4, 5}, rng);
  DenseTensor p = t.permuted({2, 0, 3, 1});
  ASSERT_EQ(p.shape(), (Shape{4, 2, 5, 3}));
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t d = 0; d < 5; ++d) EXPECT_EQ(p(c, a, d, b), t(a, b, c, d));
  EXPECT_THROW(t.permuted({0, 0, 1, 2}), DimensionError);
}

TEST(DenseTensor, ContractMatchesExplicitSum) {
  std::mt19937_64 rng(2);
  DenseTensor a = random_tensor({3, 2, 4}, rng);
  DenseTensor b = random_tensor({4, 5, 3}, rng);
  DenseTensor c = contract(a, b, {{0, 2}, {2, 0}});
  ASSERT_EQ(c.shape(), (Shape{2, 5}));
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t m = 0; m < 5; ++m) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 4; ++k) s += a(i, j, k) * b(k, m, i);
      EXPECT_NEAR(std::abs(c(j, m) - s), 0.0, 1e-12);
    }
  EXPECT_THROW(contract(a, b, {{0, 0}}), DimensionError);
}

TEST(DenseTensor, FullContractionGivesScalar) {
  std::mt19937_64 rng(3);
  DenseTensor a = random_tensor({2, 3}, rng);
  DenseTensor c = contract(a, a.conj(), {{0, 0}, {1, 1}});
  EXPECT_NEAR(c.data()[0].real(), a.norm() * a.norm(), 1e-12);
}

TEST(Linalg, SvdTruncateReportsDiscardedWeight) {
  std::mt19937_64 rng(4);
  const MatrixXc m = oracle::random_complex(6, 5, rng);
  const TruncatedSVD full = svd_truncate(m, 100);
  EXPECT_LT((full.reconstruct() - m).norm(), 1e-12);
  EXPECT_NEAR(full.discarded_weight, 0.0, 1e-14);
  const TruncatedSVD cut = svd_truncate(m, 2);
  ASSERT_EQ(cut.singular_values.size(), 2);
  double tail = 0.0;
  for (Eigen::Index k = 2; k < full.singular_values.size(); ++k) tail += std::pow(full.singular_values(k), 2);
  EXPECT_NEAR(cut.discarded_weight, tail, 1e-10);
  EXPECT_NEAR((cut.reconstruct() - m).squaredNorm(), tail, 1e-10);
  EXPECT_LT((cut.left_isometry.adjoint() * cut.left_isometry - MatrixXc::Identity(2, 2)).norm(), 1e-12);
  EXPECT_THROW(svd_truncate(m, 0), ParameterError);
}

TEST(Linalg, QrAndRqFactorizations) {
  std::mt19937_64 rng(5);
  for (auto [r, c] : {std::pair{6, 3}, std::pair{3, 6}, std::pair{4, 4}}) {
    const MatrixXc m = oracle::random_complex(r, c, rng);
    const QRResult qr = qr_isometry(m);
    EXPECT_LT((qr.q * qr.r - m).norm(), 1e-12);
    EXPECT_LT((qr.q.adjoint() * qr.q - MatrixXc::Identity(qr.q.cols(), qr.q.cols())).norm(), 1e-12);
    const RQResult rq = rq_isometry(m);
    EXPECT_LT((rq.r * rq.q - m).norm(), 1e-12);
    EXPECT_LT((rq.q * rq.q.adjoint() - MatrixXc::Identity(rq.q.rows(), rq.q.rows())).norm(), 1e-12);
  }
}

TEST(Linalg, PolarFactorIsUnitaryAndOptimal) {
  std::mt19937_64 rng(6);
  const Mat4 m = oracle::random_complex(4, 4, rng);
  const Mat4 u = polar_unitary_factor(m);
  EXPECT_TRUE(is_unitary(u));
  // U^dagger M is Hermitian positive semidefinite.
  const Mat4 p = u.adjoint() * m;
  EXPECT_LT((p - p.adjoint()).norm(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (p + p.adjoint()));
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
  // Rank-deficient input still yields a unitary.
  Mat4 deficient = m;
  deficient.col(3) = deficient.col(0);
  deficient.col(2) = 2.0 * deficient.col(1);
  EXPECT_TRUE(is_unitary(polar_unitary_factor(deficient)));
}

TEST(Linalg, ExpmHermitianMatchesPade) {
  std::mt19937_64 rng(7);
  const MatrixXc a = oracle::random_complex(8, 8, rng);
  const MatrixXc h = a + a.adjoint();
  const MatrixXc u = expm_hermitian(h, cplx(0.0, -0.3));
  EXPECT_LT((u - oracle::expm(cplx(0.0, -0.3) * h)).norm(), 1e-11);
  EXPECT_THROW(expm_hermitian(a, cplx(0, 1)), ParameterError);
}

TEST(Linalg, RankRevealingSplitDropsNullDirections) {
  std::mt19937_64 rng(8);
  const MatrixXc m = oracle::random_complex(8, 3, rng) * oracle::random_complex(3, 6, rng);
  const ExactSplit s = rank_revealing_split(m, 1e-12);
  EXPECT_EQ(s.left.cols(), 3);
  EXPECT_LT((s.left * s.right - m).norm(), 1e-11);
  EXPECT_LT((s.left.adjoint() * s.left - MatrixXc::Identity(3, 3)).norm(), 1e-12);
}

TEST(Linalg, KronMatchesOracle) {
  std::mt19937_64 rng(9);
  const MatrixXc a = oracle::random_complex(2, 3, rng), b = oracle::random_complex(3, 2, rng);
  EXPECT_LT((kron(a, b) - oracle::kron(a, b)).norm(), 1e-14);
}
