#include <gtest/gtest.h>

#include <sstream>

#include "bwc/errors.hpp"
#include "bwc/mpo.hpp"
#include "support/oracle.hpp"

using namespace bwc;

namespace {

Mpo random_mpo(int n, std::size_t chi, std::mt19937_64& rng) {
  std::vector<DenseTensor> sites;
  for (int j = 0; j < n; ++j) {
    const std::size_t l = j == 0 ? 1 : chi, r = j == n - 1 ? 1 : chi;
    DenseTensor t({l, 2, 2, r});
    const oracle::Mat m = oracle::random_complex(static_cast<Eigen::Index>(l * 4), static_cast<Eigen::Index>(r), rng);
    for (std::size_t k = 0; k < t.size(); ++k) t.data()[k] = m(static_cast<Eigen::Index>(k / r), static_cast<Eigen::Index>(k % r));
    sites.push_back(t);
  }
  return Mpo(sites);
}

Layer random_layer(int n, int parity, std::mt19937_64& rng) {
  Layer layer;
  for (int q = parity; q + 1 < n; q += 2) layer.push_back({oracle::random_gate(rng), q});
  return layer;
}

}  // namespace

TEST(Mpo, ValidatesShapes) {
  EXPECT_THROW(Mpo({DenseTensor({2, 2, 2, 1})}), DimensionError);
  EXPECT_THROW(Mpo({DenseTensor({1, 2, 2, 2}), DenseTensor({3, 2, 2, 1})}), DimensionError);
  EXPECT_THROW(Mpo({DenseTensor({1, 3, 2, 1})}), DimensionError);
}

TEST(Mpo, IdentityMpo) {
  for (int n : {2, 5}) {
    const Mpo id = identity_mpo(n);
    EXPECT_LT((oracle::mpo_dense(id) - oracle::eye(Eigen::Index{1} << n)).norm(), 1e-12);
    EXPECT_EQ(id.max_bond(), 1u);
    EXPECT_TRUE(check_canonical(id));
  }
  EXPECT_THROW(identity_mpo(1), ParameterError);
}

TEST(Mpo, ToDenseMatchesIndependentContraction) {
  std::mt19937_64 rng(21);
  const Mpo m = random_mpo(5, 3, rng);
  EXPECT_LT((to_dense(m) - oracle::mpo_dense(m)).norm(), 1e-11 * oracle::mpo_dense(m).norm());
}

TEST(Mpo, FromDenseRoundTripAndTruncation) {
  std::mt19937_64 rng(22);
  const oracle::Mat u = oracle::random_unitary(64, rng);
  const Mpo m = from_dense(u, 6);
  EXPECT_LT((oracle::mpo_dense(m) - u).norm(), 1e-11);
  EXPECT_TRUE(check_canonical(m));
  EXPECT_EQ(m.bond_dims(), (std::vector<std::size_t>{4, 16, 64, 16, 4}));
  // A product operator has bond dimension one.
  const oracle::Mat a = oracle::random_unitary(4, rng), b = oracle::random_unitary(8, rng);
  EXPECT_EQ(from_dense(oracle::kron(a, b), 5).bond_dims()[1], 1u);
  MergeReport rep;
  const Mpo cut = from_dense(u, 6, 8, &rep);
  EXPECT_LE(cut.max_bond(), 8u);
  EXPECT_GT(rep.total_discarded_weight, 0.0);
  EXPECT_THROW(from_dense(u, 5), DimensionError);
}

TEST(Mpo, CanonicalizePreservesOperator) {
  std::mt19937_64 rng(23);
  const Mpo m = random_mpo(6, 4, rng);
  const oracle::Mat d = oracle::mpo_dense(m);
  for (auto form : {CanonicalForm::left, CanonicalForm::right}) {
    const Mpo c = canonicalize(m, form);
    EXPECT_EQ(c.form(), form);
    EXPECT_TRUE(check_canonical(c));
    EXPECT_LT((oracle::mpo_dense(c) - d).norm(), 1e-11 * d.norm());
    EXPECT_EQ(c.center(), form == CanonicalForm::left ? 5 : 0);
  }
  EXPECT_FALSE(check_canonical(Mpo(m.sites(), CanonicalForm::left)));
}

TEST(Mpo, MergeLayerMatchesDenseProduct) {
  std::mt19937_64 rng(24);
  for (int n : {4, 5, 8}) {
    const oracle::Mat u = oracle::random_unitary(Eigen::Index{1} << n, rng);
    const Mpo m = from_dense(u, n);
    for (int parity : {0, 1})
      for (auto side : {MergeSide::below, MergeSide::above})
        for (auto dir : {SweepDirection::left_to_right, SweepDirection::right_to_left}) {
          const Layer layer = random_layer(n, parity, rng);
          oracle::Mat w = oracle::eye(Eigen::Index{1} << n);
          for (const auto& g : layer) w = oracle::embed(g.matrix, g.qubit, n) * w;
          const oracle::Mat expect = side == MergeSide::below ? oracle::Mat(u * w) : oracle::Mat(w * u);
          const auto [merged, report] = merge_layer(m, layer, side, dir, kUnboundedChi);
          EXPECT_LT((oracle::mpo_dense(merged) - expect).norm(), 1e-11 * expect.norm()) << "n=" << n;
          EXPECT_TRUE(check_canonical(merged));
          EXPECT_EQ(merged.form(), dir == SweepDirection::left_to_right ? CanonicalForm::left : CanonicalForm::right);
        }
  }
}

TEST(Mpo, MergeLayerTruncatesAtChi) {
  std::mt19937_64 rng(25);
  const int n = 6;
  Mpo m = identity_mpo(n);
  for (int l = 0; l < 6; ++l) m = merge_layer(m, random_layer(n, l % 2, rng), MergeSide::above, 4).first;
  EXPECT_LE(m.max_bond(), 4u);
  EXPECT_THROW(merge_layer(m, random_layer(n, 0, rng), MergeSide::above, 0), ParameterError);
  Layer bad = {{oracle::random_gate(rng), 5}};
  EXPECT_THROW(merge_layer(m, bad, MergeSide::above, 4), ParameterError);
}

TEST(Mpo, OverlapTraceAndCost) {
  std::mt19937_64 rng(26);
  const oracle::Mat a = oracle::random_unitary(32, rng), b = oracle::random_unitary(32, rng);
  const Mpo ma = from_dense(a, 5), mb = from_dense(b, 5);
  EXPECT_LT(std::abs(mpo_overlap(ma, mb) - (a.adjoint() * b).trace()), 1e-11);
  EXPECT_LT(std::abs(mpo_trace(ma) - a.trace()), 1e-11);
  EXPECT_NEAR(mpo_hs_cost(ma, mb), oracle::hs_cost(a, b), 1e-12);
  EXPECT_NEAR(mpo_hs_cost(ma, scaled(ma, std::polar(1.0, 0.7))), 0.0, 1e-12);
}

TEST(Mpo, AdjointReversedScaled) {
  std::mt19937_64 rng(27);
  const oracle::Mat a = oracle::random_unitary(16, rng);
  const Mpo m = from_dense(a, 4);
  EXPECT_LT((oracle::mpo_dense(adjoint(m)) - a.adjoint()).norm(), 1e-11);
  EXPECT_LT((oracle::mpo_dense(scaled(m, 2.0)) - 2.0 * a).norm(), 1e-11);
  // Reversal permutes qubits q -> N-1-q.
  oracle::Mat perm = oracle::Mat::Zero(16, 16);
  for (int x = 0; x < 16; ++x) {
    int y = 0;
    for (int k = 0; k < 4; ++k) y |= ((x >> k) & 1) << (3 - k);
    perm(y, x) = 1.0;
  }
  EXPECT_LT((oracle::mpo_dense(reversed(m)) - perm * a * perm.transpose()).norm(), 1e-11);
  const Layer layer = random_layer(4, 1, rng);
  const Layer rev = reversed_layer(layer, 4);
  ASSERT_EQ(rev.size(), 1u);
  EXPECT_EQ(rev[0].qubit, 1);
  const oracle::Mat w = oracle::embed(layer[0].matrix, layer[0].qubit, 4);
  EXPECT_LT((oracle::embed(rev[0].matrix, 1, 4) - perm * w * perm.transpose()).norm(), 1e-12);
}

TEST(Mpo, CompressIsOptimalTruncation) {
  std::mt19937_64 rng(28);
  const oracle::Mat u = oracle::random_unitary(64, rng);
  const Mpo m = from_dense(u, 6);
  const Mpo full = compress(m, 1000);
  EXPECT_LT((oracle::mpo_dense(full) - u).norm(), 1e-11);
  double discarded = 0.0;
  const Mpo c = compress(m, 8, &discarded);
  EXPECT_LE(c.max_bond(), 8u);
  EXPECT_TRUE(check_canonical(c));
  EXPECT_GT(discarded, 0.0);
  // A product of two-qubit unitaries compresses exactly to a small bond dimension.
  const oracle::Mat w = oracle::kron(oracle::kron(oracle::random_unitary(4, rng), oracle::random_unitary(4, rng)),
                                     oracle::random_unitary(4, rng));
  const Mpo mw = from_dense(w, 6);
  const Mpo cw = compress(mw, 4);
  EXPECT_EQ(cw.bond_dims(), (std::vector<std::size_t>{4, 1, 4, 1, 4}));
  EXPECT_NEAR(mpo_hs_cost(mw, cw), 0.0, 1e-12);
}

TEST(Mpo, CompressToThreshold) {
  std::mt19937_64 rng(29);
  const int n = 6;
  Mpo m = identity_mpo(n);
  // Weakly entangling layers give a decaying spectrum.
  for (int l = 0; l < 4; ++l) {
    Layer layer;
    for (int q = l % 2; q + 1 < n; q += 2) {
      const oracle::Mat h = oracle::random_complex(4, 4, rng);
      layer.push_back({oracle::expm(cplx(0, 0.05) * (h + h.adjoint())), q});
    }
    m = merge_layer(m, layer, MergeSide::above, kUnboundedChi).first;
  }
  for (double eps : {1e-4, 1e-8}) {
    const CompressionResult r = compress_to_threshold(m, eps);
    EXPECT_LE(r.cost, eps);
    EXPECT_NEAR(mpo_hs_cost(m, r.mpo), r.cost, 1e-13);
    if (r.chi > 1) EXPECT_GT(mpo_hs_cost(m, compress(m, r.chi - 1)), eps);
  }
  EXPECT_THROW(compress_to_threshold(m, 0.0), ParameterError);
}

TEST(Mpo, SerializationRoundTripIsBitIdentical) {
  std::mt19937_64 rng(30);
  const Mpo m = from_dense(oracle::random_unitary(32, rng), 5);
  std::stringstream ss;
  write_mpo(ss, m);
  const std::string text = ss.str();
  const Mpo back = read_mpo(ss);
  ASSERT_EQ(back.n_sites(), m.n_sites());
  EXPECT_EQ(back.form(), m.form());
  for (int j = 0; j < m.n_sites(); ++j) {
    ASSERT_EQ(back.site(j).shape(), m.site(j).shape());
    EXPECT_TRUE(std::equal(back.site(j).data().begin(), back.site(j).data().end(), m.site(j).data().begin()));
  }
  std::string corrupted = text;
  corrupted[text.size() / 2] = corrupted[text.size() / 2] == '1' ? '2' : '1';
  std::stringstream bad(corrupted);
  EXPECT_ANY_THROW(read_mpo(bad));
  std::stringstream wrong_tag("mpo-v0\n1\n");
  EXPECT_ANY_THROW(read_mpo(wrong_tag));
}
