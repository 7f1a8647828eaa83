#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

#include "bwc/circuit.hpp"
#include "bwc/tensor.hpp"

namespace bwc {

inline constexpr int kUnboundedChi = std::numeric_limits<int>::max();
/// Singular values (or pivots) below this fraction of the largest are treated as zero.
inline constexpr double kRankCutoff = 1e-14;

enum class CanonicalForm { none, left, right, mixed };

/// Chain of rank-4 site tensors with axes (left bond, out, in, right bond).
class Mpo {
 public:
  Mpo() = default;
  explicit Mpo(std::vector<DenseTensor> sites, CanonicalForm form = CanonicalForm::none, int center = -1);

  int n_sites() const { return static_cast<int>(sites_.size()); }
  const std::vector<DenseTensor>& sites() const { return sites_; }
  const DenseTensor& site(int j) const { return sites_.at(static_cast<std::size_t>(j)); }
  CanonicalForm form() const { return form_; }
  /// Orthogonality center; N-1 for left form, 0 for right form, -1 when none.
  int center() const { return center_; }

  std::vector<std::size_t> bond_dims() const;
  std::size_t max_bond() const;

 private:
  std::vector<DenseTensor> sites_;
  CanonicalForm form_ = CanonicalForm::none;
  int center_ = -1;
};

struct MergeReport {
  double total_discarded_weight = 0.0;
  std::size_t max_bond_reached = 1;
};

enum class MergeSide { below, above };
enum class SweepDirection { left_to_right, right_to_left };

Mpo identity_mpo(int n_sites);
MatrixXc to_dense(const Mpo& m);
Mpo from_dense(const MatrixXc& u, int n_sites, int chi_max = kUnboundedChi, MergeReport* report = nullptr);

Mpo canonicalize(const Mpo& m, CanonicalForm form);
bool check_canonical(const Mpo& m, double tol = 1e-10);

/// SVD sweep keeping at most chi values per bond. The result is right-canonical.
Mpo compress(const Mpo& m, int chi, double* discarded_weight = nullptr);

struct CompressionResult {
  Mpo mpo;
  int chi = 1;
  double cost = 0.0;
};
/// Smallest chi whose compression stays within eps_thres in Hilbert-Schmidt cost.
CompressionResult compress_to_threshold(const Mpo& m, double eps_thres);

/// side = below gives M * W_layer, side = above gives W_layer * M.
std::pair<Mpo, MergeReport> merge_layer(const Mpo& m, const Layer& layer, MergeSide side,
                                        SweepDirection sweep, int chi_max);
/// Chooses the sweep direction that matches the current canonical form.
std::pair<Mpo, MergeReport> merge_layer(const Mpo& m, const Layer& layer, MergeSide side, int chi_max);

/// Tr(a^dagger b).
cplx mpo_overlap(const Mpo& a, const Mpo& b);
double mpo_hs_cost(const Mpo& a, const Mpo& b);
cplx mpo_trace(const Mpo& m);
Mpo adjoint(const Mpo& m);
/// Site order reversed, so qubit q maps to N-1-q.
Mpo reversed(const Mpo& m);
Mpo scaled(const Mpo& m, cplx factor);

/// Reverses a layer to match reversed(): gate on (q, q+1) becomes SWAP G SWAP on (N-2-q, N-1-q).
Layer reversed_layer(const Layer& layer, int n_sites);

void write_mpo(std::ostream& os, const Mpo& m);
Mpo read_mpo(std::istream& is);
void save_mpo(const std::filesystem::path& path, const Mpo& m);
Mpo load_mpo(const std::filesystem::path& path);

}  // namespace bwc
