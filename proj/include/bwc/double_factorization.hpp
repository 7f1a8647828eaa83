#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "bwc/models.hpp"

namespace bwc {

/// Dense real two-body tensor v_pqrs, the coefficient of a+_p a+_q a_r a_s.
class TwoBodyTensor {
 public:
  explicit TwoBodyTensor(int n_orbitals = 0);
  int n() const { return n_; }
  double& operator()(int p, int q, int r, int s) { return data_[index(p, q, r, s)]; }
  double operator()(int p, int q, int r, int s) const { return data_[index(p, q, r, s)]; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(int p, int q, int r, int s) const;
  int n_;
  std::vector<double> data_;
};

struct MolecularIntegrals {
  Eigen::MatrixXd one_body;  // t_pq
  TwoBodyTensor two_body;    // v_pqrs
};

struct DfTerm {
  double weight = 0.0;         // eigenvalue of the matricized tensor
  Eigen::MatrixXd rotation;    // U, orthogonal
  Eigen::VectorXd eigenvalues; // lambda
};

struct DoubleFactorization {
  Eigen::MatrixXd one_body_correction;  // S_pq
  std::vector<DfTerm> terms;
  int n_rot() const { return static_cast<int>(terms.size()); }
};

/// Largest violation of v_pqrs = v_qpsr = v_srqp (and the real-orbital swaps).
double symmetry_violation(const TwoBodyTensor& v);

/// Two-level eigendecomposition of v; terms with |weight| <= tol are dropped.
DoubleFactorization double_factorize(const Eigen::MatrixXd& t, const TwoBodyTensor& v, double tol);

TwoBodyTensor reconstruct_two_body(const DoubleFactorization& df, int n_orbitals);

/// Diagonal Hamiltonians sum_ij T_ij b+_i b_j + 1/2 sum_{i!=j} V_ij n_i n_j, one per term, in each term's rotated basis.
/// The full one-body part (t + S) is assigned to the first term.
std::vector<HamiltonianSpec> molecular_diagonal_terms(const MolecularIntegrals& ints, const DoubleFactorization& df);

/// "ints-v1" text format: tag line, n_orbitals, n^2 values of t, n^4 values of v (row-major).
void write_integrals(std::ostream& os, const MolecularIntegrals& ints);
MolecularIntegrals read_integrals(std::istream& is);
MolecularIntegrals load_integrals(const std::filesystem::path& path);

}  // namespace bwc
