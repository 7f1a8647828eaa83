#include "bwc/double_factorization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

#include "bwc/errors.hpp"

namespace bwc {

TwoBodyTensor::TwoBodyTensor(int n_orbitals) : n_(n_orbitals) {
  if (n_orbitals < 0) throw ParameterError("negative orbital count");
  const auto n = static_cast<std::size_t>(n_orbitals);
  data_.assign(n * n * n * n, 0.0);
}

std::size_t TwoBodyTensor::index(int p, int q, int r, int s) const {
  const auto n = static_cast<std::size_t>(n_);
  return ((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n + static_cast<std::size_t>(r)) * n +
         static_cast<std::size_t>(s);
}

double symmetry_violation(const TwoBodyTensor& v) {
  const int n = v.n();
  double worst = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double x = v(p, q, r, s);
          for (double y : {v(q, p, s, r), v(s, r, q, p), v(s, q, r, p), v(p, r, q, s)})
            worst = std::max(worst, std::abs(x - y));
        }
  return worst;
}

DoubleFactorization double_factorize(const Eigen::MatrixXd& t, const TwoBodyTensor& v, double tol) {
  const int n = v.n();
  if (n < 1) throw ParameterError("double factorization needs at least one orbital");
  if (t.rows() != n || t.cols() != n) throw DimensionError("one-body matrix does not match the two-body tensor");
  if (tol < 0) throw ParameterError("tolerance must be non-negative");
  double scale = 0.0;
  for (double x : v.data()) scale = std::max(scale, std::abs(x));
  if (symmetry_violation(v) > 1e-10 * std::max(1.0, scale))
    throw ParameterError("two-body tensor lacks the required permutation symmetry");

  DoubleFactorization df;
  df.one_body_correction = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r)
      for (int q = 0; q < n; ++q) df.one_body_correction(p, r) -= v(p, q, r, q);

  // M_{(ps),(qr)} = v_pqrs pairs the excitations E_ps and E_qr.
  const int n2 = n * n;
  Eigen::MatrixXd m(n2, n2);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) m(p * n + s, q * n + r) = v(p, q, r, s);
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  const double cut = std::max(tol, 1e-12 * top);

  std::vector<int> order(static_cast<std::size_t>(n2));
  for (int k = 0; k < n2; ++k) order[static_cast<std::size_t>(k)] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });
  for (int k : order) {
    const double mu = es.eigenvalues()(k);
    if (std::abs(mu) <= cut) continue;
    Eigen::MatrixXd l(n, n);
    for (int p = 0; p < n; ++p)
      for (int s = 0; s < n; ++s) l(p, s) = es.eigenvectors()(p * n + s, k);
    l = 0.5 * (l + l.transpose());
    DfTerm term;
    term.weight = mu;
    const double off = (l - Eigen::MatrixXd(l.diagonal().asDiagonal())).norm();
    if (off <= 1e-14 * std::max(1.0, l.norm())) {
      term.rotation = Eigen::MatrixXd::Identity(n, n);
      term.eigenvalues = l.diagonal();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inner(l);
      term.rotation = inner.eigenvectors();
      term.eigenvalues = inner.eigenvalues();
    }
    df.terms.push_back(std::move(term));
  }
  return df;
}

TwoBodyTensor reconstruct_two_body(const DoubleFactorization& df, int n) {
  TwoBodyTensor v(n);
  for (const auto& term : df.terms) {
    const Eigen::MatrixXd l = term.rotation * term.eigenvalues.asDiagonal() * term.rotation.transpose();
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) v(p, q, r, s) += term.weight * l(p, s) * l(q, r);
  }
  return v;
}

std::vector<HamiltonianSpec> molecular_diagonal_terms(const MolecularIntegrals& ints, const DoubleFactorization& df) {
  const int n = static_cast<int>(ints.one_body.rows());
  std::vector<HamiltonianSpec> out;
  for (std::size_t k = 0; k < df.terms.size(); ++k) {
    const auto& term = df.terms[k];
    MolecularDiagonalModel m;
    m.T = Eigen::MatrixXd::Zero(n, n);
    if (k == 0) {
      const Eigen::MatrixXd h = ints.one_body + df.one_body_correction;
      m.T = term.rotation.transpose() * h * term.rotation;
      m.T = 0.5 * (m.T + m.T.transpose());
    }
    // weight * (sum_i lambda_i n_i)^2 = sum_i weight lambda_i^2 n_i + sum_{i != j} weight lambda_i lambda_j n_i n_j.
    m.V = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      m.T(i, i) += term.weight * term.eigenvalues(i) * term.eigenvalues(i);
      for (int j = 0; j < n; ++j)
        if (i != j) m.V(i, j) = 2.0 * term.weight * term.eigenvalues(i) * term.eigenvalues(j);
    }
    HamiltonianSpec spec{m, n};
    validate(spec);
    out.push_back(std::move(spec));
  }
  return out;
}

void write_integrals(std::ostream& os, const MolecularIntegrals& ints) {
  const int n = ints.two_body.n();
  os << "ints-v1\n" << n << "\n" << std::setprecision(17);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) os << (q ? " " : "") << ints.one_body(p, q);
    os << "\n";
  }
  const auto& d = ints.two_body.data();
  for (std::size_t k = 0; k < d.size(); ++k) os << d[k] << ((k + 1) % static_cast<std::size_t>(n) ? " " : "\n");
}

MolecularIntegrals read_integrals(std::istream& is) {
  std::string tag;
  std::getline(is, tag);
  if (tag != "ints-v1") throw ParameterError("not an ints-v1 file");
  int n = 0;
  if (!(is >> n) || n < 1 || n > 64) throw ParameterError("ints-v1: invalid orbital count");
  MolecularIntegrals ints{Eigen::MatrixXd(n, n), TwoBodyTensor(n)};
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (!(is >> ints.one_body(p, q))) throw ParameterError("ints-v1: truncated one-body block");
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          if (!(is >> ints.two_body(p, q, r, s))) throw ParameterError("ints-v1: truncated two-body block");
  return ints;
}

MolecularIntegrals load_integrals(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot open " + path.string());
  return read_integrals(is);
}

}  // namespace bwc
