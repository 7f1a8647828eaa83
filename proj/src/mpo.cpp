#include "bwc/mpo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <spdlog/spdlog.h>

#include "bwc/errors.hpp"
#include "bwc/hash.hpp"
#include "bwc/linalg.hpp"

namespace bwc {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

DenseTensor tensor_from(const MatrixXc& m, Shape shape) {
  DenseTensor t = DenseTensor::from_matrix(m);
  return std::move(t).reshaped(std::move(shape));
}

Mat4 swap_conjugated(const Mat4& g) {
  Mat4 s = Mat4::Zero();
  s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
  return s * g * s;
}

DenseTensor gate_tensor(const Mat4& g) {
  return DenseTensor::from_matrix(g).reshaped({2, 2, 2, 2});
}

/// Number of values kept by a truncated SVD split: at most chi, and only above the rank cutoff.
Eigen::Index retained(const Eigen::VectorXd& s, int chi) {
  Eigen::Index k = std::min<Eigen::Index>(s.size(), chi);
  const double floor = s.size() ? s(0) * kRankCutoff : 0.0;
  while (k > 1 && s(k - 1) <= floor) --k;
  return k;
}

struct Split {
  MatrixXc left;
  MatrixXc right;
  double discarded = 0.0;
};

/// Splits m = left * right with orthonormal columns in left, truncating to chi values.
Split split_left_isometry(const MatrixXc& m, int chi) {
  const Eigen::Index full_rank = std::min(m.rows(), m.cols());
  if (chi >= full_rank) {
    ExactSplit e = rank_revealing_split(m, kRankCutoff);
    return {std::move(e.left), std::move(e.right), 0.0};
  }
  Eigen::BDCSVD<MatrixXc> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::Index k = retained(s, chi);
  Split out;
  out.left = svd.matrixU().leftCols(k);
  out.right = s.head(k).cast<cplx>().asDiagonal() * svd.matrixV().leftCols(k).adjoint();
  out.discarded = s.tail(s.size() - k).squaredNorm();
  return out;
}

Mpo left_to_right_merge(const Mpo& m, const Layer& layer, MergeSide side, int chi, MergeReport& report) {
  const int n = m.n_sites();
  std::vector<const Gate*> gate_at(static_cast<std::size_t>(n), nullptr);
  for (const auto& g : layer) gate_at[static_cast<std::size_t>(g.qubit)] = &g;

  std::vector<DenseTensor> out(static_cast<std::size_t>(n));
  DenseTensor cur = m.site(0);
  int pos = 0;
  while (true) {
    if (gate_at[static_cast<std::size_t>(pos)] != nullptr) {
      const Gate& gate = *gate_at[static_cast<std::size_t>(pos)];
      DenseTensor theta = contract(cur, m.site(pos + 1), {{3, 0}});
      const DenseTensor g = gate_tensor(gate.matrix);
      if (side == MergeSide::above) {
        theta = contract(g, theta, {{2, 1}, {3, 3}}).permuted({2, 0, 3, 1, 4, 5});
      } else {
        theta = contract(theta, g, {{2, 0}, {4, 1}}).permuted({0, 1, 4, 2, 5, 3});
      }
      const std::size_t l = theta.dim(0);
      const std::size_t r = theta.dim(5);
      Split sp = split_left_isometry(theta.to_matrix(3), chi);
      const auto k = static_cast<std::size_t>(sp.left.cols());
      report.total_discarded_weight += sp.discarded;
      report.max_bond_reached = std::max(report.max_bond_reached, k);
      out[static_cast<std::size_t>(pos)] = tensor_from(sp.left, {l, 2, 2, k});
      cur = tensor_from(sp.right, {k, 2, 2, r});
      ++pos;
      continue;
    }
    if (pos == n - 1) {
      out[static_cast<std::size_t>(pos)] = std::move(cur);
      break;
    }
    const std::size_t l = cur.dim(0);
    QRResult qr = qr_isometry(cur.to_matrix(3));
    const auto k = static_cast<std::size_t>(qr.q.cols());
    report.max_bond_reached = std::max(report.max_bond_reached, k);
    out[static_cast<std::size_t>(pos)] = tensor_from(qr.q, {l, 2, 2, k});
    cur = contract(DenseTensor::from_matrix(qr.r), m.site(pos + 1), {{1, 0}});
    ++pos;
  }
  return Mpo(std::move(out), CanonicalForm::left, n - 1);
}

void validate_layer(const Layer& layer, int n) {
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const auto& g : layer) {
    if (g.qubit < 0 || g.qubit + 1 >= n)
      throw ParameterError("gate on qubit " + std::to_string(g.qubit) + " lies outside the chain");
    if (used[static_cast<std::size_t>(g.qubit)] || used[static_cast<std::size_t>(g.qubit + 1)])
      throw ParameterError("overlapping gates in one layer");
    used[static_cast<std::size_t>(g.qubit)] = used[static_cast<std::size_t>(g.qubit + 1)] = true;
  }
}

template <class T>
void write_pod(std::ostream& os, const T& v, std::uint64_t& h) {
  const auto* p = reinterpret_cast<const unsigned char*>(&v);
  os.write(reinterpret_cast<const char*>(p), sizeof(T));
  h = fnv1a(std::span(p, sizeof(T)), h);
}

template <class T>
T read_pod(std::istream& is, std::uint64_t& h) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ParameterError("truncated mpo-v1 stream");
  h = fnv1a(std::span(reinterpret_cast<const unsigned char*>(&v), sizeof(T)), h);
  return v;
}

constexpr std::string_view kMpoTag = "mpo-v1\n";

}  // namespace

Mpo::Mpo(std::vector<DenseTensor> sites, CanonicalForm form, int center)
    : sites_(std::move(sites)), form_(form), center_(center) {
  if (sites_.empty()) throw ParameterError("an MPO needs at least one site");
  for (std::size_t j = 0; j < sites_.size(); ++j) {
    const auto& s = sites_[j].shape();
    if (s.size() != 4 || s[1] != 2 || s[2] != 2)
      throw DimensionError("MPO site " + std::to_string(j) + " must have shape (l, 2, 2, r)");
    if (j > 0 && sites_[j - 1].dim(3) != s[0])
      throw DimensionError("bond mismatch between sites " + std::to_string(j - 1) + " and " + std::to_string(j));
  }
  if (sites_.front().dim(0) != 1 || sites_.back().dim(3) != 1)
    throw DimensionError("MPO boundary bonds must have dimension 1");
  const int n = n_sites();
  switch (form_) {
    case CanonicalForm::left: center_ = n - 1; break;
    case CanonicalForm::right: center_ = 0; break;
    case CanonicalForm::none: center_ = -1; break;
    case CanonicalForm::mixed:
      if (center_ < 0 || center_ >= n) throw ParameterError("mixed canonical center out of range");
      break;
  }
}

std::vector<std::size_t> Mpo::bond_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j + 1 < sites_.size(); ++j) out.push_back(sites_[j].dim(3));
  return out;
}

std::size_t Mpo::max_bond() const {
  std::size_t b = 1;
  for (auto d : bond_dims()) b = std::max(b, d);
  return b;
}

Mpo identity_mpo(int n_sites) {
  if (n_sites < 2) throw ParameterError("identity_mpo needs at least 2 sites");
  std::vector<DenseTensor> sites;
  const double inv = 1.0 / std::sqrt(2.0);
  const double head = std::pow(std::sqrt(2.0), n_sites - 1);
  for (int j = 0; j < n_sites; ++j) {
    DenseTensor t({1, 2, 2, 1});
    const double v = j == 0 ? head : inv;
    t(0, 0, 0, 0) = v;
    t(0, 1, 1, 0) = v;
    sites.push_back(std::move(t));
  }
  return Mpo(std::move(sites), CanonicalForm::right);
}

MatrixXc to_dense(const Mpo& m) {
  const int n = m.n_sites();
  check_dense_size(n);
  DenseTensor acc = m.site(0).reshaped({2, 2, m.site(0).dim(3)});
  std::size_t d = 2;
  for (int j = 1; j < n; ++j) {
    const DenseTensor& s = m.site(j);
    DenseTensor x = contract(acc, s, {{2, 0}});  // (O, I, o, i, r)
    x = x.permuted({0, 2, 1, 3, 4});
    d *= 2;
    acc = std::move(x).reshaped({d, d, s.dim(3)});
  }
  return acc.to_matrix(1);
}

Mpo from_dense(const MatrixXc& u, int n_sites, int chi_max, MergeReport* report) {
  if (n_sites < 1) throw ParameterError("from_dense needs at least one site");
  check_dense_size(n_sites);
  const Eigen::Index d = Eigen::Index{1} << n_sites;
  if (u.rows() != d || u.cols() != d)
    throw DimensionError("from_dense: matrix dimension does not equal 2^n_sites");
  if (chi_max < 1) throw ParameterError("chi_max must be at least 1");

  // Interleave out/in indices: (o0..o_{n-1}, i0..i_{n-1}) -> (o0, i0, o1, i1, ...).
  Shape shape(static_cast<std::size_t>(2 * n_sites), 2);
  std::vector<std::size_t> perm;
  for (int j = 0; j < n_sites; ++j) {
    perm.push_back(static_cast<std::size_t>(j));
    perm.push_back(static_cast<std::size_t>(n_sites + j));
  }
  DenseTensor rest = DenseTensor::from_matrix(u).reshaped(shape).permuted(perm);

  MergeReport rep;
  std::vector<DenseTensor> sites;
  std::size_t l = 1;
  for (int j = 0; j + 1 < n_sites; ++j) {
    const std::size_t cols = rest.size() / (l * 4);
    MatrixXc mat = rest.reshaped({l * 4, cols}).to_matrix(1);
    Eigen::BDCSVD<MatrixXc> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const Eigen::Index k = retained(s, chi_max);
    rep.total_discarded_weight += s.tail(s.size() - k).squaredNorm();
    rep.max_bond_reached = std::max(rep.max_bond_reached, static_cast<std::size_t>(k));
    sites.push_back(tensor_from(svd.matrixU().leftCols(k), {l, 2, 2, static_cast<std::size_t>(k)}));
    MatrixXc carry = s.head(k).cast<cplx>().asDiagonal() * svd.matrixV().leftCols(k).adjoint();
    l = static_cast<std::size_t>(k);
    rest = DenseTensor::from_matrix(carry).reshaped({l, cols});
  }
  sites.push_back(std::move(rest).reshaped({l, 2, 2, 1}));
  if (report) *report = rep;
  return Mpo(std::move(sites), CanonicalForm::left);
}

Mpo canonicalize(const Mpo& m, CanonicalForm form) {
  const int n = m.n_sites();
  std::vector<DenseTensor> sites = m.sites();
  if (form == CanonicalForm::left) {
    for (int j = 0; j + 1 < n; ++j) {
      auto& s = sites[static_cast<std::size_t>(j)];
      const std::size_t l = s.dim(0);
      QRResult qr = qr_isometry(s.to_matrix(3));
      const auto k = static_cast<std::size_t>(qr.q.cols());
      s = tensor_from(qr.q, {l, 2, 2, k});
      sites[static_cast<std::size_t>(j + 1)] =
          contract(DenseTensor::from_matrix(qr.r), sites[static_cast<std::size_t>(j + 1)], {{1, 0}});
    }
    return Mpo(std::move(sites), CanonicalForm::left);
  }
  if (form == CanonicalForm::right) {
    for (int j = n - 1; j > 0; --j) {
      auto& s = sites[static_cast<std::size_t>(j)];
      const std::size_t r = s.dim(3);
      RQResult rq = rq_isometry(s.to_matrix(1));
      const auto k = static_cast<std::size_t>(rq.q.rows());
      s = tensor_from(rq.q, {k, 2, 2, r});
      sites[static_cast<std::size_t>(j - 1)] =
          contract(sites[static_cast<std::size_t>(j - 1)], DenseTensor::from_matrix(rq.r), {{3, 0}});
    }
    return Mpo(std::move(sites), CanonicalForm::right);
  }
  throw ParameterError("canonicalize supports the left and right forms");
}

bool check_canonical(const Mpo& m, double tol) {
  const int n = m.n_sites();
  int left_upto = -1, right_from = n;
  switch (m.form()) {
    case CanonicalForm::none: return true;
    case CanonicalForm::left: left_upto = n - 2; break;
    case CanonicalForm::right: right_from = 1; break;
    case CanonicalForm::mixed:
      left_upto = m.center() - 1;
      right_from = m.center() + 1;
      break;
  }
  for (int j = 0; j <= left_upto; ++j) {
    MatrixXc a = m.site(j).to_matrix(3);
    if ((a.adjoint() * a - MatrixXc::Identity(a.cols(), a.cols())).norm() > tol) return false;
  }
  for (int j = right_from; j < n; ++j) {
    MatrixXc a = m.site(j).to_matrix(1);
    if ((a * a.adjoint() - MatrixXc::Identity(a.rows(), a.rows())).norm() > tol) return false;
  }
  return true;
}

Mpo compress(const Mpo& m, int chi, double* discarded_weight) {
  if (chi < 1) throw ParameterError("compression bond dimension must be at least 1");
  Mpo left = m.form() == CanonicalForm::left ? m : canonicalize(m, CanonicalForm::left);
  std::vector<DenseTensor> sites = left.sites();
  double discarded = 0.0;
  for (int j = left.n_sites() - 1; j > 0; --j) {
    auto& s = sites[static_cast<std::size_t>(j)];
    const std::size_t r = s.dim(3);
    // Split as (l) x (o, i, r) so the right factor becomes a right-isometry.
    Split sp = split_left_isometry(s.to_matrix(1).adjoint(), chi);
    discarded += sp.discarded;
    const auto k = static_cast<std::size_t>(sp.left.cols());
    s = tensor_from(sp.left.adjoint(), {k, 2, 2, r});
    sites[static_cast<std::size_t>(j - 1)] = contract(
        sites[static_cast<std::size_t>(j - 1)], DenseTensor::from_matrix(sp.right.adjoint()), {{3, 0}});
  }
  if (discarded_weight) *discarded_weight = discarded;
  return Mpo(std::move(sites), CanonicalForm::right);
}

CompressionResult compress_to_threshold(const Mpo& m, double eps_thres) {
  if (!(eps_thres > 0.0)) throw ParameterError("eps_thres must be positive");
  const int hi_chi = static_cast<int>(m.max_bond());
  CompressionResult best{compress(m, hi_chi), hi_chi, 0.0};
  best.cost = mpo_hs_cost(m, best.mpo);
  int lo = 1, hi = hi_chi;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    Mpo c = compress(m, mid);
    const double cost = mpo_hs_cost(m, c);
    if (cost <= eps_thres) {
      hi = mid;
      best = {std::move(c), mid, cost};
    } else {
      lo = mid + 1;
    }
  }
  return best;
}

std::pair<Mpo, MergeReport> merge_layer(const Mpo& m, const Layer& layer, MergeSide side,
                                        SweepDirection sweep, int chi_max) {
  if (chi_max < 1) throw ParameterError("chi_max must be at least 1");
  const int n = m.n_sites();
  if (n < 2) throw ParameterError("merge_layer needs at least 2 sites");
  validate_layer(layer, n);
  MergeReport report;
  if (sweep == SweepDirection::left_to_right) {
    const Mpo* src = &m;
    Mpo canon;
    if (m.form() != CanonicalForm::right) {
      spdlog::debug("merge_layer: input is not right-canonical, canonicalizing");
      canon = canonicalize(m, CanonicalForm::right);
      src = &canon;
    }
    Mpo out = left_to_right_merge(*src, layer, side, chi_max, report);
    return {std::move(out), report};
  }
  const Mpo* src = &m;
  Mpo canon;
  if (m.form() != CanonicalForm::left) {
    spdlog::debug("merge_layer: input is not left-canonical, canonicalizing");
    canon = canonicalize(m, CanonicalForm::left);
    src = &canon;
  }
  Mpo out = left_to_right_merge(reversed(*src), reversed_layer(layer, n), side, chi_max, report);
  return {reversed(out), report};
}

std::pair<Mpo, MergeReport> merge_layer(const Mpo& m, const Layer& layer, MergeSide side, int chi_max) {
  const auto dir = m.form() == CanonicalForm::left ? SweepDirection::right_to_left
                                                   : SweepDirection::left_to_right;
  return merge_layer(m, layer, side, dir, chi_max);
}

cplx mpo_overlap(const Mpo& a, const Mpo& b) {
  if (a.n_sites() != b.n_sites()) throw ParameterError("MPOs differ in site count");
  DenseTensor env({1, 1});
  env(0, 0) = 1.0;
  for (int j = 0; j < a.n_sites(); ++j) {
    DenseTensor x = contract(env, b.site(j), {{1, 0}});  // (ra, o, i, rb')
    env = contract(a.site(j).conj(), x, {{0, 0}, {1, 1}, {2, 2}});
  }
  return env(0, 0);
}

double mpo_hs_cost(const Mpo& a, const Mpo& b) {
  const double d = std::ldexp(1.0, a.n_sites());
  return 1.0 - std::norm(mpo_overlap(a, b) / d);
}

cplx mpo_trace(const Mpo& m) {
  Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Ones(1);
  for (const auto& s : m.sites()) {
    const auto l = static_cast<Eigen::Index>(s.dim(0));
    const auto r = static_cast<Eigen::Index>(s.dim(3));
    MatrixXc t = MatrixXc::Zero(l, r);
    for (Eigen::Index a = 0; a < l; ++a)
      for (Eigen::Index b = 0; b < r; ++b)
        t(a, b) = s(a, 0, 0, b) + s(a, 1, 1, b);
    v = v * t;
  }
  return v(0);
}

Mpo adjoint(const Mpo& m) {
  std::vector<DenseTensor> sites;
  for (const auto& s : m.sites()) sites.push_back(s.permuted({0, 2, 1, 3}).conj());
  return Mpo(std::move(sites), m.form(), m.center());
}

Mpo reversed(const Mpo& m) {
  std::vector<DenseTensor> sites;
  for (auto it = m.sites().rbegin(); it != m.sites().rend(); ++it) sites.push_back(it->permuted({3, 1, 2, 0}));
  const int n = m.n_sites();
  switch (m.form()) {
    case CanonicalForm::left: return Mpo(std::move(sites), CanonicalForm::right);
    case CanonicalForm::right: return Mpo(std::move(sites), CanonicalForm::left);
    case CanonicalForm::mixed: return Mpo(std::move(sites), CanonicalForm::mixed, n - 1 - m.center());
    case CanonicalForm::none: break;
  }
  return Mpo(std::move(sites));
}

Mpo scaled(const Mpo& m, cplx factor) {
  std::vector<DenseTensor> sites = m.sites();
  const int c = std::max(0, m.center());
  sites[static_cast<std::size_t>(c)] = sites[static_cast<std::size_t>(c)].scaled(factor);
  return Mpo(std::move(sites), m.form(), m.center());
}

Layer reversed_layer(const Layer& layer, int n_sites) {
  Layer out;
  out.reserve(layer.size());
  for (auto it = layer.rbegin(); it != layer.rend(); ++it)
    out.push_back({swap_conjugated(it->matrix), n_sites - 2 - it->qubit});
  return out;
}

void write_mpo(std::ostream& os, const Mpo& m) {
  static_assert(std::endian::native == std::endian::little, "mpo-v1 is little-endian");
  std::uint64_t h = fnv1a(kMpoTag);
  os.write(kMpoTag.data(), static_cast<std::streamsize>(kMpoTag.size()));
  write_pod(os, static_cast<std::uint64_t>(m.n_sites()), h);
  write_pod(os, static_cast<std::uint64_t>(m.form()), h);
  write_pod(os, static_cast<std::int64_t>(m.center()), h);
  for (const auto& s : m.sites()) {
    for (auto d : s.shape()) write_pod(os, static_cast<std::uint64_t>(d), h);
    for (const auto& z : s.data()) {
      write_pod(os, z.real(), h);
      write_pod(os, z.imag(), h);
    }
  }
  std::uint64_t dummy = 0;
  write_pod(os, h, dummy);
  if (!os) throw ParameterError("failed writing mpo-v1 stream");
}

Mpo read_mpo(std::istream& is) {
  std::string tag(kMpoTag.size(), '\0');
  is.read(tag.data(), static_cast<std::streamsize>(tag.size()));
  if (!is || tag != kMpoTag) throw ParameterError("not an mpo-v1 stream");
  std::uint64_t h = fnv1a(kMpoTag);
  const auto n = read_pod<std::uint64_t>(is, h);
  const auto form = read_pod<std::uint64_t>(is, h);
  const auto center = read_pod<std::int64_t>(is, h);
  if (n == 0 || n > 100000 || form > 3) throw ParameterError("corrupt mpo-v1 header");
  std::vector<DenseTensor> sites;
  for (std::uint64_t j = 0; j < n; ++j) {
    Shape shape(4);
    for (auto& d : shape) d = read_pod<std::uint64_t>(is, h);
    if (shape_product(shape) > (std::size_t{1} << 32)) throw ParameterError("corrupt mpo-v1 site shape");
    std::vector<cplx> data(shape_product(shape));
    for (auto& z : data) {
      const double re = read_pod<double>(is, h);
      const double im = read_pod<double>(is, h);
      z = {re, im};
    }
    sites.emplace_back(std::move(shape), std::move(data));
  }
  std::uint64_t dummy = 0;
  const auto stored = read_pod<std::uint64_t>(is, dummy);
  if (stored != h) throw ParameterError("mpo-v1 checksum mismatch");
  return Mpo(std::move(sites), static_cast<CanonicalForm>(form), static_cast<int>(center));
}

void save_mpo(const std::filesystem::path& path, const Mpo& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParameterError("cannot open " + path.string() + " for writing");
  write_mpo(os, m);
}

Mpo load_mpo(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParameterError("cannot open " + path.string());
  return read_mpo(is);
}

}  // namespace bwc
