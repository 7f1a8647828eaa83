#include "bwc/models.hpp"

#include <set>

#include "bwc/circuit.hpp"
#include "bwc/errors.hpp"
#include "bwc/gates.hpp"
#include "bwc/linalg.hpp"
#include "bwc/rng.hpp"

namespace bwc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Mat2 number_op() { return (Mat2() << 0, 0, 0, 1).finished(); }
Mat2 raise_op() { return (Mat2() << 0, 0, 1, 0).finished(); }  // |1><0|
Mat2 lower_op() { return (Mat2() << 0, 1, 0, 0).finished(); }  // |0><1|

/// Dense tensor product of single-qubit operators, qubit 0 most significant.
MatrixXc product_op(const std::vector<Mat2>& ops) {
  MatrixXc m = MatrixXc::Ones(1, 1);
  for (const auto& op : ops) m = kron(m, op);
  return m;
}

std::vector<Mat2> identities(int n) { return std::vector<Mat2>(static_cast<std::size_t>(n), Mat2::Identity()); }

/// a+_p a_q + a+_q a_p in the Jordan-Wigner encoding (p != q are qubit indices).
MatrixXc hopping(int p, int q, int n) {
  if (p > q) std::swap(p, q);
  auto ops = identities(n);
  ops[static_cast<std::size_t>(p)] = raise_op();
  for (int k = p + 1; k < q; ++k) ops[static_cast<std::size_t>(k)] = pauli_z();
  ops[static_cast<std::size_t>(q)] = lower_op();
  MatrixXc h = product_op(ops);
  return h + h.adjoint();
}

MatrixXc density_pair(int p, int q, int n) {
  auto ops = identities(n);
  ops[static_cast<std::size_t>(p)] = number_op();
  ops[static_cast<std::size_t>(q)] = number_op();
  return product_op(ops);
}

MatrixXc local_op(const Mat2& op, int q, int n) {
  auto ops = identities(n);
  ops[static_cast<std::size_t>(q)] = op;
  return product_op(ops);
}

MatrixXc bond_op(const Mat2& a, const Mat2& b, int q, int n) {
  auto ops = identities(n);
  ops[static_cast<std::size_t>(q)] = a;
  ops[static_cast<std::size_t>(q + 1)] = b;
  return product_op(ops);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ParameterError("unknown key '" + key + "' in model block");
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    require(row.size() == static_cast<std::size_t>(rows), "matrix rows must be square");
    for (Eigen::Index c = 0; c < rows; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

}  // namespace

void validate(const HamiltonianSpec& spec) {
  const int n = spec.n_sites;
  require(n >= 2, "a chain needs at least 2 sites");
  std::visit(overloaded{
                 [](const IsingModel&) {},
                 [n](const IsingDisorderedModel& m) {
                   require(m.J.size() == static_cast<std::size_t>(n - 1), "disordered J needs n_sites - 1 entries");
                   require(m.g.size() == static_cast<std::size_t>(n), "disordered g needs n_sites entries");
                   require(m.h.size() == static_cast<std::size_t>(n), "disordered h needs n_sites entries");
                 },
                 [](const HeisenbergModel&) {},
                 [n](const FermiHubbardModel&) {
                   require(n % 2 == 0, "Fermi-Hubbard needs an even number of spin orbitals");
                 },
                 [n](const MolecularDiagonalModel& m) {
                   require(m.T.rows() == n && m.T.cols() == n, "molecular T must be n_sites x n_sites");
                   require(m.V.rows() == n && m.V.cols() == n, "molecular V must be n_sites x n_sites");
                   require((m.T - m.T.transpose()).norm() <= 1e-10, "molecular T must be symmetric");
                   require((m.V - m.V.transpose()).norm() <= 1e-10, "molecular V must be symmetric");
                 },
             },
             spec.model);
}

std::string model_name(const HamiltonianSpec& spec) {
  return std::visit(overloaded{
                        [](const IsingModel&) { return std::string("ising"); },
                        [](const IsingDisorderedModel&) { return std::string("ising_disordered"); },
                        [](const HeisenbergModel&) { return std::string("heisenberg"); },
                        [](const FermiHubbardModel&) { return std::string("fermi_hubbard"); },
                        [](const MolecularDiagonalModel&) { return std::string("molecular_diagonal"); },
                    },
                    spec.model);
}

HamiltonianSpec ising_spec(int n, double J, double g, double h) {
  HamiltonianSpec s{IsingModel{J, g, h}, n};
  validate(s);
  return s;
}

HamiltonianSpec heisenberg_spec(int n, const std::array<double, 3>& J, const std::array<double, 3>& h) {
  HamiltonianSpec s{HeisenbergModel{J, h}, n};
  validate(s);
  return s;
}

HamiltonianSpec fermi_hubbard_spec(int n_spin_orbitals, double T, double V) {
  HamiltonianSpec s{FermiHubbardModel{T, V}, n_spin_orbitals};
  validate(s);
  return s;
}

HamiltonianSpec sample_disorder(double J, double g, double h, int n_sites, std::uint64_t seed) {
  if (!(J > 0 && g > 0 && h > 0)) throw ParameterError("disorder means must be positive");
  if (n_sites < 2) throw ParameterError("a chain needs at least 2 sites");
  Rng rng(seed);
  IsingDisorderedModel m;
  m.seed = seed;
  for (int i = 0; i + 1 < n_sites; ++i) m.J.push_back(uniform(rng, 0.5 * J, 1.5 * J));
  for (int i = 0; i < n_sites; ++i) m.g.push_back(uniform(rng, 0.5 * g, 1.5 * g));
  for (int i = 0; i < n_sites; ++i) m.h.push_back(uniform(rng, 0.5 * h, 1.5 * h));
  return {m, n_sites};
}

HamiltonianSpec resized(const HamiltonianSpec& spec, int n_sites) {
  if (n_sites < 2) throw ParameterError("a chain needs at least 2 sites");
  HamiltonianSpec out = spec;
  out.n_sites = n_sites;
  if (auto* m = std::get_if<IsingDisorderedModel>(&out.model)) {
    if (n_sites > spec.n_sites) throw ParameterError("disordered couplings cannot be extended");
    m->J.resize(static_cast<std::size_t>(n_sites - 1));
    m->g.resize(static_cast<std::size_t>(n_sites));
    m->h.resize(static_cast<std::size_t>(n_sites));
  }
  if (std::holds_alternative<MolecularDiagonalModel>(out.model) && n_sites != spec.n_sites)
    throw ParameterError("molecular Hamiltonians cannot be resized");
  validate(out);
  return out;
}

int fh_qubit(int site, int spin) {
  const bool up_first = site % 2 == 0;
  const bool first = (spin == 0) == up_first;
  return 2 * site + (first ? 0 : 1);
}

MatrixXc dense_hamiltonian(const HamiltonianSpec& spec) {
  validate(spec);
  const int n = spec.n_sites;
  check_dense_size(n);
  const Eigen::Index d = Eigen::Index{1} << n;
  MatrixXc h = MatrixXc::Zero(d, d);
  const std::array<Mat2, 3> s{pauli_x(), pauli_y(), pauli_z()};
  std::visit(
      overloaded{
          [&](const IsingModel& m) {
            for (int i = 0; i + 1 < n; ++i) h += m.J * bond_op(pauli_z(), pauli_z(), i, n);
            for (int i = 0; i < n; ++i) h += m.g * local_op(pauli_x(), i, n) + m.h * local_op(pauli_z(), i, n);
          },
          [&](const IsingDisorderedModel& m) {
            for (int i = 0; i + 1 < n; ++i) h += m.J[static_cast<std::size_t>(i)] * bond_op(pauli_z(), pauli_z(), i, n);
            for (int i = 0; i < n; ++i)
              h += m.g[static_cast<std::size_t>(i)] * local_op(pauli_x(), i, n) +
                   m.h[static_cast<std::size_t>(i)] * local_op(pauli_z(), i, n);
          },
          [&](const HeisenbergModel& m) {
            for (int a = 0; a < 3; ++a) {
              for (int i = 0; i + 1 < n; ++i) h += m.J[a] * bond_op(s[a], s[a], i, n);
              for (int i = 0; i < n; ++i) h += m.h[a] * local_op(s[a], i, n);
            }
          },
          [&](const FermiHubbardModel& m) {
            const int sites = n / 2;
            for (int p = 0; p + 1 < sites; ++p)
              for (int spin = 0; spin < 2; ++spin)
                h -= m.T * hopping(fh_qubit(p, spin), fh_qubit(p + 1, spin), n);
            for (int p = 0; p < sites; ++p) h += 0.5 * m.V * density_pair(fh_qubit(p, 0), fh_qubit(p, 1), n);
          },
          [&](const MolecularDiagonalModel& m) {
            for (int p = 0; p < n; ++p) {
              h += m.T(p, p) * local_op(number_op(), p, n);
              for (int q = p + 1; q < n; ++q)
                h += m.T(p, q) * hopping(p, q, n) + m.V(p, q) * density_pair(p, q, n);
            }
          },
      },
      spec.model);
  return h;
}

MatrixXc exact_propagator(const HamiltonianSpec& spec, double t) {
  return expm_hermitian(dense_hamiltonian(spec), cplx{0.0, -t});
}

nlohmann::json to_json(const HamiltonianSpec& spec) {
  nlohmann::json j;
  j["type"] = model_name(spec);
  j["n_sites"] = spec.n_sites;
  std::visit(overloaded{
                 [&](const IsingModel& m) {
                   j["J"] = m.J;
                   j["g"] = m.g;
                   j["h"] = m.h;
                 },
                 [&](const IsingDisorderedModel& m) {
                   j["J_list"] = m.J;
                   j["g_list"] = m.g;
                   j["h_list"] = m.h;
                   j["seed"] = m.seed;
                 },
                 [&](const HeisenbergModel& m) {
                   j["J"] = m.J;
                   j["h"] = m.h;
                 },
                 [&](const FermiHubbardModel& m) {
                   j["T"] = m.T;
                   j["V"] = m.V;
                 },
                 [&](const MolecularDiagonalModel& m) {
                   j["T"] = matrix_to_json(m.T);
                   j["V"] = matrix_to_json(m.V);
                 },
             },
             spec.model);
  return j;
}

HamiltonianSpec spec_from_json(const nlohmann::json& j) {
  require(j.is_object(), "model block must be an object");
  const std::string type = j.at("type").get<std::string>();
  const int n = j.at("n_sites").get<int>();
  HamiltonianSpec spec;
  spec.n_sites = n;
  if (type == "ising") {
    check_keys(j, {"type", "n_sites", "J", "g", "h"});
    spec.model = IsingModel{j.value("J", 1.0), j.value("g", 0.75), j.value("h", 0.6)};
  } else if (type == "ising_disordered") {
    check_keys(j, {"type", "n_sites", "J", "g", "h", "seed", "J_list", "g_list", "h_list"});
    if (j.contains("J_list")) {
      IsingDisorderedModel m;
      m.J = j.at("J_list").get<std::vector<double>>();
      m.g = j.at("g_list").get<std::vector<double>>();
      m.h = j.at("h_list").get<std::vector<double>>();
      m.seed = j.value("seed", std::uint64_t{0});
      spec.model = m;
    } else {
      spec = sample_disorder(j.value("J", 1.0), j.value("g", 0.75), j.value("h", 0.6), n,
                             j.value("seed", std::uint64_t{0}));
    }
  } else if (type == "heisenberg") {
    check_keys(j, {"type", "n_sites", "J", "h"});
    HeisenbergModel m;
    if (j.contains("J")) m.J = j.at("J").get<std::array<double, 3>>();
    if (j.contains("h")) m.h = j.at("h").get<std::array<double, 3>>();
    spec.model = m;
  } else if (type == "fermi_hubbard") {
    check_keys(j, {"type", "n_sites", "T", "V"});
    spec.model = FermiHubbardModel{j.value("T", 1.0), j.value("V", 4.0)};
  } else if (type == "molecular_diagonal") {
    check_keys(j, {"type", "n_sites", "T", "V"});
    spec.model = MolecularDiagonalModel{matrix_from_json(j.at("T")), matrix_from_json(j.at("V"))};
  } else {
    throw ParameterError("unknown model type '" + type + "'");
  }
  validate(spec);
  return spec;
}

}  // namespace bwc
