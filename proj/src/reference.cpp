#include "bwc/reference.hpp"

#include <cmath>
#include <fstream>

#include <spdlog/spdlog.h>

#include "bwc/circuit.hpp"
#include "bwc/errors.hpp"
#include "bwc/hash.hpp"
#include "bwc/trotter.hpp"

namespace bwc {

std::string to_string(ReferenceMethod m) {
  switch (m) {
    case ReferenceMethod::automatic: return "auto";
    case ReferenceMethod::dense: return "dense";
    case ReferenceMethod::trotter_mpo: return "trotter_mpo";
  }
  return "unknown";
}

ReferenceMethod reference_method_from_string(const std::string& s) {
  if (s == "auto") return ReferenceMethod::automatic;
  if (s == "dense") return ReferenceMethod::dense;
  if (s == "trotter_mpo") return ReferenceMethod::trotter_mpo;
  throw ParameterError("unknown reference method '" + s + "'");
}

void validate(const ReferenceSpec& spec) {
  validate(spec.hamiltonian);
  if (!(spec.t >= 0.0) || !std::isfinite(spec.t)) throw ParameterError("reference time must be non-negative");
  if (spec.n_reps < 1) throw ParameterError("n_reps must be at least 1");
  if (spec.order != 1 && spec.order != 2 && spec.order != 4) throw ParameterError("Trotter order must be 1, 2 or 4");
  if (spec.chi_max < 1) throw ParameterError("chi_max must be at least 1");
  if (!(spec.eps_thres > 0.0)) throw ParameterError("eps_thres must be positive");
}

nlohmann::json to_json(const ReferenceSpec& spec) {
  nlohmann::json j = {{"hamiltonian", to_json(spec.hamiltonian)},
                      {"t", spec.t},
                      {"order", spec.order},
                      {"n_reps", spec.n_reps},
                      {"eps_thres", spec.eps_thres},
                      {"method", to_string(spec.method)}};
  j["chi_max"] = spec.chi_max == kUnboundedChi ? nlohmann::json(nullptr) : nlohmann::json(spec.chi_max);
  return j;
}

std::string reference_hash(const ReferenceSpec& spec) { return hex64(fnv1a(to_json(spec).dump())); }

nlohmann::json ErrorBudget::to_json() const {
  return {{"eps_trot", eps_trot},
          {"eps_trunc", eps_trunc},
          {"eps_comp", eps_comp},
          {"truncation_converged", truncation_converged},
          {"trotter_estimated", trotter_estimated}};
}

ErrorBudget error_budget_from_json(const nlohmann::json& j) {
  ErrorBudget b;
  b.eps_trot = j.at("eps_trot").get<double>();
  b.eps_trunc = j.at("eps_trunc").get<double>();
  b.eps_comp = j.at("eps_comp").get<double>();
  b.truncation_converged = j.at("truncation_converged").get<bool>();
  b.trotter_estimated = j.at("trotter_estimated").get<bool>();
  return b;
}

double dense_hs_cost(const MatrixXc& u, const Mpo& m) {
  const MatrixXc w = to_dense(m);
  if (w.rows() != u.rows()) throw DimensionError("dense operator and MPO differ in dimension");
  const double d = static_cast<double>(u.rows());
  return 1.0 - std::norm((u.adjoint() * w).trace() / d);
}

namespace {

Mpo merge_circuit(const BrickwallCircuit& c, int chi_max, double* discarded) {
  Mpo m = identity_mpo(c.n_qubits());
  double total = 0.0;
  for (int l = 0; l < c.n_layers(); ++l) {
    auto [next, report] = merge_layer(m, c.layer(l), MergeSide::above, chi_max);
    total += report.total_discarded_weight;
    m = std::move(next);
  }
  if (discarded) *discarded = total;
  return m;
}

void finish(ReferenceResult& out, const Mpo& uncompressed, double eps_thres) {
  CompressionResult c = compress_to_threshold(uncompressed, eps_thres);
  out.budget.eps_comp = std::max(0.0, c.cost);
  out.achieved_chi = c.chi;
  out.mpo = std::move(c.mpo);
  const double check = mpo_hs_cost(uncompressed, out.mpo);
  if (check > eps_thres) spdlog::warn("compressed reference exceeds eps_thres: {:.3e} > {:.3e}", check, eps_thres);
}

}  // namespace

TrotterErrorEstimate estimate_trotter_error(const ReferenceSpec& spec, const std::vector<int>& small_sizes) {
  validate(spec);
  if (small_sizes.size() < 2) throw ParameterError("Trotter error extrapolation needs at least two sizes");
  TrotterErrorEstimate out;
  for (int n : small_sizes) {
    check_dense_size(n);
    const HamiltonianSpec h = resized(spec.hamiltonian, n);
    const MatrixXc exact = exact_propagator(h, spec.t);
    const MatrixXc trot = circuit_to_dense(trotter_circuit(h, spec.order, spec.n_reps, spec.t));
    const double d = static_cast<double>(exact.rows());
    out.sizes.push_back(n);
    out.errors.push_back(std::max(0.0, 1.0 - std::norm((exact.adjoint() * trot).trace() / d)));
  }
  const auto k = static_cast<double>(out.sizes.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < out.sizes.size(); ++i) {
    const double x = out.sizes[i], y = out.errors[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw ParameterError("Trotter error extrapolation needs distinct sizes");
  out.slope = (k * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / k;
  double ss = 0.0;
  for (std::size_t i = 0; i < out.sizes.size(); ++i) {
    const double r = out.errors[i] - (out.intercept + out.slope * out.sizes[i]);
    ss += r * r;
  }
  out.residual = std::sqrt(ss / k);
  out.extrapolated = std::max(0.0, out.intercept + out.slope * spec.hamiltonian.n_sites);
  return out;
}

TruncationEstimate estimate_truncation_error(const std::vector<Mpo>& family, double plateau_tol) {
  if (family.size() < 2) throw ParameterError("truncation estimate needs at least two bond dimensions");
  TruncationEstimate out;
  for (std::size_t i = 0; i + 1 < family.size(); ++i)
    out.steps.push_back(std::max(0.0, mpo_hs_cost(family[i], family[i + 1])));
  out.eps_trunc = out.steps.back();
  out.plateau = out.eps_trunc < plateau_tol;
  if (!out.plateau) spdlog::warn("truncation error {:.3e} has not reached the plateau {:.1e}", out.eps_trunc, plateau_tol);
  return out;
}

ReferenceResult build_reference(const ReferenceSpec& spec) {
  validate(spec);
  const int n = spec.hamiltonian.n_sites;
  ReferenceResult out;
  if (spec.t == 0.0) {
    out.mpo = identity_mpo(n);
    out.method_used = spec.method == ReferenceMethod::trotter_mpo ? ReferenceMethod::trotter_mpo : ReferenceMethod::dense;
    return out;
  }
  ReferenceMethod method = spec.method;
  if (method == ReferenceMethod::automatic) method = n <= kMaxDenseQubits ? ReferenceMethod::dense : ReferenceMethod::trotter_mpo;
  out.method_used = method;

  if (method == ReferenceMethod::dense) {
    check_dense_size(n);
    const MatrixXc u = exact_propagator(spec.hamiltonian, spec.t);
    Mpo full = from_dense(u, n);
    Mpo uncompressed = full;
    if (spec.chi_max < static_cast<int>(full.max_bond())) {
      uncompressed = from_dense(u, n, spec.chi_max);
      out.budget.eps_trunc = std::max(0.0, mpo_hs_cost(full, uncompressed));
      out.budget.truncation_converged = out.budget.eps_trunc < 1e-10;
    }
    finish(out, uncompressed, spec.eps_thres);
    return out;
  }

  const BrickwallCircuit circuit = trotter_circuit(spec.hamiltonian, spec.order, spec.n_reps, spec.t);
  Mpo merged = merge_circuit(circuit, spec.chi_max, nullptr);
  if (spec.chi_max != kUnboundedChi && static_cast<int>(merged.max_bond()) >= spec.chi_max) {
    const TruncationEstimate te =
        estimate_truncation_error({merged, merge_circuit(circuit, spec.chi_max + 1, nullptr)});
    out.budget.eps_trunc = te.eps_trunc;
    out.budget.truncation_converged = te.plateau;
  }
  if (n <= 10) {
    out.budget.eps_trot = std::max(0.0, dense_hs_cost(exact_propagator(spec.hamiltonian, spec.t), merged));
  } else if (std::holds_alternative<MolecularDiagonalModel>(spec.hamiltonian.model)) {
    spdlog::warn("Trotter error not estimated for molecular terms above 10 orbitals");
  } else {
    out.budget.eps_trot = estimate_trotter_error(spec, spec.trotter_error_sizes).extrapolated;
    out.budget.trotter_estimated = true;
  }
  finish(out, merged, spec.eps_thres);
  return out;
}

ReferenceResult build_reference_cached(const ReferenceSpec& spec, const std::filesystem::path& cache_dir) {
  namespace fs = std::filesystem;
  const std::string key = reference_hash(spec);
  const fs::path mpo_path = cache_dir / ("ref-" + key + ".mpo");
  const fs::path meta_path = cache_dir / ("ref-" + key + ".json");
  if (fs::exists(mpo_path) && fs::exists(meta_path)) {
    std::ifstream meta(meta_path);
    const nlohmann::json j = nlohmann::json::parse(meta);
    ReferenceResult out;
    out.mpo = load_mpo(mpo_path);
    out.budget = error_budget_from_json(j.at("budget"));
    out.achieved_chi = j.at("achieved_chi").get<int>();
    out.method_used = reference_method_from_string(j.at("method_used").get<std::string>());
    spdlog::info("loaded cached reference {}", mpo_path.string());
    return out;
  }
  ReferenceResult out = build_reference(spec);
  fs::create_directories(cache_dir);
  const fs::path tmp_mpo = mpo_path.string() + ".tmp";
  const fs::path tmp_meta = meta_path.string() + ".tmp";
  save_mpo(tmp_mpo, out.mpo);
  {
    std::ofstream meta(tmp_meta);
    meta << nlohmann::json{{"spec", to_json(spec)},
                           {"budget", out.budget.to_json()},
                           {"achieved_chi", out.achieved_chi},
                           {"method_used", to_string(out.method_used)}}
                .dump(2)
         << '\n';
  }
  fs::rename(tmp_mpo, mpo_path);
  fs::rename(tmp_meta, meta_path);
  return out;
}

}  // namespace bwc
