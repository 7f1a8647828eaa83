#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bwc/models.hpp"
#include "bwc/mpo.hpp"

namespace bwc {

enum class ReferenceMethod { automatic, dense, trotter_mpo };

std::string to_string(ReferenceMethod m);
ReferenceMethod reference_method_from_string(const std::string& s);

struct ReferenceSpec {
  HamiltonianSpec hamiltonian;
  double t = 1.0;
  int order = 4;
  int n_reps = 20;
  int chi_max = kUnboundedChi;
  double eps_thres = 1e-9;
  ReferenceMethod method = ReferenceMethod::automatic;
  /// Sizes used to extrapolate the Trotter error when it cannot be computed directly.
  std::vector<int> trotter_error_sizes = {4, 6, 8};
};

void validate(const ReferenceSpec& spec);
nlohmann::json to_json(const ReferenceSpec& spec);
/// Content hash of the spec, used to key cached references and to name output files.
std::string reference_hash(const ReferenceSpec& spec);

struct ErrorBudget {
  double eps_trot = 0.0;
  double eps_trunc = 0.0;
  double eps_comp = 0.0;
  /// False when the truncation plateau check failed.
  bool truncation_converged = true;
  bool trotter_estimated = false;

  double total() const { return eps_trot + eps_trunc + eps_comp; }
  nlohmann::json to_json() const;
};

ErrorBudget error_budget_from_json(const nlohmann::json& j);

struct ReferenceResult {
  Mpo mpo;
  ErrorBudget budget;
  int achieved_chi = 1;
  ReferenceMethod method_used = ReferenceMethod::dense;
};

ReferenceResult build_reference(const ReferenceSpec& spec);

/// Loads the reference from `cache_dir` when present, otherwise builds and stores it.
ReferenceResult build_reference_cached(const ReferenceSpec& spec, const std::filesystem::path& cache_dir);

struct TrotterErrorEstimate {
  double extrapolated = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::vector<int> sizes;
  std::vector<double> errors;
};

/// C_HS between exact and Trotter propagators at each small size, fitted by a line in N.
TrotterErrorEstimate estimate_trotter_error(const ReferenceSpec& spec, const std::vector<int>& small_sizes);

struct TruncationEstimate {
  double eps_trunc = 0.0;
  bool plateau = true;
  /// C_HS between consecutive members of the family.
  std::vector<double> steps;
};

/// `family` holds the same operator at consecutive bond dimensions, ascending.
TruncationEstimate estimate_truncation_error(const std::vector<Mpo>& family, double plateau_tol = 1e-10);

/// C_HS between a dense unitary and an MPO, d = 2^n.
double dense_hs_cost(const MatrixXc& u, const Mpo& m);

}  // namespace bwc
