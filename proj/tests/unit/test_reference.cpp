#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "bwc/errors.hpp"
#include "bwc/reference.hpp"
#include "bwc/trotter.hpp"
#include "support/oracle.hpp"

using namespace bwc;
using oracle::Mat;

namespace {

Mat exact(const HamiltonianSpec& s, double t, int n) {
  Mat h = Mat::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  const auto& m = std::get<IsingModel>(s.model);
  for (int i = 0; i + 1 < n; ++i) h += m.J * oracle::op_on('Z', i, n) * oracle::op_on('Z', i + 1, n);
  for (int i = 0; i < n; ++i) h += m.g * oracle::op_on('X', i, n) + m.h * oracle::op_on('Z', i, n);
  return oracle::expm(cplx(0, -t) * h);
}

std::string serialized(const Mpo& m) {
  std::ostringstream os;
  write_mpo(os, m);
  return os.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("bwc-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Reference, DensePathMatchesExactPropagator) {
  const int n = 6;
  ReferenceSpec spec{ising_spec(n, 1.0, 0.75, 0.6), 1.3};
  spec.eps_thres = 1e-10;
  const ReferenceResult r = build_reference(spec);
  EXPECT_EQ(r.method_used, ReferenceMethod::dense);
  EXPECT_EQ(r.budget.eps_trot, 0.0);
  EXPECT_EQ(r.budget.eps_trunc, 0.0);
  EXPECT_LE(r.budget.eps_comp, spec.eps_thres);
  EXPECT_EQ(static_cast<std::size_t>(r.achieved_chi), r.mpo.max_bond());
  EXPECT_LE(oracle::hs_cost(exact(spec.hamiltonian, spec.t, n), oracle::mpo_dense(r.mpo)), 1.01 * spec.eps_thres);
}

TEST(Reference, TrotterPathReportsTrotterError) {
  const int n = 6;
  ReferenceSpec spec{ising_spec(n, 1.0, 0.75, 0.6), 1.0, 2, 3};
  spec.method = ReferenceMethod::trotter_mpo;
  spec.eps_thres = 1e-12;
  const ReferenceResult r = build_reference(spec);
  EXPECT_EQ(r.method_used, ReferenceMethod::trotter_mpo);
  EXPECT_FALSE(r.budget.trotter_estimated);
  const Mat trot = oracle::circuit_dense(trotter_circuit(spec.hamiltonian, 2, 3, 1.0));
  EXPECT_LT(oracle::hs_cost(trot, oracle::mpo_dense(r.mpo)), 1e-11);
  EXPECT_NEAR(r.budget.eps_trot, oracle::hs_cost(exact(spec.hamiltonian, 1.0, n), trot), 1e-12);
  EXPECT_GT(r.budget.eps_trot, 1e-6);
  EXPECT_NEAR(r.budget.total(), r.budget.eps_trot + r.budget.eps_comp, 1e-18);
}

TEST(Reference, BondCapReportsTruncation) {
  ReferenceSpec spec{ising_spec(6, 1.0, 0.75, 0.6), 1.5};
  spec.chi_max = 4;
  spec.eps_thres = 1e-12;
  for (ReferenceMethod m : {ReferenceMethod::dense, ReferenceMethod::trotter_mpo}) {
    spec.method = m;
    const ReferenceResult r = build_reference(spec);
    EXPECT_LE(r.mpo.max_bond(), 4u);
    EXPECT_GT(r.budget.eps_trunc, 0.0);
    EXPECT_FALSE(r.budget.truncation_converged);
  }
}

TEST(Reference, ZeroTimeIsIdentity) {
  ReferenceSpec spec{ising_spec(5, 1.0, 0.75, 0.6), 0.0};
  const ReferenceResult r = build_reference(spec);
  EXPECT_LT((oracle::mpo_dense(r.mpo) - oracle::eye(32)).norm(), 1e-14);
  EXPECT_EQ(r.budget.total(), 0.0);
}

TEST(Reference, AutoSwitchesToTrotterAboveDenseLimit) {
  ReferenceSpec spec{ising_spec(14, 1.0, 0.75, 0.6), 0.2, 2, 2};
  spec.eps_thres = 1e-8;
  const ReferenceResult r = build_reference(spec);
  EXPECT_EQ(r.method_used, ReferenceMethod::trotter_mpo);
  EXPECT_TRUE(r.budget.trotter_estimated);
  EXPECT_GT(r.budget.eps_trot, 0.0);
}

TEST(Reference, TrotterErrorExtrapolation) {
  ReferenceSpec spec{ising_spec(12, 1.0, 0.75, 0.6), 1.0, 1, 4};
  const TrotterErrorEstimate e = estimate_trotter_error(spec, {4, 6, 8});
  ASSERT_EQ(e.errors.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const int n = e.sizes[i];
    const HamiltonianSpec h = ising_spec(n, 1.0, 0.75, 0.6);
    EXPECT_NEAR(e.errors[i], oracle::hs_cost(exact(h, 1.0, n), oracle::circuit_dense(trotter_circuit(h, 1, 4, 1.0))), 1e-12);
  }
  // Least-squares line through (N, error) evaluated at N = 12.
  const double xm = 6.0, ym = (e.errors[0] + e.errors[1] + e.errors[2]) / 3.0;
  const double slope = (-2.0 * (e.errors[0] - ym) + 2.0 * (e.errors[2] - ym)) / 8.0;
  EXPECT_NEAR(e.slope, slope, 1e-12);
  EXPECT_NEAR(e.extrapolated, std::max(0.0, ym + slope * (12.0 - xm)), 1e-12);
  EXPECT_THROW(estimate_trotter_error(spec, {4}), ParameterError);
}

TEST(Reference, TruncationEstimateUsesLastStep) {
  const Mpo full = from_dense(exact(ising_spec(6, 1.0, 0.75, 0.6), 2.0, 6), 6);
  std::vector<Mpo> family;
  for (int chi : {2, 4, 8, 16, 32}) family.push_back(compress(full, chi));
  const TruncationEstimate e = estimate_truncation_error(family);
  ASSERT_EQ(e.steps.size(), 4u);
  EXPECT_NEAR(e.eps_trunc, mpo_hs_cost(family[3], family[4]), 1e-15);
  EXPECT_EQ(e.plateau, e.eps_trunc < 1e-10);
  EXPECT_THROW(estimate_truncation_error({full}), ParameterError);
}

TEST(Reference, HashAndValidation) {
  ReferenceSpec a{ising_spec(6, 1.0, 0.75, 0.6), 1.0};
  ReferenceSpec b = a;
  EXPECT_EQ(reference_hash(a), reference_hash(b));
  b.eps_thres = 1e-8;
  EXPECT_NE(reference_hash(a), reference_hash(b));
  b = a;
  b.hamiltonian = ising_spec(6, 1.0, 0.75, 0.61);
  EXPECT_NE(reference_hash(a), reference_hash(b));
  b = a;
  b.t = -1.0;
  EXPECT_THROW(build_reference(b), ParameterError);
  b = a;
  b.order = 3;
  EXPECT_THROW(build_reference(b), ParameterError);
  b = a;
  b.method = ReferenceMethod::dense;
  b.hamiltonian = ising_spec(16, 1.0, 0.75, 0.6);
  EXPECT_THROW(build_reference(b), ResourceGuardError);
  EXPECT_EQ(reference_method_from_string(to_string(ReferenceMethod::trotter_mpo)), ReferenceMethod::trotter_mpo);
  EXPECT_THROW(reference_method_from_string("exact"), ParameterError);
}

TEST(Reference, CacheReloadIsBitIdentical) {
  const auto dir = fresh_dir("cache");
  ReferenceSpec spec{ising_spec(6, 1.0, 0.75, 0.6), 1.0};
  const ReferenceResult first = build_reference_cached(spec, dir);
  const auto key = reference_hash(spec);
  EXPECT_TRUE(std::filesystem::exists(dir / ("ref-" + key + ".mpo")));
  EXPECT_TRUE(std::filesystem::exists(dir / ("ref-" + key + ".json")));
  const ReferenceResult second = build_reference_cached(spec, dir);
  EXPECT_EQ(serialized(first.mpo), serialized(second.mpo));
  EXPECT_EQ(first.budget.to_json(), second.budget.to_json());
  EXPECT_EQ(first.achieved_chi, second.achieved_chi);
  std::filesystem::remove_all(dir);
}
