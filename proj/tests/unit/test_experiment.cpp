#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "bwc/experiment.hpp"
#include "bwc/trotter.hpp"
#include "support/oracle.hpp"

using namespace bwc;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_config() {
  return json::parse(R"({
    "model": {"type": "ising", "n_sites": 4, "J": 1.0, "g": 0.75, "h": 0.6},
    "t": 0.5,
    "reference": {"eps_thres": 1e-12},
    "circuit": {"layers": [3, 5], "init": "trotter2"},
    "optimizer": {"method": "riemannian", "alpha": 0.02, "max_iter": 15, "early_stop": false}
  })");
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bwc-exp-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// CSV text with the trailing wall_time column removed from every row.
std::string without_wall_time(const std::string& csv) {
  std::istringstream is(csv);
  std::string line, out;
  while (std::getline(is, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

void write_config(const fs::path& p, const json& j) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << j.dump(2);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BWC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesAndDefaults) {
  const ExperimentConfig c = parse_config(small_config());
  EXPECT_EQ(c.layers, (std::vector<int>{3, 5}));
  EXPECT_EQ(c.init, InitPolicy::trotter2);
  EXPECT_EQ(c.ref_order, 4);
  EXPECT_EQ(c.ref_n_reps, 20);
  EXPECT_EQ(c.ref_method, ReferenceMethod::automatic);
  EXPECT_EQ(c.optimizer.max_iter, 15);
  EXPECT_DOUBLE_EQ(c.optimizer.adam.beta1, 0.9);
  EXPECT_DOUBLE_EQ(c.optimizer.adam.beta2, 0.99);
  EXPECT_FALSE(c.optimizer.adam.bias_correction);
  ASSERT_TRUE(c.eps_thres);
  EXPECT_DOUBLE_EQ(*c.eps_thres, 1e-12);

  json single = small_config();
  single["circuit"]["layers"] = 7;
  EXPECT_EQ(parse_config(single).layers, std::vector<int>{7});
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto expect_error = [](const std::function<void(json&)>& edit) {
    json j = small_config();
    edit(j);
    EXPECT_THROW(parse_config(j), ConfigError) << j.dump();
  };
  expect_error([](json& j) { j["extra"] = 1; });
  expect_error([](json& j) { j["optimizer"]["learning_rate"] = 0.1; });
  expect_error([](json& j) { j["reference"]["tolerance"] = 1e-3; });
  expect_error([](json& j) { j["circuit"]["depth"] = 4; });
  expect_error([](json& j) { j["optimizer"]["alpha"] = "fast"; });
  expect_error([](json& j) { j["optimizer"]["method"] = "lbfgs"; });
  expect_error([](json& j) { j["circuit"]["init"] = "random"; });
  expect_error([](json& j) { j["reference"]["chi_max"] = 0; });
  expect_error([](json& j) { j.erase("t"); });
  expect_error([](json& j) { j.erase("model"); });
  expect_error([](json& j) { j["model"]["spin"] = 1; });
  expect_error([](json& j) { j["scaling"] = {{"dt", {0.25, 0.125}}}; });
  expect_error([](json& j) { j["scaling"] = {{"dt", {0.5, 0.25, 0.125, 0.3}}}; });
  expect_error([](json& j) { j["scaling"] = {{"dt", {0.5, 0.25, 0.125, 0.0625}}, {"families", {"trotter3"}}}; });
  EXPECT_NO_THROW(parse_config([] {
    json j = small_config();
    j["scaling"] = {{"dt", {0.5, 0.25, 0.125, 0.0625}}, {"families", {"trotter2", "optimized"}}};
    return j;
  }()));
}

TEST(Config, HashIsStableAndContentSensitive) {
  const ExperimentConfig a = parse_config(small_config());
  const std::string h = config_hash(a);
  EXPECT_EQ(h.size(), 12u);
  EXPECT_EQ(h, config_hash(parse_config(small_config())));
  json j = small_config();
  j["optimizer"]["alpha"] = 0.03;
  EXPECT_NE(h, config_hash(parse_config(j)));
  EXPECT_NE(h, config_hash(with_seed(a, 99)));
  EXPECT_EQ(with_seed(a, 99).seed, 99u);
}

TEST(Config, OutputDirectoryPrecedence) {
  json j = small_config();
  ExperimentConfig c = parse_config(j);
  ::unsetenv("BWC_OUTPUT_ROOT");
  EXPECT_EQ(resolve_output_dir(c, std::nullopt), fs::path("bwc-out"));
  ::setenv("BWC_OUTPUT_ROOT", "/tmp/from-env", 1);
  EXPECT_EQ(resolve_output_dir(c, std::nullopt), fs::path("/tmp/from-env"));
  j["output"] = "from-config";
  c = parse_config(j);
  EXPECT_EQ(resolve_output_dir(c, std::nullopt), fs::path("from-config"));
  EXPECT_EQ(resolve_output_dir(c, std::string("from-flag")), fs::path("from-flag"));
  ::unsetenv("BWC_OUTPUT_ROOT");
}

TEST(Config, DisorderInstancesFollowSeeds) {
  json j = small_config();
  j["model"] = {{"type", "ising_disordered"}, {"n_sites", 4}, {"J", 1.0}, {"g", 0.75}, {"h", 0.6}};
  j["seeds"] = {3, 4, 5};
  const auto hs = instances(parse_config(j));
  ASSERT_EQ(hs.size(), 3u);
  const auto& a = std::get<IsingDisorderedModel>(hs[0].model);
  const auto& b = std::get<IsingDisorderedModel>(hs[1].model);
  EXPECT_EQ(a.seed, 3u);
  EXPECT_NE(a.g, b.g);
  EXPECT_EQ(a.g, std::get<IsingDisorderedModel>(instances(parse_config(j))[0].model).g);
  json clean = small_config();
  clean["seeds"] = {1, 2};
  EXPECT_THROW(instances(parse_config(clean)), ConfigError);
}

TEST(Experiment, InitialCircuitPolicies) {
  const HamiltonianSpec h = ising_spec(4, 1.0, 0.75, 0.6);
  const Mpo ref = identity_mpo(4);
  const BrickwallCircuit c = initial_circuit(h, 0.5, 5, InitPolicy::trotter2, ref);
  EXPECT_LT((oracle::circuit_dense(c) - oracle::circuit_dense(trotter_circuit(h, 2, 2, 0.5))).norm(), 1e-12);
  EXPECT_EQ(initial_circuit(h, 0.5, 4, InitPolicy::trotter1, ref).n_layers(), 4);
  EXPECT_THROW(initial_circuit(h, 0.5, 4, InitPolicy::trotter2, ref), ConfigError);
  EXPECT_EQ(initial_circuit(h, 0.5, 6, InitPolicy::automatic, ref).n_layers(), 6);
}

TEST(Experiment, CircuitJsonRoundTrip) {
  std::mt19937_64 rng(61);
  const BrickwallCircuit c = oracle::random_circuit(5, 4, rng, 1);
  const BrickwallCircuit back = circuit_from_json(json::parse(circuit_to_json(c).dump()));
  ASSERT_EQ(back.n_layers(), 4);
  for (int l = 0; l < 4; ++l)
    for (std::size_t j = 0; j < c.layer(l).size(); ++j) {
      EXPECT_EQ(back.layer(l)[j].qubit, c.layer(l)[j].qubit);
      EXPECT_EQ(back.layer(l)[j].matrix, c.layer(l)[j].matrix);
    }
  json bad = circuit_to_json(c);
  bad["format"] = "circuit-v0";
  EXPECT_THROW(circuit_from_json(bad), ParameterError);
}

TEST(Experiment, SlopeFitRecoversPowerLaw) {
  const std::vector<double> dt{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> cost;
  for (double x : dt) cost.push_back(3.0 * std::pow(x, 4));
  const SlopeFit f = fit_slope("trotter2", dt, cost);
  EXPECT_NEAR(f.slope_cost, 4.0, 1e-12);
  EXPECT_NEAR(f.slope_sqrt_cost, 2.0, 1e-12);
  EXPECT_EQ(f.points_used, 4);
  cost[1] = 0.0;
  EXPECT_EQ(fit_slope("trotter2", dt, cost).points_used, 3);
  EXPECT_TRUE(std::isnan(fit_slope("x", {0.5, 0.25}, {0.0, 1.0}).slope_cost));
}

TEST(Experiment, RunIsReproducibleAndNamedByHash) {
  const ExperimentConfig c = parse_config(small_config());
  const std::string hash = config_hash(c);
  const fs::path a = fresh_dir("repro-a"), b = fresh_dir("repro-b");
  const ExperimentResult ra = run_experiment(c, {a, 1});
  const ExperimentResult rb = run_experiment(c, {b, 2});
  EXPECT_EQ(ra.summary_csv, a / ("summary-" + hash + ".csv"));
  ASSERT_EQ(ra.runs.size(), 2u);
  for (int L : {3, 5}) {
    EXPECT_TRUE(fs::exists(a / ("run-" + hash + "-L" + std::to_string(L) + ".json")));
    EXPECT_TRUE(fs::exists(a / ("circuit-" + hash + "-L" + std::to_string(L) + ".json")));
  }
  const std::string csv = read_file(ra.summary_csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "seed,L,init_cost,final_cost,improvement_ratio,iterations,wall_time");
  EXPECT_EQ(without_wall_time(csv), without_wall_time(read_file(rb.summary_csv)));
  for (const auto& r : ra.runs) {
    EXPECT_EQ(r.record.trajectory.size(), 16u);
    EXPECT_LT(r.record.final_cost(), r.record.initial_cost());
  }
  const json rec = json::parse(read_file(ra.runs[0].record_file));
  EXPECT_EQ(rec.at("format"), "runrecord-v1");
  EXPECT_EQ(rec.at("trajectory").size(), 16u);
  const BrickwallCircuit saved = circuit_from_json(json::parse(read_file(a / rec.at("circuit_file").get<std::string>())));
  EXPECT_EQ(saved.n_layers(), 3);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Experiment, DisorderBatchWritesOneRowPerSeed) {
  json j = small_config();
  j["model"] = {{"type", "ising_disordered"}, {"n_sites", 4}, {"J", 1.0}, {"g", 0.75}, {"h", 0.6}};
  j["seeds"] = {11, 12};
  j["circuit"]["layers"] = 3;
  j["optimizer"]["max_iter"] = 5;
  const ExperimentConfig c = parse_config(j);
  const fs::path dir = fresh_dir("disorder");
  const ExperimentResult r = run_experiment(c, {dir, 2});
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_EQ(r.runs[0].seed, 11u);
  EXPECT_EQ(r.runs[1].seed, 12u);
  EXPECT_NE(r.runs[0].record.initial_cost(), r.runs[1].record.initial_cost());
  const std::string hash = config_hash(c);
  EXPECT_TRUE(fs::exists(dir / ("run-" + hash + "-s11-L3.json")));
  EXPECT_TRUE(fs::exists(dir / ("run-" + hash + "-s12-L3.json")));
  const std::string csv = read_file(r.summary_csv);
  EXPECT_NE(csv.find("\n11,3,"), std::string::npos);
  EXPECT_NE(csv.find("\n12,3,"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Experiment, ScalingAndCompareWriteTheirFiles) {
  json j = small_config();
  j["scaling"] = {{"dt", {0.5, 0.25, 0.125, 0.0625}}, {"families", {"trotter1", "trotter2"}}};
  j["optimizer"]["max_iter"] = 4;
  j["circuit"]["layers"] = 3;
  const ExperimentConfig c = parse_config(j);
  const std::string hash = config_hash(c);
  const fs::path dir = fresh_dir("scaling");
  const ScalingResult s = scaling_study(c, {dir, 1});
  EXPECT_EQ(s.csv, dir / ("scaling-" + hash + ".csv"));
  EXPECT_TRUE(fs::exists(s.fit_json));
  ASSERT_EQ(s.fits.size(), 2u);
  EXPECT_NEAR(s.fits[0].slope_sqrt_cost, 1.0, 0.15);
  EXPECT_NEAR(s.fits[1].slope_sqrt_cost, 2.0, 0.2);
  const CompareResult cmp = compare_methods(c, {dir, 1});
  EXPECT_EQ(cmp.csv, dir / ("compare-" + hash + ".csv"));
  ASSERT_EQ(cmp.riemannian.size(), 1u);
  ASSERT_EQ(cmp.sweep.size(), 1u);
  EXPECT_LE(cmp.sweep[0].record.final_cost(), cmp.sweep[0].record.initial_cost());
  fs::remove_all(dir);
}

TEST(Experiment, ReferenceCacheIsReused) {
  const ExperimentConfig c = parse_config(small_config());
  const fs::path dir = fresh_dir("buildref");
  const auto first = build_references(c, {dir, 1});
  ASSERT_EQ(first.size(), 1u);
  EXPECT_TRUE(fs::exists(first[0].mpo_file));
  EXPECT_TRUE(fs::exists(first[0].budget_file));
  const std::string bytes = read_file(first[0].mpo_file);
  const auto second = build_references(c, {dir, 1});
  EXPECT_EQ(read_file(second[0].mpo_file), bytes);
  std::size_t cached = 0;
  for (const auto& e : fs::directory_iterator(dir / "cache")) cached += e.path().extension() == ".mpo";
  EXPECT_EQ(cached, 1u);
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = fresh_dir("cli");
  const fs::path good = dir / "good.json", bad = dir / "bad.json", big = dir / "big.json";
  write_config(good, small_config());
  json b = small_config();
  b["optimizer"]["momentum"] = 0.5;
  write_config(bad, b);
  json g = small_config();
  g["model"]["n_sites"] = 16;
  g["reference"]["method"] = "dense";
  write_config(big, g);
  const std::string out = " --out " + (dir / "out").string();

  EXPECT_EQ(run_cli("validate-config --config " + good.string()), 0);
  EXPECT_EQ(run_cli("validate-config --config " + bad.string()), 2);
  EXPECT_EQ(run_cli("validate-config --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("--config " + good.string()), 2);
  EXPECT_EQ(run_cli("optimize --config " + good.string() + " --threads 0"), 2);
  EXPECT_EQ(run_cli("optimize --config " + good.string() + " --dry-run" + out), 0);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_EQ(run_cli("build-ref --config " + big.string() + out), 3);
  EXPECT_EQ(run_cli("optimize --config " + good.string() + " --seed 7" + out), 0);
  const std::string hash = config_hash(with_seed(parse_config(small_config()), 7));
  EXPECT_TRUE(fs::exists(dir / "out" / ("summary-" + hash + ".csv")));
  fs::remove_all(dir);
}

TEST(Cli, ShippedConfigsValidate) {
  for (const auto& e : fs::directory_iterator(BWC_CONFIG_DIR))
    if (e.path().extension() == ".json") EXPECT_EQ(run_cli("validate-config --config " + e.path().string()), 0) << e.path();
}
