#include "bwc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "bwc/cost_gradient.hpp"
#include "bwc/hash.hpp"
#include "bwc/initialization.hpp"
#include "bwc/trotter.hpp"

namespace bwc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& block, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("'" + block + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + block);
}

template <class T>
T get(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

int chi_from_json(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return kUnboundedChi;
  const int chi = get<int>(j, key, 0);
  if (chi < 1) throw ConfigError("'" + key + "' must be at least 1");
  return chi;
}

InitPolicy init_from_string(const std::string& s) {
  if (s == "auto") return InitPolicy::automatic;
  if (s == "trotter1") return InitPolicy::trotter1;
  if (s == "trotter2") return InitPolicy::trotter2;
  if (s == "trotter4") return InitPolicy::trotter4;
  throw ConfigError("unknown init policy '" + s + "'");
}

int family_order(const std::string& f) {
  if (f == "trotter1") return 1;
  if (f == "trotter2" || f == "optimized") return 2;
  if (f == "trotter4") return 4;
  throw ConfigError("unknown scaling family '" + f + "'");
}

int steps_for_dt(double t, double dt) {
  const double n = t / dt;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, r))
    throw ConfigError(fmt::format("dt = {} does not divide t = {}", dt, t));
  return static_cast<int>(r);
}

void for_each_parallel(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::string run_tag(const std::string& hash, std::uint64_t seed, int layers, bool disordered) {
  return disordered ? fmt::format("{}-s{}-L{}", hash, seed, layers) : fmt::format("{}-L{}", hash, layers);
}

double heuristic_eps_thres(const ExperimentConfig& c, const HamiltonianSpec& h) {
  if (c.c_final) return *c.c_final / 10.0;
  int depth = c.layers.empty() ? 0 : *std::max_element(c.layers.begin(), c.layers.end());
  if (c.scaling)
    for (double dt : c.scaling->dt) depth = std::max(depth, trotter_layer_count(h, 2, steps_for_dt(c.t, dt)));
  const InitResult init = initialize_circuit(h, c.t, depth);
  const double c_final = init.score / 100.0;
  return std::max(c_final / 10.0, 1e-14);
}

RunOutcome optimize_one(const ExperimentConfig& c, const OptimizeOptions& opt, const HamiltonianSpec& h,
                        std::uint64_t seed, int L, const Mpo& ref, const fs::path& out, const std::string& tag) {
  BrickwallCircuit init = initial_circuit(h, c.t, L, c.init, ref);
  RunOutcome r{seed, L, optimize(std::move(init), ref, opt), {}};
  r.record.seed = seed;
  r.record.config = c.normalized;
  r.record.config["optimizer_effective"] = to_json(opt);
  r.record.config["layers_run"] = L;
  r.record.config["model_realized"] = to_json(h);
  const fs::path circuit_file = out / ("circuit-" + tag + ".json");
  write_json(circuit_file, circuit_to_json(r.record.circuit));
  r.record.circuit_file = circuit_file.filename().string();
  r.record_file = out / ("run-" + tag + ".json");
  write_json(r.record_file, r.record.to_json());
  spdlog::info("L = {} seed {}: C_init = {:.4e}, C_final = {:.4e} after {} iterations ({})", L, seed,
               r.record.initial_cost(), r.record.final_cost(), r.record.iterations, to_string(r.record.stop_reason));
  return r;
}

std::string csv_row(const RunOutcome& r) {
  const double init = r.record.initial_cost(), fin = r.record.final_cost();
  const double ratio = fin > 0.0 ? init / fin : std::numeric_limits<double>::infinity();
  return fmt::format("{},{},{:.12e},{:.12e},{:.12e},{},{:.3f}\n", r.seed, r.layers, init, fin, ratio,
                     r.record.iterations, r.record.wall_time);
}

constexpr const char* kSummaryHeader = "seed,L,init_cost,final_cost,improvement_ratio,iterations,wall_time\n";

bool is_disordered(const ExperimentConfig& c) { return c.model.value("type", "") == "ising_disordered"; }

std::vector<Mpo> references_for(const ExperimentConfig& c, const std::vector<HamiltonianSpec>& hs,
                                const fs::path& out, int threads) {
  std::vector<Mpo> refs(hs.size());
  for_each_parallel(hs.size(), threads, [&](std::size_t i) {
    refs[i] = build_reference_cached(reference_spec(c, hs[i]), out / "cache").mpo;
  });
  return refs;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  try {
    check_keys(j, "config", {"model", "t", "seed", "seeds", "reference", "circuit", "optimizer", "scaling", "output"});
    if (!j.contains("model")) throw ConfigError("missing 'model' block");
    if (!j.contains("t")) throw ConfigError("missing 't'");
    c.model = j.at("model");
    c.t = get<double>(j, "t", 0.0);
    if (!(c.t > 0.0) || !std::isfinite(c.t)) throw ConfigError("'t' must be positive");
    c.seed = get<std::uint64_t>(j, "seed", 0);
    c.seeds = get<std::vector<std::uint64_t>>(j, "seeds", {});
    c.output = get<std::string>(j, "output", "");

    const json ref = j.value("reference", json::object());
    check_keys(ref, "reference", {"order", "n_reps", "chi_max", "eps_thres", "c_final", "method"});
    c.ref_order = get<int>(ref, "order", 4);
    c.ref_n_reps = get<int>(ref, "n_reps", 20);
    c.ref_chi_max = chi_from_json(ref, "chi_max");
    if (ref.contains("eps_thres") && !ref.at("eps_thres").is_null()) c.eps_thres = get<double>(ref, "eps_thres", 0.0);
    if (ref.contains("c_final") && !ref.at("c_final").is_null()) c.c_final = get<double>(ref, "c_final", 0.0);
    if (c.eps_thres && !(*c.eps_thres > 0.0)) throw ConfigError("'eps_thres' must be positive");
    if (c.c_final && !(*c.c_final > 0.0)) throw ConfigError("'c_final' must be positive");
    c.ref_method = reference_method_from_string(get<std::string>(ref, "method", "auto"));

    const json circ = j.value("circuit", json::object());
    check_keys(circ, "circuit", {"layers", "init"});
    if (circ.contains("layers")) {
      if (circ.at("layers").is_array()) c.layers = get<std::vector<int>>(circ, "layers", {});
      else c.layers = {get<int>(circ, "layers", 0)};
    }
    for (int L : c.layers)
      if (L < 1) throw ConfigError("layer counts must be positive");
    c.init = init_from_string(get<std::string>(circ, "init", "auto"));

    const json opt = j.value("optimizer", json::object());
    check_keys(opt, "optimizer", {"method", "alpha", "beta1", "beta2", "max_iter", "early_stop", "early_stop_tol",
                                  "bias_correction", "target_cost", "chi_max", "lr_decay", "log_every"});
    OptimizeOptions& o = c.optimizer;
    o.method = optimizer_method_from_string(get<std::string>(opt, "method", "riemannian"));
    o.adam.alpha = get<double>(opt, "alpha", 1e-2);
    o.adam.beta1 = get<double>(opt, "beta1", 0.9);
    o.adam.beta2 = get<double>(opt, "beta2", 0.99);
    o.adam.bias_correction = get<bool>(opt, "bias_correction", false);
    o.adam.lr_decay = get<double>(opt, "lr_decay", 0.0);
    o.max_iter = get<int>(opt, "max_iter", 1000);
    o.early_stopping = get<bool>(opt, "early_stop", true);
    o.early_stop_tol = get<double>(opt, "early_stop_tol", 1e-5);
    o.log_every = get<int>(opt, "log_every", 0);
    if (opt.contains("target_cost") && !opt.at("target_cost").is_null()) o.target_cost = get<double>(opt, "target_cost", 0.0);
    o.chi_max = chi_from_json(opt, "chi_max");
    if (!(o.adam.alpha > 0.0)) throw ConfigError("'alpha' must be positive");
    if (!(o.adam.beta1 >= 0.0 && o.adam.beta1 < 1.0) || !(o.adam.beta2 >= 0.0 && o.adam.beta2 < 1.0))
      throw ConfigError("'beta1' and 'beta2' must lie in [0, 1)");
    if (o.max_iter < 0) throw ConfigError("'max_iter' must be non-negative");
    if (o.adam.lr_decay < 0.0) throw ConfigError("'lr_decay' must be non-negative");

    if (j.contains("scaling")) {
      const json& s = j.at("scaling");
      check_keys(s, "scaling", {"dt", "families"});
      ScalingBlock b;
      b.dt = get<std::vector<double>>(s, "dt", {});
      b.families = get<std::vector<std::string>>(s, "families", b.families);
      if (b.dt.size() < 4) throw ConfigError("scaling needs at least 4 dt values");
      for (double dt : b.dt) steps_for_dt(c.t, dt);
      for (const auto& f : b.families) family_order(f);
      c.scaling = b;
    }

    // Realize every instance once so model errors surface before any computation.
    for (const auto& h : instances(c)) {
      validate(reference_spec(c, h));
      if (c.ref_method == ReferenceMethod::dense && h.n_sites > kMaxDenseQubits)
        throw ResourceGuardError("dense reference requested for " + std::to_string(h.n_sites) + " qubits");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const ResourceGuardError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.normalized = j;
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

ExperimentConfig with_seed(const ExperimentConfig& c, std::uint64_t seed) {
  json j = c.normalized;
  j["seed"] = seed;
  return parse_config(j);
}

std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a(c.normalized.dump())).substr(0, 12); }

std::vector<HamiltonianSpec> instances(const ExperimentConfig& c) {
  if (c.model.value("type", "") != "ising_disordered" || c.model.contains("J_list")) {
    if (!c.seeds.empty() && c.model.value("type", "") != "ising_disordered")
      throw ConfigError("'seeds' only applies to disordered models");
    return {spec_from_json(c.model)};
  }
  std::vector<std::uint64_t> seeds = c.seeds;
  if (seeds.empty()) seeds = {c.model.contains("seed") ? c.model.at("seed").get<std::uint64_t>() : c.seed};
  std::vector<HamiltonianSpec> out;
  for (auto s : seeds) {
    json m = c.model;
    m["seed"] = s;
    out.push_back(spec_from_json(m));
  }
  return out;
}

ReferenceSpec reference_spec(const ExperimentConfig& c, const HamiltonianSpec& h) {
  ReferenceSpec r;
  r.hamiltonian = h;
  r.t = c.t;
  r.order = c.ref_order;
  r.n_reps = c.ref_n_reps;
  r.chi_max = c.ref_chi_max;
  r.method = c.ref_method;
  r.eps_thres = c.eps_thres ? *c.eps_thres : (c.c_final ? *c.c_final / 10.0 : 1e-9);
  return r;
}

fs::path resolve_output_dir(const ExperimentConfig& c, const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (!c.output.empty()) return c.output;
  if (const char* env = std::getenv("BWC_OUTPUT_ROOT"); env && *env) return env;
  return "bwc-out";
}

BrickwallCircuit initial_circuit(const HamiltonianSpec& spec, double t, int L, InitPolicy policy, const Mpo& u_ref) {
  if (policy == InitPolicy::automatic) {
    InitScorer scorer = [&](const InitCandidate& cand) {
      return cost_only(build_candidate(spec, cand), u_ref).cost_hs;
    };
    InitResult r = initialize_circuit(spec, t, L, scorer);
    spdlog::debug("initialized L = {} by rule '{}' with score {:.3e}", L, r.rule, r.score);
    return std::move(r.circuit);
  }
  const int order = policy == InitPolicy::trotter1 ? 1 : policy == InitPolicy::trotter2 ? 2 : 4;
  for (int n = 1;; ++n) {
    const int count = trotter_layer_count(spec, order, n);
    if (count == L) return trotter_circuit(spec, order, n, t);
    if (count > L)
      throw ConfigError(fmt::format("no order-{} Trotter circuit has exactly {} layers", order, L));
  }
}

ExperimentResult run_experiment(const ExperimentConfig& c0, const RunOptions& opts) {
  if (c0.layers.empty()) throw ConfigError("'circuit.layers' is required for optimize");
  ExperimentConfig c = c0;
  const std::vector<HamiltonianSpec> hs = instances(c);
  if (!c.eps_thres) c.eps_thres = heuristic_eps_thres(c, hs.front());
  fs::create_directories(opts.out_dir);
  const std::string hash = config_hash(c0);
  const std::vector<Mpo> refs = references_for(c, hs, opts.out_dir, opts.threads);
  const bool disordered = is_disordered(c);

  struct Task {
    std::size_t instance;
    int layers;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (int L : c.layers) tasks.push_back({i, L});
  std::vector<RunOutcome> runs(tasks.size());
  for_each_parallel(tasks.size(), opts.threads, [&](std::size_t k) {
    const Task& t = tasks[k];
    const std::uint64_t seed = disordered ? std::get<IsingDisorderedModel>(hs[t.instance].model).seed : c.seed;
    runs[k] = optimize_one(c, c.optimizer, hs[t.instance], seed, t.layers, refs[t.instance], opts.out_dir,
                           run_tag(hash, seed, t.layers, disordered));
  });

  ExperimentResult out;
  out.summary_csv = opts.out_dir / ("summary-" + hash + ".csv");
  std::ofstream csv(out.summary_csv);
  csv << kSummaryHeader;
  for (const auto& r : runs) csv << csv_row(r);
  out.runs = std::move(runs);
  return out;
}

SlopeFit fit_slope(const std::string& family, const std::vector<double>& dt, const std::vector<double>& cost) {
  if (dt.size() != cost.size()) throw ParameterError("dt and cost lengths differ");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (!(cost[i] > 0.0) || !(dt[i] > 0.0)) {
      spdlog::warn("{}: dropping non-positive point at dt = {}", family, dt[i]);
      continue;
    }
    x.push_back(std::log(dt[i]));
    y.push_back(std::log(cost[i]));
  }
  SlopeFit f;
  f.family = family;
  f.points_used = static_cast<int>(x.size());
  if (x.size() < 2) {
    spdlog::warn("{}: fewer than two usable points, slope undefined", family);
    f.slope_cost = f.slope_sqrt_cost = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  f.slope_cost = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - f.slope_cost * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + f.slope_cost * x[i]);
    ss += r * r;
  }
  f.residual_cost = std::sqrt(ss / n);
  // log sqrt(C) = log(C) / 2, so the fit of sqrt(C) is the same line halved.
  f.slope_sqrt_cost = 0.5 * f.slope_cost;
  f.residual_sqrt_cost = 0.5 * f.residual_cost;
  return f;
}

ScalingResult scaling_study(const ExperimentConfig& c0, const RunOptions& opts) {
  if (!c0.scaling) throw ConfigError("'scaling' block is required for the scaling study");
  ExperimentConfig c = c0;
  const std::vector<HamiltonianSpec> hs = instances(c);
  if (hs.size() != 1) throw ConfigError("the scaling study runs on a single model instance");
  const HamiltonianSpec& h = hs.front();
  if (!c.eps_thres) c.eps_thres = heuristic_eps_thres(c, h);
  fs::create_directories(opts.out_dir);
  const std::string hash = config_hash(c0);
  const Mpo ref = references_for(c, hs, opts.out_dir, 1).front();

  struct Task {
    std::string family;
    double dt;
  };
  std::vector<Task> tasks;
  for (const auto& f : c.scaling->families)
    for (double dt : c.scaling->dt) tasks.push_back({f, dt});
  std::vector<ScalingPoint> points(tasks.size());
  for_each_parallel(tasks.size(), opts.threads, [&](std::size_t k) {
    const Task& t = tasks[k];
    const int n = steps_for_dt(c.t, t.dt);
    const BrickwallCircuit circ = trotter_circuit(h, family_order(t.family), n, c.t);
    ScalingPoint p{t.family, t.dt, n, circ.n_layers(), 0.0};
    if (t.family == "optimized") {
      RunOutcome r = optimize_one(c, c.optimizer, h, c.seed, circ.n_layers(), ref, opts.out_dir,
                                  fmt::format("{}-scaling-n{}", hash, n));
      p.cost_hs = r.record.final_cost();
    } else {
      p.cost_hs = cost_only(circ, ref).cost_hs;
    }
    points[k] = p;
  });

  ScalingResult out;
  out.csv = opts.out_dir / ("scaling-" + hash + ".csv");
  std::ofstream csv(out.csv);
  csv << "family,dt,n_steps,L,cost_hs,sqrt_cost_hs\n";
  for (const auto& p : points)
    csv << fmt::format("{},{:.12e},{},{},{:.12e},{:.12e}\n", p.family, p.dt, p.n_steps, p.layers, p.cost_hs,
                       std::sqrt(std::max(0.0, p.cost_hs)));
  json fits = json::array();
  for (const auto& f : c.scaling->families) {
    std::vector<double> dts, costs;
    for (const auto& p : points)
      if (p.family == f) {
        dts.push_back(p.dt);
        costs.push_back(p.cost_hs);
      }
    SlopeFit fit = fit_slope(f, dts, costs);
    fits.push_back({{"family", f},
                    {"slope_sqrt_cost", fit.slope_sqrt_cost},
                    {"slope_cost", fit.slope_cost},
                    {"residual_sqrt_cost", fit.residual_sqrt_cost},
                    {"residual_cost", fit.residual_cost},
                    {"points_used", fit.points_used}});
    out.fits.push_back(fit);
  }
  out.fit_json = opts.out_dir / ("scaling-fit-" + hash + ".json");
  write_json(out.fit_json, {{"format", "scaling-v1"}, {"config_hash", hash}, {"fits", fits}});
  out.points = std::move(points);
  return out;
}

CompareResult compare_methods(const ExperimentConfig& c0, const RunOptions& opts) {
  if (c0.layers.empty()) throw ConfigError("'circuit.layers' is required for compare-methods");
  ExperimentConfig c = c0;
  const std::vector<HamiltonianSpec> hs = instances(c);
  if (!c.eps_thres) c.eps_thres = heuristic_eps_thres(c, hs.front());
  fs::create_directories(opts.out_dir);
  const std::string hash = config_hash(c0);
  const std::vector<Mpo> refs = references_for(c, hs, opts.out_dir, opts.threads);
  const bool disordered = is_disordered(c);

  struct Task {
    std::size_t instance;
    int layers;
    OptimizerMethod method;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (int L : c.layers)
      for (auto m : {OptimizerMethod::riemannian, OptimizerMethod::sweep}) tasks.push_back({i, L, m});
  std::vector<RunOutcome> runs(tasks.size());
  for_each_parallel(tasks.size(), opts.threads, [&](std::size_t k) {
    const Task& t = tasks[k];
    OptimizeOptions opt = c.optimizer;
    opt.method = t.method;
    const std::uint64_t seed = disordered ? std::get<IsingDisorderedModel>(hs[t.instance].model).seed : c.seed;
    runs[k] = optimize_one(c, opt, hs[t.instance], seed, t.layers, refs[t.instance], opts.out_dir,
                           run_tag(hash, seed, t.layers, disordered) + "-" + to_string(t.method));
  });

  CompareResult out;
  out.csv = opts.out_dir / ("compare-" + hash + ".csv");
  std::ofstream csv(out.csv);
  csv << "method," << kSummaryHeader;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    csv << to_string(tasks[k].method) << ',' << csv_row(runs[k]);
    (tasks[k].method == OptimizerMethod::riemannian ? out.riemannian : out.sweep).push_back(std::move(runs[k]));
  }
  return out;
}

std::vector<BuildRefOutcome> build_references(const ExperimentConfig& c0, const RunOptions& opts) {
  ExperimentConfig c = c0;
  const std::vector<HamiltonianSpec> hs = instances(c);
  if (!c.eps_thres && (c.c_final || !c.layers.empty() || c.scaling)) c.eps_thres = heuristic_eps_thres(c, hs.front());
  fs::create_directories(opts.out_dir);
  const std::string hash = config_hash(c0);
  std::vector<BuildRefOutcome> out(hs.size());
  for_each_parallel(hs.size(), opts.threads, [&](std::size_t i) {
    const ReferenceSpec spec = reference_spec(c, hs[i]);
    BuildRefOutcome& o = out[i];
    o.reference = build_reference_cached(spec, opts.out_dir / "cache");
    const std::string tag = hs.size() > 1 ? fmt::format("{}-i{}", hash, i) : hash;
    o.mpo_file = opts.out_dir / ("reference-" + tag + ".mpo");
    o.budget_file = opts.out_dir / ("reference-" + tag + ".json");
    save_mpo(o.mpo_file, o.reference.mpo);
    write_json(o.budget_file, {{"format", "reference-v1"},
                               {"config_hash", hash},
                               {"spec", to_json(spec)},
                               {"budget", o.reference.budget.to_json()},
                               {"achieved_chi", o.reference.achieved_chi},
                               {"method_used", to_string(o.reference.method_used)}});
  });
  return out;
}

json circuit_to_json(const BrickwallCircuit& c) {
  json layers = json::array();
  for (int l = 0; l < c.n_layers(); ++l) {
    json layer = json::array();
    for (const auto& g : c.layer(l)) {
      json re = json::array(), im = json::array();
      for (int r = 0; r < 4; ++r)
        for (int col = 0; col < 4; ++col) {
          re.push_back(g.matrix(r, col).real());
          im.push_back(g.matrix(r, col).imag());
        }
      layer.push_back({{"qubit", g.qubit}, {"re", re}, {"im", im}});
    }
    layers.push_back(layer);
  }
  return {{"format", "circuit-v1"}, {"n_qubits", c.n_qubits()}, {"layers", layers}};
}

BrickwallCircuit circuit_from_json(const json& j) {
  if (j.at("format").get<std::string>() != "circuit-v1") throw ParameterError("unsupported circuit format");
  BrickwallCircuit c(j.at("n_qubits").get<int>());
  for (const auto& layer : j.at("layers")) {
    Layer out;
    for (const auto& g : layer) {
      const auto re = g.at("re").get<std::vector<double>>();
      const auto im = g.at("im").get<std::vector<double>>();
      if (re.size() != 16 || im.size() != 16) throw DimensionError("gate entries must have 16 values");
      Mat4 m;
      for (int k = 0; k < 16; ++k) m(k / 4, k % 4) = cplx(re[static_cast<std::size_t>(k)], im[static_cast<std::size_t>(k)]);
      out.push_back({m, g.at("qubit").get<int>()});
    }
    c.add_layer(std::move(out));
  }
  return c;
}

}  // namespace bwc
