// assort: generate instances, solve, validate and benchmark.
//
// Exit codes: 0 solved, 1 stopped by a time limit with an incumbent (or
// an invalid solution for `validate`), 2 usage or input error, 3 backend
// failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "assort/algorithms.hpp"
#include "assort/error.hpp"
#include "assort/genbench.hpp"
#include "assort/highs_backend.hpp"
#include "assort/model.hpp"
#include "assort/oracle.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitLimit = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;

struct SolveArgs {
  std::string instance;
  std::string method = "cp";
  std::string master = "li";
  std::string cuts = "oa";
  int segments = 0;
  double epsilon = 1e-6;
  double time_limit = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  bool normalize_rho = false;
  std::string dump_model;
  std::string backend;
  std::string linearization = "mccormick";
  std::string bounds = "auto";
};

struct SetArgs {
  std::vector<std::string> families;
  std::vector<std::string> paths;
  std::uint64_t seed = 1;
  int n = 0;
  int m = 0;
  std::vector<double> capacities;
  int per_cell = 0;
  bool normalize_rho = false;
};

std::string default_backend() {
  const char* env = std::getenv("ASSORT_BACKEND");
  return env && *env ? env : "highs";
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

assort::BoundMode parse_bound_mode(const std::string& s) {
  if (s == "auto") return assort::BoundMode::Auto;
  if (s == "exact") return assort::BoundMode::Exact;
  if (s == "relaxed") return assort::BoundMode::Relaxed;
  throw assort::InputError("unknown bound mode '" + s + "'");
}

assort::Linearization parse_linearization(const std::string& s) {
  if (s == "mccormick") return assort::Linearization::McCormick;
  if (s == "bigm") return assort::Linearization::BigM;
  throw assort::InputError("unknown linearization '" + s + "'");
}

assort::SolveConfig make_config(const SolveArgs& a) {
  assort::SolveConfig cfg;
  cfg.method = assort::parse_method(a.method);
  cfg.master = assort::parse_master(a.master);
  cfg.cuts = assort::parse_cuts(a.cuts);
  cfg.segments = a.segments;
  cfg.epsilon = a.epsilon;
  if (a.time_limit > 0) cfg.time_limit = a.time_limit;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.linearization = parse_linearization(a.linearization);
  cfg.bound_mode = parse_bound_mode(a.bounds);
  if (!a.dump_model.empty()) cfg.dump_model = a.dump_model;
  return cfg;
}

json result_json(const assort::ExactResult& res, const std::string& method) {
  json doc;
  doc["status"] = assort::to_string(res.status);
  doc["method"] = method;
  doc["x"] = res.x;
  doc["objective"] = res.objective;
  doc["min_objective"] = res.min_objective;
  doc["bound"] = res.bound;
  doc["gap"] = res.gap;
  doc["iterations"] = res.iterations;
  doc["nodes"] = res.nodes;
  doc["cuts_added"] = res.cuts_added;
  doc["time_s"] = res.wall_time;
  if (!res.master_used.empty()) doc["master"] = res.master_used;
  if (!res.note.empty()) doc["note"] = res.note;
  return doc;
}

void print_result(const assort::ExactResult& res) {
  std::cout << "status=" << assort::to_string(res.status) << " F=" << fmt(res.objective)
            << " bound=" << fmt(res.bound) << " gap=" << fmt(res.gap) << " time=" << fmt(res.wall_time) << "s\n";
  if (!res.note.empty()) std::cerr << "note: " << res.note << "\n";
}

int exit_code(assort::SolveStatus s) {
  switch (s) {
    case assort::SolveStatus::Optimal:
    case assort::SolveStatus::Heuristic: return kExitSolved;
    case assort::SolveStatus::FeasibleLimit: return kExitLimit;
    default: return kExitBackend;
  }
}

void write_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw assort::InputError("cannot write " + path);
  out << doc.dump(2) << "\n";
}

int finish(const assort::ExactResult& res, const std::string& method, const std::string& out) {
  print_result(res);
  if (!out.empty()) write_json(result_json(res, method), out);
  return exit_code(res.status);
}

int run_solve(const SolveArgs& a) {
  const auto inst = assort::load_instance(a.instance, {a.normalize_rho});
  const auto cfg = make_config(a);
  const auto backend = assort::make_backend(a.backend.empty() ? default_backend() : a.backend, a.threads);
  return finish(assort::solve(inst, cfg, *backend), a.method, a.out);
}

// Instance sets for benchmark and sweep-l: generated families or files.
std::vector<assort::GeneratedInstance> collect(const SetArgs& a) {
  std::vector<assort::GeneratedInstance> set;
  for (const auto& name : a.families) {
    auto spec = assort::family_spec(name);
    if (a.n > 0 || a.m > 0) spec = assort::resize(spec, a.n > 0 ? a.n : spec.n, a.m > 0 ? a.m : spec.m);
    if (!a.capacities.empty()) {
      if (spec.scheme == assort::ConstraintScheme::Subsets) throw assort::InputError("--capacities does not apply to subset families");
      spec.capacities = a.capacities;
    }
    if (a.per_cell > 0) spec.instances_per_cell = a.per_cell;
    auto part = assort::generate_family(spec, a.seed);
    set.insert(set.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  auto add_file = [&](const fs::path& p) {
    set.push_back({p.stem().string(), p.parent_path().filename().string(),
                   assort::load_instance(p, {a.normalize_rho})});
  };
  for (const auto& path : a.paths) {
    if (fs::is_directory(path)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(path))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) add_file(f);
    } else {
      add_file(path);
    }
  }
  return set;
}

// "method[:master[:cuts[:L]]]", e.g. "cp:li:oa+sc:20" or "milp".
assort::SolveConfig parse_config(const std::string& text, double epsilon) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty() || parts.size() > 4) throw assort::InputError("bad config '" + text + "'");
  assort::SolveConfig cfg;
  cfg.method = assort::parse_method(parts[0]);
  if (parts.size() > 1) cfg.master = assort::parse_master(parts[1]);
  if (parts.size() > 2) cfg.cuts = assort::parse_cuts(parts[2]);
  if (parts.size() > 3) cfg.segments = std::stoi(parts[3]);
  cfg.epsilon = epsilon;
  return cfg;
}

void write_results(const std::vector<assort::BenchmarkRecord>& rows, const std::string& out,
                   const std::string& summary) {
  if (out.empty()) {
    assort::write_records_csv(std::cout, rows);
  } else {
    std::ofstream f(out);
    if (!f) throw assort::InputError("cannot write " + out);
    assort::write_records_csv(f, rows);
  }
  const auto cells = assort::summarize(rows);
  if (!summary.empty()) {
    std::ofstream f(summary);
    if (!f) throw assort::InputError("cannot write " + summary);
    assort::write_summary_csv(f, cells);
  } else if (!out.empty()) {
    assort::write_summary_csv(std::cout, cells);
  }
}

int run_validate(const std::string& instance_path, const std::string& solution_path, bool normalize_rho,
                 double tolerance) {
  const auto inst = assort::load_instance(instance_path, {normalize_rho});
  std::ifstream in(solution_path);
  if (!in) throw assort::InputError("cannot read " + solution_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw assort::InputError(std::string("malformed solution file: ") + e.what());
  }
  if (!doc.contains("x") || !doc["x"].is_array()) throw assort::InputError("solution file has no array 'x'");
  std::vector<std::string> problems;
  assort::Assortment x;
  for (const auto& e : doc["x"]) {
    if (!e.is_number_integer() || (e.get<long>() != 0 && e.get<long>() != 1)) {
      problems.push_back("x entries must be 0 or 1");
      break;
    }
    x.push_back(static_cast<std::uint8_t>(e.get<int>()));
  }
  if (problems.empty() && static_cast<int>(x.size()) != inst.products())
    problems.push_back("x has " + std::to_string(x.size()) + " entries, expected " + std::to_string(inst.products()));
  double f = 0.0;
  if (problems.empty()) {
    if (!assort::is_feasible(inst, x)) problems.push_back("capacity constraint violated");
    f = assort::eval_revenue(inst, x);
    if (doc.contains("objective")) {
      const double claimed = doc["objective"].get<double>();
      if (std::abs(claimed - f) > tolerance * std::max(1.0, std::abs(f)))
        problems.push_back("claimed objective " + fmt(claimed) + " differs from F(x) = " + fmt(f));
    }
  }
  if (problems.empty()) {
    std::cout << "valid F=" << fmt(f) << "\n";
    return kExitSolved;
  }
  std::cout << "invalid:";
  for (const auto& p : problems) std::cout << " " << p << ";";
  std::cout << "\n";
  return kExitLimit;
}

void add_solve_flags(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("--method", a.method, "cp | bc | milp | greedy | brute")->capture_default_str();
  cmd->add_option("--master", a.master, "li | bi")->capture_default_str();
  cmd->add_option("--cuts", a.cuts, "oa | oa+sc")->capture_default_str();
  cmd->add_option("--segments", a.segments, "customer groups L (0 = per class)")->capture_default_str();
  cmd->add_option("--epsilon", a.epsilon, "relative optimality gap")->capture_default_str();
  cmd->add_option("--time-limit", a.time_limit, "seconds (0 = none)");
  cmd->add_option("--seed", a.seed)->capture_default_str();
  cmd->add_option("--threads", a.threads)->capture_default_str();
  cmd->add_option("--out", a.out, "write the result as JSON");
  cmd->add_flag("--normalize-rho", a.normalize_rho, "rescale class weights to sum to one");
  cmd->add_option("--dump-model", a.dump_model, "write each master in LP format (prefix)");
  cmd->add_option("--backend", a.backend, "highs | enumerate (default $ASSORT_BACKEND or highs)");
  cmd->add_option("--linearization", a.linearization, "mccormick | bigm (milp)")->capture_default_str();
  cmd->add_option("--bounds", a.bounds, "auto | exact | relaxed")->capture_default_str();
}

void add_set_flags(CLI::App* cmd, SetArgs& a) {
  cmd->add_option("--family", a.families, "family name (repeatable)");
  cmd->add_option("--instances", a.paths, "instance files or directories");
  cmd->add_option("--seed", a.seed, "base seed for generated families")->capture_default_str();
  cmd->add_option("--n", a.n, "override the class count");
  cmd->add_option("--m", a.m, "override the product count");
  cmd->add_option("--capacities", a.capacities, "override C (or alpha) values");
  cmd->add_option("--per-cell", a.per_cell, "instances per parameter cell");
  cmd->add_flag("--normalize-rho", a.normalize_rho);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacitated MMNL assortment optimisation"};
  // generate
  auto* gen = app.add_subcommand("generate", "write instances of a family");
  SetArgs gen_set;
  std::string gen_out = "instances";
  gen->add_option("--family", gen_set.families, "family name (repeatable)")->required();
  gen->add_option("--seed", gen_set.seed)->capture_default_str();
  gen->add_option("--n", gen_set.n);
  gen->add_option("--m", gen_set.m);
  gen->add_option("--capacities", gen_set.capacities);
  gen->add_option("--per-cell", gen_set.per_cell);
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();
  bool list_families = false;
  app.add_flag("--list-families", list_families, "print the family names and exit");

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance");
  SolveArgs solve_args;
  solve->add_option("instance", solve_args.instance)->required();
  add_solve_flags(solve, solve_args);

  // greedy
  auto* greedy = app.add_subcommand("greedy", "nested greedy heuristic");
  std::string greedy_instance, greedy_out;
  int greedy_capacity = -1;
  bool greedy_norm = false;
  greedy->add_option("instance", greedy_instance)->required();
  greedy->add_option("--capacity", greedy_capacity, "restrict to |S| <= C");
  greedy->add_option("--out", greedy_out);
  greedy->add_flag("--normalize-rho", greedy_norm);

  // brute
  auto* brute = app.add_subcommand("brute", "exhaustive enumeration (m <= 25)");
  std::string brute_instance, brute_out;
  int brute_threads = 0;
  bool brute_norm = false;
  brute->add_option("instance", brute_instance)->required();
  brute->add_option("--threads", brute_threads);
  brute->add_option("--out", brute_out);
  brute->add_flag("--normalize-rho", brute_norm);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "run configurations over instance sets");
  SetArgs bench_set;
  std::vector<std::string> bench_configs = {"cp:li:oa", "bc:li:oa"};
  double bench_limit = 60.0, bench_eps = 1e-6;
  int bench_workers = 1;
  std::string bench_out, bench_summary, bench_backend;
  add_set_flags(bench, bench_set);
  bench->add_option("--config", bench_configs, "method[:master[:cuts[:L]]] (repeatable)")->capture_default_str();
  bench->add_option("--time-limit", bench_limit)->capture_default_str();
  bench->add_option("--epsilon", bench_eps)->capture_default_str();
  bench->add_option("--workers", bench_workers)->capture_default_str();
  bench->add_option("--out", bench_out, "results CSV (default stdout)");
  bench->add_option("--summary", bench_summary, "per-cell summary CSV");
  bench->add_option("--backend", bench_backend);

  // sweep-l
  auto* sweep = app.add_subcommand("sweep-l", "CP and B&C over customer-group counts");
  SetArgs sweep_set;
  std::vector<int> sweep_l = assort::kDefaultSegmentSweep;
  std::string sweep_master = "li", sweep_cuts = "oa", sweep_out, sweep_summary, sweep_backend;
  double sweep_limit = 60.0, sweep_eps = 1e-6;
  int sweep_workers = 1;
  add_set_flags(sweep, sweep_set);
  sweep->add_option("--l-values", sweep_l, "group counts")->capture_default_str();
  sweep->add_option("--master", sweep_master)->capture_default_str();
  sweep->add_option("--cuts", sweep_cuts)->capture_default_str();
  sweep->add_option("--time-limit", sweep_limit)->capture_default_str();
  sweep->add_option("--epsilon", sweep_eps)->capture_default_str();
  sweep->add_option("--workers", sweep_workers)->capture_default_str();
  sweep->add_option("--out", sweep_out);
  sweep->add_option("--summary", sweep_summary);
  sweep->add_option("--backend", sweep_backend);

  // validate
  auto* validate = app.add_subcommand("validate", "check a solution file against an instance");
  std::string val_instance, val_solution;
  double val_tol = 1e-6;
  bool val_norm = false;
  validate->add_option("instance", val_instance)->required();
  validate->add_option("solution", val_solution)->required();
  validate->add_option("--tolerance", val_tol, "relative tolerance on the claimed objective")->capture_default_str();
  validate->add_flag("--normalize-rho", val_norm);

  // ratio
  auto* ratio = app.add_subcommand("ratio", "greedy versus optimum on random cardinality instances");
  int ratio_count = 50, ratio_n = 10, ratio_m = 12, ratio_c = 4;
  std::uint64_t ratio_seed = 1;
  std::string ratio_out;
  ratio->add_option("--count", ratio_count)->capture_default_str();
  ratio->add_option("--n", ratio_n)->capture_default_str();
  ratio->add_option("--m", ratio_m)->capture_default_str();
  ratio->add_option("--capacity", ratio_c)->capture_default_str();
  ratio->add_option("--seed", ratio_seed)->capture_default_str();
  ratio->add_option("--out", ratio_out);

  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSolved : kExitUsage;
  }

  try {
    if (list_families) {
      for (const auto& f : assort::family_names()) std::cout << f << "\n";
      return kExitSolved;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitUsage;
    }
    if (*gen) {
      SetArgs a = gen_set;
      for (const auto& p : assort::save_instances(collect(a), gen_out)) std::cout << p.string() << "\n";
      return kExitSolved;
    }
    if (*solve) return run_solve(solve_args);
    if (*greedy) {
      const auto inst = assort::load_instance(greedy_instance, {greedy_norm});
      assort::SolveConfig cfg;
      cfg.method = assort::Method::Greedy;
      assort::ExactResult res;
      if (greedy_capacity >= 0) {
        const auto g = assort::greedy_family(inst, greedy_capacity);
        res.x = g.x;
        res.status = assort::SolveStatus::Heuristic;
        res.objective = g.objective;
        res.min_objective = assort::eval_min_objective(inst, g.x);
        res.bound = g.ratio && *g.ratio > 0 ? g.objective / *g.ratio : assort::kInf;
        res.gap = g.objective != 0 ? (res.bound - g.objective) / std::abs(g.objective) : 0.0;
      } else {
        res = assort::greedy_solve(inst, cfg);
      }
      return finish(res, "greedy", greedy_out);
    }
    if (*brute) {
      const auto inst = assort::load_instance(brute_instance, {brute_norm});
      return finish(assort::brute_force(inst, brute_threads), "brute", brute_out);
    }
    if (*bench) {
      std::vector<assort::SolveConfig> configs;
      for (const auto& c : bench_configs) configs.push_back(parse_config(c, bench_eps));
      const auto rows = assort::run_benchmark(collect(bench_set), configs, bench_limit,
                                              bench_backend.empty() ? default_backend() : bench_backend,
                                              bench_workers);
      write_results(rows, bench_out, bench_summary);
      return kExitSolved;
    }
    if (*sweep) {
      assort::SolveConfig base;
      base.master = assort::parse_master(sweep_master);
      base.cuts = assort::parse_cuts(sweep_cuts);
      base.epsilon = sweep_eps;
      const auto rows = assort::sweep_segments(collect(sweep_set), sweep_l, base, sweep_limit,
                                               sweep_backend.empty() ? default_backend() : sweep_backend,
                                               sweep_workers);
      write_results(rows, sweep_out, sweep_summary);
      return kExitSolved;
    }
    if (*validate) return run_validate(val_instance, val_solution, val_norm, val_tol);
    if (*ratio) {
      const auto rows = assort::ratio_experiment(
          assort::ratio_instances(ratio_count, ratio_n, ratio_m, ratio_c, ratio_seed));
      if (ratio_out.empty()) {
        assort::write_ratio_csv(std::cout, rows);
      } else {
        std::ofstream f(ratio_out);
        if (!f) throw assort::InputError("cannot write " + ratio_out);
        assort::write_ratio_csv(f, rows);
      }
      return kExitSolved;
    }
  } catch (const assort::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const assort::UnsupportedError& e) {
    std::cerr << "error (" << e.code() << "): " << e.what() << "\n";
    return kExitBackend;
  } catch (const assort::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  }
  return kExitUsage;
}
