// Acceptance checks: one PASS/FAIL line per criterion. Reference values
// come from the naive evaluator in fixtures.hpp, which shares no code with
// the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "assort/algorithms.hpp"
#include "assort/genbench.hpp"
#include "assort/highs_backend.hpp"
#include "assort/master.hpp"
#include "assort/oracle.hpp"
#include "fixtures.hpp"

using namespace assort;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("criterion %d: %s %s (%s)\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fixtures::Raw raw_of(const Instance& inst) {
  fixtures::Raw raw;
  raw.n = inst.classes();
  raw.m = inst.products();
  for (int i = 0; i < raw.n; ++i) {
    raw.rho.push_back(inst.rho(i));
    raw.v0.push_back(inst.v0(i));
    for (int j = 0; j < raw.m; ++j) {
      raw.v.push_back(inst.v(i, j));
      raw.r.push_back(inst.r(i, j));
    }
  }
  for (const auto& c : inst.constraints()) {
    raw.beta.push_back(c.beta);
    raw.alpha.push_back(c.alpha);
  }
  return raw;
}

SolveConfig config(Method method, CutKinds cuts = CutKinds::oa_only(), int segments = 0) {
  SolveConfig cfg;
  cfg.method = method;
  cfg.cuts = cuts;
  cfg.segments = segments;
  cfg.time_limit = 60.0;
  return cfg;
}

// The oracle suite shared by criteria 1, 6 and 7.
struct Case {
  fixtures::Raw raw;
  Instance inst;
  double optimum;
};

std::vector<Case> oracle_suite() {
  std::mt19937_64 rng(20240601);
  std::vector<Case> out;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + int(rng() % 10), m = 1 + int(rng() % 12);
    auto raw = fixtures::random_raw(rng, n, m, static_cast<fixtures::Scheme>(k % 4));
    auto inst = fixtures::build(raw);
    const double opt = fixtures::naive_optimum(raw).value;
    out.push_back({std::move(raw), std::move(inst), opt});
  }
  return out;
}

struct CpCheck {
  long runs = 0;
  long max_iterations = 0;
  long bad_termination = 0;
  long monotone_violations = 0;
  long steps = 0;

  void add(const ExactResult& res, double epsilon) {
    ++runs;
    max_iterations = std::max(max_iterations, res.iterations);
    if (res.status != SolveStatus::Optimal || (res.iterations > 200 && res.gap > epsilon)) ++bad_termination;
    for (std::size_t t = 1; t < res.trace.size(); ++t) {
      ++steps;
      const double prev = res.trace[t - 1].master_bound, cur = res.trace[t].master_bound;
      if (cur < prev - 1e-9 * std::max(1.0, std::abs(prev))) ++monotone_violations;
    }
  }
};

void criterion_1_6_7() {
  const auto suite = oracle_suite();
  HighsBackend highs;
  CpCheck cp;

  const auto t0 = Clock::now();
  double worst = 0.0;
  long mismatches = 0, solves = 0;
  const std::vector<std::pair<SolveConfig, const char*>> configs = {
      {config(Method::CP), "cp li/oa"},
      {config(Method::CP, CutKinds::oa_sc()), "cp li/oa+sc"},
      {config(Method::BC), "bc li"},
      {config(Method::MILP), "milp"}};
  std::string first_miss;
  for (std::size_t k = 0; k < suite.size(); ++k) {
    const auto& c = suite[k];
    for (const auto& [cfg, label] : configs) {
      const auto res = solve(c.inst, cfg, highs);
      ++solves;
      const double err = rel(res.objective, c.optimum);
      worst = std::max(worst, err);
      if (res.status != SolveStatus::Optimal || err > 1e-6 || !fixtures::naive_feasible(c.raw, res.x) ||
          rel(fixtures::naive_revenue(c.raw, res.x), c.optimum) > 1e-6) {
        ++mismatches;
        if (first_miss.empty()) first_miss = ", first miss: instance " + std::to_string(k) + " " + label;
      }
      if (cfg.method == Method::CP) cp.add(res, cfg.epsilon);
    }
  }
  const double elapsed = seconds_since(t0);
  report(1, mismatches == 0 && elapsed < 300.0, "oracle equivalence",
         std::to_string(suite.size()) + " instances, " + std::to_string(solves) + " solves, " +
             std::to_string(mismatches) + " mismatches, max rel err " + fmt("%.2e", worst) + ", " + fmt("%.1f", elapsed) +
             " s of 300 s" + first_miss);

  long seg_mismatches = 0, seg_runs = 0;
  double seg_worst = 0.0;
  for (const auto& c : suite) {
    const auto base = solve(c.inst, config(Method::CP), highs);
    const int n = c.inst.classes();
    // L = 5 needs at least five classes; smaller instances use L = n.
    std::vector<int> ls = {1, std::min(5, n), n};
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    for (int L : ls) {
      const auto res = solve(c.inst, config(Method::CP, CutKinds::oa_only(), L), highs);
      cp.add(res, 1e-6);
      ++seg_runs;
      const double err = rel(res.objective, base.objective);
      seg_worst = std::max(seg_worst, err);
      if (res.status != SolveStatus::Optimal || err > 1e-6) ++seg_mismatches;
    }
  }
  report(7, seg_mismatches == 0, "segment consistency",
         std::to_string(seg_runs) + " segmented CP runs with L in {1, 5, n}, " + std::to_string(seg_mismatches) +
             " mismatches, max rel diff " + fmt("%.2e", seg_worst));

  // T1 joins the suite for the termination check.
  for (std::optional<double> cap : {std::optional<double>{}, std::optional<double>{1.0}})
    cp.add(solve(fixtures::t1(cap), config(Method::CP), highs), 1e-6);
  report(6, cp.bad_termination == 0 && cp.monotone_violations == 0, "CP finite termination",
         std::to_string(cp.runs) + " CP runs, max " + std::to_string(cp.max_iterations) + " iterations, " +
             std::to_string(cp.bad_termination) + " bad terminations, " + std::to_string(cp.monotone_violations) +
             " bound decreases over " + std::to_string(cp.steps) + " iteration steps");
}

void criterion_2() {
  std::mt19937_64 rng(7001);
  long checks = 0, invalid = 0, loose = 0;
  double worst_tight = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + int(rng() % 5), m = 1 + int(rng() % 12);
    const auto raw = fixtures::random_raw(rng, n, m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    const int i = int(rng() % std::uint64_t(n));
    const auto xbar = fixtures::bits(m, rng());
    const auto x = fixtures::bits(m, rng());
    const std::vector<double> xd(x.begin(), x.end()), xbard(xbar.begin(), xbar.end());
    const double phi_x = fixtures::naive_phi(raw, i, xd), phi_bar = fixtures::naive_phi(raw, i, xbard);
    for (const auto& cut : {oa_cut(inst, i, xbar), sc_cut_a(inst, i, xbar), sc_cut_b(inst, i, xbar)}) {
      ++checks;
      if (phi_x < cut.rhs(std::span<const std::uint8_t>(x)) - 1e-9) ++invalid;
      const double gap = std::abs(cut.rhs(std::span<const std::uint8_t>(xbar)) - phi_bar);
      worst_tight = std::max(worst_tight, gap);
      if (gap > 1e-12) ++loose;
    }
  }
  report(2, invalid == 0 && loose == 0, "cut validity",
         "1000 triples, " + std::to_string(checks) + " OA/SC1/SC2 cuts, " + std::to_string(invalid) + " invalid, " +
             std::to_string(loose) + " not tight, max tightness error " + fmt("%.1e", worst_tight));
}

void criterion_3() {
  std::mt19937_64 rng(7002);
  const int m = 8;
  const std::uint64_t full = (1u << m) - 1;
  long pairs = 0, mono = 0, super = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto raw = fixtures::random_raw(rng, 3, m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    for (int i = 0; i < raw.n; ++i) {
      std::vector<double> phi(full + 1);
      for (std::uint64_t s = 0; s <= full; ++s) phi[s] = eval_phi(inst, i, fixtures::bits(m, s));
      for (std::uint64_t b = 0; b <= full; ++b)
        for (std::uint64_t a = b;; a = (a - 1) & b) {
          ++pairs;
          const double dm = phi[b] - phi[a];
          worst = std::max(worst, dm);
          if (dm > 1e-12) ++mono;
          for (int k = 0; k < m; ++k) {
            const std::uint64_t e = std::uint64_t(1) << k;
            if (b & e) continue;
            const double ds = (phi[a | e] - phi[a]) - (phi[b | e] - phi[b]);
            worst = std::max(worst, ds);
            if (ds > 1e-12) ++super;
          }
          if (a == 0) break;
        }
    }
  }
  report(3, mono == 0 && super == 0, "monotone and supermodular Phi",
         std::to_string(pairs) + " pairs A subset of B at m = 8, " + std::to_string(mono) + " monotonicity and " +
             std::to_string(super) + " supermodularity violations, max excess " + fmt("%.1e", worst));
}

void criterion_4() {
  std::mt19937_64 rng(7003);
  HighsBackend highs;
  long mismatches = 0;
  double worst = 0.0;
  const int count = 40;
  for (int k = 0; k < count; ++k) {
    const int n = 1 + int(rng() % 5), m = 1 + int(rng() % 10);
    const auto raw = fixtures::random_raw(rng, n, m, static_cast<fixtures::Scheme>(k % 4));
    const auto inst = fixtures::build(raw);
    auto model = build_li_master(inst, build_bound_table(inst), highs);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
      const auto x = fixtures::bits(m, mask);
      if (!fixtures::naive_feasible(raw, x)) continue;
      for (int i = 0; i < n; ++i) model.add_cut(oa_cut(inst, i, x));
    }
    const auto sol = highs.solve(model, {});
    double rc = 0.0;
    for (int i = 0; i < n; ++i) {
      double rmax = 0.0;
      for (int j = 0; j < m; ++j) rmax = std::max(rmax, raw.r[std::size_t(i * m + j)]);
      rc += raw.rho[std::size_t(i)] * rmax;
    }
    const double opt = fixtures::naive_optimum(raw).value;
    const double err = rel(rc - sol.objective, opt);
    worst = std::max(worst, err);
    if (sol.status != MasterStatus::Optimal || err > 1e-6) ++mismatches;
  }
  report(4, mismatches == 0, "linear master with all OA cuts is exact",
         std::to_string(count) + " instances with m <= 10, " + std::to_string(mismatches) + " mismatches, max rel err " +
             fmt("%.2e", worst));
}

void criterion_5() {
  std::vector<Instance> set;
  // Half with per-product prices, half with per-entry prices.
  for (int c : {2, 4})
    for (auto& g : ratio_instances(25, 5, 12, c, 900 + std::uint64_t(c))) set.push_back(std::move(g.instance));
  std::mt19937_64 rng(7005);
  while (set.size() < 100) {
    const int n = 1 + int(rng() % 6), m = 2 + int(rng() % 11);
    set.push_back(fixtures::build(fixtures::random_raw(rng, n, m, fixtures::Scheme::Cardinality)));
  }
  std::vector<double> ratios;
  long below = 0;
  double min_margin = 1e300;
  for (const auto& inst : set) {
    const auto raw = raw_of(inst);
    const double opt = fixtures::naive_optimum(raw).value;
    const auto g = greedy_family(inst);
    const double f = fixtures::naive_revenue(raw, g.x);
    double rmin = 1e300, rmax = 0.0;
    for (double r : raw.r) {
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    const double bound = (1.0 - std::exp(-1.0)) * rmin / rmax;
    const double ratio = opt > 0.0 ? f / opt : 1.0;
    ratios.push_back(ratio);
    min_margin = std::min(min_margin, ratio - bound);
    if (!fixtures::naive_feasible(raw, g.x) || ratio < bound) ++below;
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = 0.5 * (ratios[49] + ratios[50]);
  report(5, below == 0, "greedy guarantee",
         "100 cardinality instances, " + std::to_string(below) + " below (1-1/e) r_min/r_max, min margin " +
             fmt("%.3f", min_margin) + "; median ratio " + fmt("%.4f", median) + ", min " + fmt("%.4f", ratios.front()) +
             (median >= 0.95 ? ", median >= 0.95 reproduced" : ", median below 0.95"));
}

void criterion_8() {
  auto spec = resize(family_spec("Sen_200_20"), 20, 60);
  spec.capacities = {5, 10, 30};
  spec.instances_per_cell = 1;
  const auto set = generate_family(spec, 8000);

  std::vector<SolveConfig> configs(3);
  configs[0].method = Method::CP;
  configs[1].method = Method::BC;
  configs[2].method = Method::MILP;
  const auto rows = run_benchmark(set, configs, 60.0, "highs", 1);

  const fs::path dir = fs::current_path();
  {
    std::ofstream out(dir / "acceptance_scaled_runs.csv");
    write_records_csv(out, rows);
    std::ofstream sum(dir / "acceptance_scaled_summary.csv");
    write_summary_csv(sum, summarize(rows));
  }

  int solved[3] = {0, 0, 0};
  long disagreements = 0;
  std::string detail;
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto* row = &rows[k * 3];
    for (int c = 0; c < 3; ++c)
      if (row[c].status == "optimal") ++solved[c];
    for (int c = 1; c < 3; ++c)
      if (row[0].status == "optimal" && row[c].status == "optimal" && rel(row[c].objective, row[0].objective) > 1e-6)
        ++disagreements;
    if (row[1].status == "optimal" && row[2].status == "optimal" && rel(row[1].objective, row[2].objective) > 1e-6)
      ++disagreements;
    for (int c = 0; c < 3; ++c)
      if (row[c].status != "optimal")
        detail += "; " + row[c].method + " " + row[c].status + " on " + row[c].instance + " at " +
                  fmt("%.1f", row[c].time_s) + " s";
  }
  const int total = int(set.size());
  std::string counts = "solved cp " + std::to_string(solved[0]) + "/" + std::to_string(total) + ", bc " +
                       std::to_string(solved[1]) + "/" + std::to_string(total) + ", milp " +
                       std::to_string(solved[2]) + "/" + std::to_string(total);
  for (const auto& cell : summarize(rows))
    if (cell.mean_time_solved)
      counts += "; " + cell.method + " v0=" + cell.v0 + " C=" + cell.alpha + " mean " +
                fmt("%.2f", *cell.mean_time_solved) + " s";
  report(8, solved[0] == total && solved[1] == total && solved[2] == total && disagreements == 0,
         "scaled Sen_200_20 benchmark (m=60, n=20, C in {5,10,30}, 60 s)",
         counts + ", " + std::to_string(disagreements) + " disagreements" + detail +
             ", rows in acceptance_scaled_runs.csv");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_9() {
  const auto root = fs::temp_directory_path() / "assort_acceptance_determinism";
  fs::remove_all(root);
  long files = 0, file_diffs = 0, value_diffs = 0, values = 0;
  for (const auto& name : family_names()) {
    auto spec = resize(family_spec(name), 3, 10);
    spec.instances_per_cell = 1;
    if (spec.scheme == ConstraintScheme::Subsets) {
      spec.subsets = 2;
      spec.pairs = {{4, 2}};
    } else {
      spec.capacities = {3};
    }
    const auto a = save_instances(generate_family(spec, 77), root / "a");
    const auto b = save_instances(generate_family(spec, 77), root / "b");
    for (std::size_t k = 0; k < a.size(); ++k) {
      ++files;
      if (slurp(a[k]) != slurp(b[k])) ++file_diffs;
      const auto ia = load_instance(a[k]), ib = load_instance(b[k]);
      const auto ga = greedy_family(ia), gb = greedy_family(ib);
      const auto ba = brute_force(ia, 1), bb = brute_force(ib, 0);
      values += 2;
      if (ga.x != gb.x || std::abs(ga.objective - gb.objective) > 1e-12) ++value_diffs;
      if (ba.x != bb.x || std::abs(ba.objective - bb.objective) > 1e-12) ++value_diffs;
    }
  }
  fs::remove_all(root);
  report(9, file_diffs == 0 && value_diffs == 0, "determinism",
         std::to_string(files) + " instance files over 16 families, " + std::to_string(file_diffs) +
             " byte differences, " + std::to_string(value_diffs) + " of " + std::to_string(values) +
             " greedy/brute results differing");
}

}  // namespace

int main() {
  criterion_1_6_7();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_9();
  criterion_8();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
