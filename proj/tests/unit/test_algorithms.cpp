#include <algorithm>
#include <cmath>
#include <random>

#include "assort/algorithms.hpp"
#include "assort/error.hpp"
#include "assort/highs_backend.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace assort;
using doctest::Approx;

namespace {

Assortment X(std::initializer_list<int> bits) {
  Assortment x;
  for (int b : bits) x.push_back(std::uint8_t(b));
  return x;
}

SolveConfig config(Method method, CutKinds cuts = CutKinds::oa_only(), int segments = 0,
                   MasterChoice master = MasterChoice::Li) {
  SolveConfig cfg;
  cfg.method = method;
  cfg.cuts = cuts;
  cfg.segments = segments;
  cfg.master = master;
  return cfg;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

class NoLazyBackend : public SolverBackend {
 public:
  std::string name() const override { return "plain"; }
  Capabilities capabilities() const override { return {true, false, false}; }
  MasterSolution solve(const MasterModel& model, const SolveLimits& limits) const override {
    return HighsBackend().solve(model, limits);
  }
};

}  // namespace

TEST_CASE("T1 greedy") {
  const auto t1 = fixtures::t1();
  CHECK(greedy_unit(t1, 1) == X({0, 1}));
  CHECK(greedy_unit(t1, 2) == X({1, 1}));
  CHECK(eval_unit_revenue(t1, X({0, 1})) == Approx(0.625));
  CHECK(eval_unit_revenue(t1, X({1, 0})) == Approx(0.5));
  CHECK_THROWS_AS(greedy_unit(t1, 0), InputError);
  CHECK_THROWS_AS(greedy_unit(t1, 3), InputError);

  const auto capped = greedy_family(fixtures::t1(1));
  CHECK(capped.x == X({0, 1}));
  CHECK(capped.objective == Approx(0.625));
  REQUIRE(capped.ratio);
  CHECK(*capped.ratio == Approx(0.3161).epsilon(1e-4));
  CHECK(capped.objective >= *capped.ratio * 1.0);

  const auto free = greedy_family(t1);
  CHECK(free.objective == Approx(1.0));
  CHECK(free.x == X({1, 1}));
}

TEST_CASE("approximation bound arithmetic") {
  CHECK(approximation_bound(fixtures::t1()) == Approx(0.5 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
  auto raw = fixtures::t1_raw();
  std::fill(raw.r.begin(), raw.r.end(), 1.7);
  CHECK(approximation_bound(fixtures::build(raw)) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 10; ++rep) {
    const double b = approximation_bound(fixtures::build(fixtures::random_raw(rng, 3, 5, fixtures::Scheme::None)));
    CHECK(b > 0.21);
    CHECK(b < 0.633);
  }
}

TEST_CASE("greedy order picks the best unit-price marginal") {
  std::mt19937_64 rng(62);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 1 + int(rng() % 9);
    auto raw = fixtures::random_raw(rng, 1 + int(rng() % 4), m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    auto unit = raw;
    std::fill(unit.r.begin(), unit.r.end(), 1.0);
    long evals = 0;
    const auto order = greedy_order(inst, &evals);
    CHECK(evals <= long(m) * m);
    Assortment cur(static_cast<std::size_t>(m), 0);
    for (int k = 0; k < m; ++k) {
      int best = -1;
      double best_value = -1.0;
      for (int j = 0; j < m; ++j) {
        if (cur[std::size_t(j)]) continue;
        auto next = cur;
        next[std::size_t(j)] = 1;
        const double v = fixtures::naive_revenue(unit, next);
        if (v > best_value + 1e-13) {
          best_value = v;
          best = j;
        }
      }
      CHECK(order[std::size_t(k)] == best);
      cur[std::size_t(best)] = 1;
      // Nested prefixes.
      const auto s = greedy_unit(inst, k + 1);
      CHECK(s == cur);
    }
  }
}

TEST_CASE("greedy meets its guarantee on cardinality instances") {
  std::mt19937_64 rng(63);
  for (int rep = 0; rep < 40; ++rep) {
    const auto raw = fixtures::random_raw(rng, 1 + int(rng() % 6), 2 + int(rng() % 11), fixtures::Scheme::Cardinality);
    const auto inst = fixtures::build(raw);
    const auto g = greedy_family(inst);
    REQUIRE(g.ratio);
    CHECK(is_feasible(inst, g.x));
    CHECK(g.objective >= *g.ratio * fixtures::naive_optimum(raw).value - 1e-12);
  }
}

TEST_CASE("greedy under general constraints stays feasible without a certificate") {
  std::mt19937_64 rng(64);
  for (int rep = 0; rep < 20; ++rep) {
    const auto inst = fixtures::build(fixtures::random_raw(rng, 3, 8, fixtures::Scheme::Subsets));
    const auto g = greedy_family(inst);
    CHECK_FALSE(g.ratio.has_value());
    CHECK(is_feasible(inst, g.x));
    const auto capped = greedy_family(inst, 2);
    CHECK(is_feasible(inst, capped.x));
    CHECK(std::count(capped.x.begin(), capped.x.end(), 1) <= 2);
  }
}

TEST_CASE("T1 cutting plane") {
  HighsBackend highs;
  const auto t1 = fixtures::t1(1);
  const auto res = cutting_plane(t1, config(Method::CP), highs);
  CHECK(res.status == SolveStatus::Optimal);
  CHECK(res.x == X({1, 0}));
  CHECK(res.objective == Approx(1.0));
  CHECK(res.bound == Approx(1.0).epsilon(1e-6));
  CHECK(res.iterations <= 3 + 1);
  CHECK(res.objective + res.min_objective == Approx(t1.revenue_constant()));
  CHECK(res.master_used == "li");
}

TEST_CASE("T1 branch and cut") {
  HighsBackend highs;
  EnumerationBackend enumerate;
  const auto t1 = fixtures::t1(1);
  for (const SolverBackend* b : {static_cast<const SolverBackend*>(&highs), static_cast<const SolverBackend*>(&enumerate)}) {
    const auto res = branch_and_cut(t1, config(Method::BC, CutKinds::oa_sc()), *b);
    CHECK(res.status == SolveStatus::Optimal);
    CHECK(res.x == X({1, 0}));
    CHECK(res.objective == Approx(1.0));
    CHECK(res.cuts_added > 0);
  }
  NoLazyBackend plain;
  try {
    branch_and_cut(t1, config(Method::BC), plain);
    FAIL("expected lazy-unsupported");
  } catch (const UnsupportedError& e) {
    CHECK(e.code() == "lazy-unsupported");
  }
}

TEST_CASE("exact methods agree with enumeration") {
  HighsBackend highs;
  EnumerationBackend enumerate;
  std::mt19937_64 rng(65);
  for (int rep = 0; rep < 16; ++rep) {
    const int n = 1 + int(rng() % 5), m = 2 + int(rng() % 8);
    const auto raw = fixtures::random_raw(rng, n, m, static_cast<fixtures::Scheme>(rep % 4));
    const auto inst = fixtures::build(raw);
    const double truth = fixtures::naive_optimum(raw).value;
    std::vector<std::pair<SolveConfig, const SolverBackend*>> runs = {
        {config(Method::CP), &highs},
        {config(Method::CP, CutKinds::oa_sc()), &highs},
        {config(Method::BC), &highs},
        {config(Method::BC, CutKinds::oa_sc()), &highs},
        {config(Method::MILP), &highs},
        {config(Method::CP, CutKinds::oa_only(), 1), &highs},
        {config(Method::CP, CutKinds::oa_sc(), n), &highs},
        {config(Method::BC, CutKinds::oa_only(), 1), &highs},
        {config(Method::CP, CutKinds::oa_only(), 0, MasterChoice::Bi), &enumerate},
        {config(Method::BC, CutKinds::oa_sc(), 0, MasterChoice::Bi), &enumerate},
        {config(Method::CP, CutKinds::oa_only(), 1, MasterChoice::Bi), &enumerate},
    };
    auto bigm = config(Method::MILP);
    bigm.linearization = Linearization::BigM;
    runs.push_back({bigm, &highs});
    for (const auto& [cfg, backend] : runs) {
      const auto res = solve(inst, cfg, *backend);
      INFO("method ", to_string(cfg.method), " segments ", cfg.segments, " master ", res.master_used);
      REQUIRE(res.status == SolveStatus::Optimal);
      CHECK(is_feasible(inst, res.x));
      CHECK(rel(res.objective, truth) <= 1e-6);
      CHECK(res.bound >= res.objective - 1e-12);
      CHECK(res.gap <= cfg.epsilon + 1e-9);
      CHECK(res.objective + res.min_objective == Approx(inst.revenue_constant()).epsilon(1e-10));
    }
  }
}

TEST_CASE("cutting-plane traces are monotone and finite") {
  HighsBackend highs;
  std::mt19937_64 rng(66);
  for (int rep = 0; rep < 12; ++rep) {
    const int m = 3 + int(rng() % 7);
    const auto raw = fixtures::random_raw(rng, 1 + int(rng() % 5), m, static_cast<fixtures::Scheme>(rep % 4));
    const auto inst = fixtures::build(raw);
    const auto res = cutting_plane(inst, config(Method::CP, rep % 2 ? CutKinds::oa_sc() : CutKinds::oa_only()), highs);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.iterations <= fixtures::naive_optimum(raw).feasible + 1);
    REQUIRE(!res.trace.empty());
    const double g_star = inst.revenue_constant() - fixtures::naive_optimum(raw).value;
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
      const auto& it = res.trace[k];
      CHECK(it.master_bound <= g_star + 1e-8 * std::max(1.0, g_star));
      CHECK(it.running_bound >= it.master_bound);
      if (k > 0) {
        CHECK(it.master_bound >= res.trace[k - 1].master_bound - 1e-9 * std::max(1.0, std::abs(it.master_bound)));
        CHECK(it.running_bound >= res.trace[k - 1].running_bound);
        CHECK(it.incumbent <= res.trace[k - 1].incumbent);
      }
    }
  }
}

TEST_CASE("limits, dispatch and configuration errors") {
  HighsBackend highs;
  const auto t1 = fixtures::t1(1);
  auto cfg = config(Method::CP);
  cfg.segments = 3;
  CHECK_THROWS_AS(solve(t1, cfg, highs), InputError);
  cfg.segments = 0;
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(solve(t1, cfg, highs), InputError);

  std::mt19937_64 rng(67);
  const auto inst = fixtures::build(fixtures::random_raw(rng, 4, 10, fixtures::Scheme::Cardinality));
  auto limited = config(Method::CP);
  limited.time_limit = 0.0;
  const auto res = solve(inst, limited, highs);
  CHECK(res.status == SolveStatus::FeasibleLimit);
  CHECK(is_feasible(inst, res.x));
  CHECK(res.bound >= res.objective);

  const auto g = solve(t1, config(Method::Greedy), highs);
  CHECK(g.status == SolveStatus::Heuristic);
  CHECK(g.objective == Approx(0.625));
  CHECK(g.bound == Approx(0.625 / approximation_bound(t1)));
  const auto b = solve(t1, config(Method::Brute), highs);
  CHECK(b.status == SolveStatus::Optimal);
  CHECK(b.objective == Approx(1.0));

  const auto fallback = solve(t1, config(Method::CP, CutKinds::oa_only(), 0, MasterChoice::Bi), highs);
  CHECK(fallback.master_used == "li");
  CHECK(fallback.note.find("bilinear-unsupported") != std::string::npos);
}

TEST_CASE("parsing and names") {
  CHECK(parse_method("cp") == Method::CP);
  CHECK(parse_method("bc") == Method::BC);
  CHECK(parse_method("milp") == Method::MILP);
  CHECK(parse_method("greedy") == Method::Greedy);
  CHECK(parse_method("brute") == Method::Brute);
  CHECK_THROWS_AS(parse_method("simplex"), InputError);
  CHECK(parse_master("bi") == MasterChoice::Bi);
  CHECK_THROWS_AS(parse_master("tri"), InputError);
  CHECK(parse_cuts("oa+sc").sc);
  CHECK_FALSE(parse_cuts("oa").sc);
  CHECK_THROWS_AS(parse_cuts("sc"), InputError);
  CHECK(to_string(CutKinds::oa_sc()) == "oa+sc");
  CHECK(std::string(to_string(SolveStatus::FeasibleLimit)) == "feasible-limit");
}

TEST_CASE("result finalisation") {
  const auto t1 = fixtures::t1();
  ExactResult res;
  res.x = X({1, 0});
  finalize_result(t1, res, 0.9);
  CHECK(res.objective == Approx(1.0));
  CHECK(res.min_objective == Approx(1.0));
  CHECK(res.bound == Approx(1.1));
  CHECK(res.gap == Approx(0.1));
  finalize_result(t1, res, 1.5);  // a bound above G(x) is clipped to G(x)
  CHECK(res.bound == Approx(1.0));
  CHECK(res.gap == 0.0);
}
