#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "assort/error.hpp"
#include "assort/genbench.hpp"
#include "doctest.h"

using namespace assort;
using doctest::Approx;

namespace {

using Pairs = std::vector<std::pair<double, double>>;

double draw(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * (double(rng() >> 11) / 9007199254740992.0); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool same(const Instance& a, const Instance& b) {
  if (a.classes() != b.classes() || a.products() != b.products()) return false;
  for (int i = 0; i < a.classes(); ++i) {
    if (a.rho(i) != b.rho(i) || a.v0(i) != b.v0(i)) return false;
    for (int j = 0; j < a.products(); ++j)
      if (a.v(i, j) != b.v(i, j) || a.r(i, j) != b.r(i, j)) return false;
  }
  if (a.constraints().size() != b.constraints().size()) return false;
  for (std::size_t k = 0; k < a.constraints().size(); ++k)
    if (a.constraints()[k].alpha != b.constraints()[k].alpha || a.constraints()[k].beta != b.constraints()[k].beta)
      return false;
  return true;
}

FamilySpec small(const std::string& family) {
  auto s = resize(family_spec(family), 3, 8);
  s.instances_per_cell = 1;
  if (s.scheme == ConstraintScheme::Subsets) {
    s.subsets = 2;
    s.pairs = {{3, 1}, {4, 2}};
  } else {
    s.capacities = {2, 4};
  }
  return s;
}

BenchmarkRecord row(std::string family, std::string method, std::string status, double time) {
  BenchmarkRecord r;
  r.instance = family + "_x";
  r.family = std::move(family);
  r.v0 = "5";
  r.alpha = "10";
  r.method = std::move(method);
  r.master = "Li";
  r.cuts = "oa";
  r.status = std::move(status);
  r.time_s = time;
  return r;
}

}  // namespace

TEST_CASE("family table") {
  CHECK(family_names().size() == 16);
  for (const auto& name : family_names()) CHECK(family_spec(name).name == name);
  CHECK_THROWS_AS(family_spec("Sen_1_1"), InputError);

  auto s = family_spec("Sen_200_20");
  CHECK(s.n == 20);
  CHECK(s.m == 200);
  CHECK(s.revenue == RevenueScheme::PerProduct);
  CHECK(s.utility == UtilityScheme::Uniform12);
  CHECK(s.rho == RhoScheme::Equal);
  CHECK(s.v0_choices == std::vector<double>{5, 10});
  CHECK(s.capacities == std::vector<double>{10, 20, 50, 100, 200});
  CHECK(s.instances_per_cell == 5);
  CHECK(family_cells(s).size() == 10);

  s = family_spec("Sen_500_50");
  CHECK(s.n == 50);
  CHECK(s.m == 500);
  CHECK(s.v0_choices == std::vector<double>{10, 20});
  CHECK(s.capacities == std::vector<double>{20, 50, 100, 200, 500});

  s = family_spec("Sen_100_100");
  CHECK(s.n == 100);
  CHECK(s.m == 100);
  CHECK(s.utility == UtilityScheme::Graph);
  CHECK(s.revenue == RevenueScheme::PerEntry);
  CHECK(s.rho == RhoScheme::Uniform01);
  CHECK(s.v0_choices == std::vector<double>{1, 2});
  CHECK(s.capacities == std::vector<double>{10, 20, 50, 100});

  s = family_spec("Sen_200_20_5");
  CHECK(s.scheme == ConstraintScheme::Subsets);
  CHECK(s.subsets == 5);
  CHECK(s.v0_choices == std::vector<double>{10, 20});
  CHECK(s.pairs == Pairs{{5, 2}, {10, 4}, {25, 10}, {50, 20}, {100, 40}});
  CHECK(family_spec("200_20_10").subsets == 10);
  CHECK(family_spec("200_20_10").pairs == Pairs{{5, 2}, {10, 4}, {25, 10}, {50, 20}});
  CHECK(family_spec("500_50_5").pairs == Pairs{{10, 4}, {25, 10}, {50, 20}, {125, 50}, {250, 100}});
  CHECK(family_spec("500_50_10").pairs == Pairs{{5, 2}, {10, 4}, {25, 10}, {50, 20}, {125, 50}});
  CHECK(family_spec("100_100_5").pairs == Pairs{{5, 2}, {10, 4}, {25, 10}, {50, 20}});
  CHECK(family_spec("100_100_10").pairs == Pairs{{5, 2}, {10, 4}, {25, 10}});
  CHECK(family_spec("100_100_5").utility == UtilityScheme::Graph);

  s = family_spec("1000_100");
  CHECK(s.n == 100);
  CHECK(s.m == 1000);
  CHECK(s.utility == UtilityScheme::Uniform01);
  CHECK(s.rho == RhoScheme::Uniform01);
  CHECK(s.v0_choices == std::vector<double>{10, 20});
  CHECK(s.capacities == std::vector<double>{25, 50, 100, 250, 500});
  CHECK(family_spec("1000_100_5").pairs == Pairs{{25, 10}, {50, 20}, {125, 50}, {250, 100}, {500, 200}});
  CHECK(family_spec("1000_100_10").pairs == Pairs{{10, 4}, {25, 10}, {50, 20}, {125, 50}, {250, 100}});

  for (const char* name : {"100_1000", "200_2000", "200_4000", "100_5000"}) {
    CAPTURE(name);
    s = family_spec(name);
    CHECK(s.scheme == ConstraintScheme::General);
    CHECK(s.capacities == std::vector<double>{10, 20, 50});
    CHECK(s.utility == UtilityScheme::Uniform01);
    CHECK(s.rho == RhoScheme::Equal);
  }
  CHECK(family_spec("100_1000").m == 100);
  CHECK(family_spec("100_1000").n == 1000);
  CHECK(family_spec("200_4000").n == 4000);
  CHECK(family_spec("100_5000").n == 5000);
}

TEST_CASE("generated draws follow the documented stream") {
  // Per-product revenues, U[1,2] utilities, cardinality row.
  auto spec = resize(family_spec("Sen_200_20"), 2, 3);
  const auto inst = generate(spec, {5.0, 2.0, 0.0}, 42);
  std::mt19937_64 rng(42);
  double price[3];
  for (double& p : price) p = draw(rng, 1.0, 3.0);
  for (int i = 0; i < 2; ++i) {
    CHECK(inst.rho(i) == 0.5);
    CHECK(inst.v0(i) == 5.0);
    for (int j = 0; j < 3; ++j) CHECK(inst.r(i, j) == price[j]);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(inst.v(i, j) == draw(rng, 1.0, 2.0));
  REQUIRE(inst.constraints().size() == 1);
  CHECK(inst.constraints()[0].is_cardinality());
  CHECK(inst.constraints()[0].alpha == 2.0);

  // Random rho, per-entry revenues, U[0,1] utilities, subsets.
  spec = resize(family_spec("1000_100_5"), 2, 5);
  spec.subsets = 2;
  const auto sub = generate(spec, {10.0, 3.0, 1.0}, 7);
  rng.seed(7);
  for (int i = 0; i < 2; ++i) CHECK(sub.rho(i) == draw(rng, 0.0, 1.0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 5; ++j) CHECK(sub.r(i, j) == draw(rng, 1.0, 3.0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 5; ++j) CHECK(sub.v(i, j) == draw(rng, 0.0, 1.0));
  REQUIRE(sub.constraints().size() == 3);
  CHECK(sub.constraints()[0].alpha == 3.0);
  for (int j = 0; j < 5; ++j) CHECK(sub.constraints()[0].beta[std::size_t(j)] == draw(rng, 0.0, 1.0));
  CHECK(sub.constraints()[1].alpha == 1.0);
  CHECK(sub.constraints()[1].beta == std::vector<double>{1, 1, 0, 0, 0});
  CHECK(sub.constraints()[2].beta == std::vector<double>{0, 0, 1, 1, 1});
}

TEST_CASE("graph family utilities") {
  auto spec = resize(family_spec("Sen_100_100"), 30, 30);
  const auto inst = generate(spec, {1.0, 5.0, 0.0}, 3);
  int edges = 0;
  for (int i = 0; i < 30; ++i) {
    CHECK(inst.v(i, i) == 0.0);
    for (int j = 0; j < 30; ++j) {
      if (inst.v(i, j) > 0.0) {
        ++edges;
        CHECK(inst.v(i, j) >= 1.0);
        CHECK(inst.v(i, j) < 2.0);
        // Symmetric support.
        CHECK(inst.v(j, i) > 0.0);
      }
    }
  }
  // 435 vertex pairs at p = 0.1; both orientations counted.
  CHECK(edges > 2 * 15);
  CHECK(edges < 2 * 90);
}

TEST_CASE("generation is deterministic and valid") {
  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "assort_genbench_test";
  fs::remove_all(root);
  for (const auto& name : family_names()) {
    CAPTURE(name);
    const auto spec = small(name);
    const auto a = generate_family(spec, 11), b = generate_family(spec, 11);
    REQUIRE(a.size() == family_cells(spec).size());
    std::set<std::string> ids;
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].id == b[k].id);
      CHECK(same(a[k].instance, b[k].instance));
      ids.insert(a[k].id);
      const auto& inst = a[k].instance;
      for (int i = 0; i < inst.classes(); ++i) {
        CHECK(inst.v0(i) > 0.0);
        CHECK(inst.rho(i) >= 0.0);
        for (int j = 0; j < inst.products(); ++j) {
          CHECK(inst.v(i, j) >= 0.0);
          CHECK(inst.r(i, j) >= 1.0);
          CHECK(inst.r(i, j) < 3.0);
        }
      }
      Assortment empty(std::size_t(inst.products()), 0);
      CHECK(is_feasible(inst, empty));
    }
    CHECK(ids.size() == a.size());
    const auto pa = save_instances(a, root / "a"), pb = save_instances(b, root / "b");
    REQUIRE(pa.size() == pb.size());
    for (std::size_t k = 0; k < pa.size(); ++k) {
      CHECK(slurp(pa[k]) == slurp(pb[k]));
      CHECK(same(load_instance(pa[k]), a[k].instance));
    }
    const auto c = generate_family(spec, 12);
    CHECK_FALSE(same(a[0].instance, c[0].instance));
  }
  fs::remove_all(root);
}

TEST_CASE("instance ids") {
  auto spec = family_spec("Sen_200_20");
  CHECK(instance_id(spec, {5, 10, 0}, 3) == "Sen_200_20_v5_c10_s3");
  spec = family_spec("Sen_200_20_5");
  CHECK(instance_id(spec, {10, 25, 10}, 0) == "Sen_200_20_5_v10_a25_k10_s0");
  spec = family_spec("100_1000");
  CHECK(instance_id(spec, {1, 20, 0}, 9) == "100_1000_v1_a20_s9");

  spec = small("Sen_200_20");
  spec.instances_per_cell = 2;
  const auto set = generate_family(spec, 100);
  REQUIRE(set.size() == 8);
  CHECK(set[0].id == "Sen_200_20_v5_c2_s100");
  CHECK(set[1].id == "Sen_200_20_v5_c2_s101");
  CHECK(set[2].id == "Sen_200_20_v5_c4_s102");
  CHECK(set[7].id == "Sen_200_20_v10_c4_s107");
  CHECK_THROWS_AS(resize(spec, 0, 3), InputError);
  CHECK_THROWS_AS(generate(spec, {0.0, 2.0, 0.0}, 1), InputError);
}

TEST_CASE("benchmark records and csv") {
  auto spec = small("Sen_200_20");
  spec.v0_choices = {5};
  spec.capacities = {2};
  const auto set = generate_family(spec, 1);
  REQUIRE(set.size() == 1);

  std::ostringstream empty;
  write_records_csv(empty, run_benchmark(set, {}, 10.0, "highs"));
  CHECK(empty.str() ==
        "# assort-results v1\n"
        "instance,family,v0,alpha,method,master,cuts,L,status,objective,bound,gap,time_s,iterations,nodes,cuts_added\n");

  SolveConfig cp, bc;
  cp.method = Method::CP;
  bc.method = Method::BC;
  const auto recs = run_benchmark(set, {cp, bc}, 10.0, "highs", 2);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].method == "cp");
  CHECK(recs[1].method == "bc");
  CHECK(recs[0].v0 == "5");
  CHECK(recs[0].alpha == "2");
  for (const auto& r : recs) {
    CHECK(r.status == "optimal");
    CHECK(r.objective == Approx(recs[0].objective).epsilon(1e-6));
  }

  std::stringstream io;
  write_records_csv(io, recs);
  const auto back = read_records_csv(io);
  REQUIRE(back.size() == recs.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].instance == recs[k].instance);
    CHECK(back[k].method == recs[k].method);
    CHECK(back[k].status == recs[k].status);
    CHECK(back[k].objective == Approx(recs[k].objective).epsilon(1e-11));
    CHECK(back[k].iterations == recs[k].iterations);
  }

  std::istringstream bad("h\na,b,c\n");
  CHECK_THROWS_AS(read_records_csv(bad), InputError);

  auto bad_backend = run_benchmark(set, {cp}, 1.0, "nonexistent");
  REQUIRE(bad_backend.size() == 1);
  CHECK(bad_backend[0].status != "optimal");
}

TEST_CASE("summaries average solved runs only") {
  std::vector<BenchmarkRecord> recs = {row("F", "cp", "optimal", 1.0), row("F", "cp", "optimal", 3.0),
                                       row("F", "cp", "feasible-limit", 60.0), row("F", "bc", "feasible-limit", 60.0)};
  const auto cells = summarize(recs);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].method == "cp");
  CHECK(cells[0].runs == 3);
  CHECK(cells[0].solved == 2);
  REQUIRE(cells[0].mean_time_solved);
  CHECK(*cells[0].mean_time_solved == Approx(2.0));
  CHECK(cells[1].solved == 0);
  CHECK_FALSE(cells[1].mean_time_solved);

  std::ostringstream out;
  write_summary_csv(out, cells);
  CHECK(out.str().find("F,5,10,cp,Li,oa,0,3,2,2\n") != std::string::npos);
  CHECK(out.str().find("F,5,10,bc,Li,oa,0,1,0,-\n") != std::string::npos);
}

TEST_CASE("segment sweep") {
  CHECK(kDefaultSegmentSweep == std::vector<int>{1, 5, 10, 20, 50, 100, 200});
  auto spec = small("Sen_200_20");
  spec.v0_choices = {5};
  spec.capacities = {3};
  const auto set = generate_family(spec, 4);
  SolveConfig base;
  const auto recs = sweep_segments(set, {1, 3, 5}, base, 10.0, "highs");
  // L = 5 exceeds the three classes and is skipped.
  REQUIRE(recs.size() == 4);
  CHECK(recs[0].segments == 1);
  CHECK(recs[0].method == "cp");
  CHECK(recs[1].method == "bc");
  CHECK(recs[3].segments == 3);
  for (const auto& r : recs) {
    CHECK(r.status == "optimal");
    CHECK(r.objective == Approx(recs[0].objective).epsilon(1e-6));
  }
}

TEST_CASE("greedy ratio experiment") {
  const auto set = ratio_instances(6, 3, 8, 3, 5);
  REQUIRE(set.size() == 6);
  for (const auto& g : set) {
    const auto& inst = g.instance;
    CHECK(inst.price_max() == 3.0);
    CHECK(inst.price_min() / inst.price_max() >= 0.25);
    CHECK(inst.price_min() / inst.price_max() <= 0.9);
  }
  const auto rows = ratio_experiment(set);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.capacity == 3);
    CHECK(r.ratio <= 1.0 + 1e-12);
    CHECK(r.ratio >= r.bound - 1e-12);
    CHECK(r.bound == Approx((1.0 - std::exp(-1.0)) * r.price_ratio));
  }
  std::ostringstream out;
  write_ratio_csv(out, rows);
  CHECK(out.str().rfind("# assort-ratio v1\ninstance,n,m,capacity,price_ratio,greedy,optimum,ratio,bound\n", 0) == 0);
  CHECK_THROWS_AS(ratio_instances(1, 2, 1, 1, 0), InputError);

  // Equal prices: the bound is 1 - 1/e.
  Instance flat({1.0}, {1.0}, {1.0, 2.0, 0.5}, {2.0, 2.0, 2.0}, {LinearConstraint::cardinality(3, 1)});
  CHECK(approximation_bound(flat) == Approx(0.6321).epsilon(1e-4));
}
