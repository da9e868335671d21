#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "assort/error.hpp"
#include "assort/model.hpp"
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

std::vector<double> real(const Assortment& x) { return {x.begin(), x.end()}; }

}  // namespace

TEST_CASE("T1 feasibility under a single cardinality row") {
  const auto t1 = fixtures::t1(1);
  CHECK(is_feasible(t1, X({1, 0})));
  CHECK_FALSE(is_feasible(t1, X({1, 1})));
  const auto free = fixtures::t1();
  for (std::uint64_t mask = 0; mask < 4; ++mask) CHECK(is_feasible(free, fixtures::bits(2, mask)));
  CHECK_THROWS_AS(is_feasible(t1, X({1})), InputError);
  CHECK_THROWS_AS(eval_revenue(t1, X({1, 0, 0})), InputError);
}

TEST_CASE("T1 revenue and minimisation form") {
  const auto raw = fixtures::t1_raw();
  const auto t1 = fixtures::build(raw);
  CHECK(eval_revenue(t1, X({0, 0})) == 0.0);
  CHECK(eval_revenue(t1, X({1, 0})) == Approx(fixtures::naive_revenue(raw, X({1, 0}))).epsilon(1e-14));
  CHECK(eval_revenue(t1, X({1, 0})) == Approx(1.0).epsilon(1e-14));
  CHECK(eval_revenue(t1, X({1, 1})) == Approx(1.0).epsilon(1e-14));
  CHECK(eval_min_objective(t1, X({1, 0})) == Approx(1.0).epsilon(1e-14));
  CHECK(eval_min_objective(t1, X({0, 0})) == Approx(2.0).epsilon(1e-14));
  CHECK(t1.revenue_constant() == Approx(2.0));
  CHECK(t1.r_max(0) == 2.0);
  CHECK(t1.r_shift(0, 1) == 1.0);
  CHECK(t1.r_shift(0, 0) == 0.0);
}

TEST_CASE("T1 reciprocal attraction") {
  const auto t1 = fixtures::t1();
  CHECK(eval_phi(t1, 0, X({0, 0})) == Approx(1.0));
  CHECK(eval_phi(t1, 0, X({1, 0})) == Approx(0.5));
  CHECK(eval_phi(t1, 0, X({1, 1})) == Approx(0.2));
  CHECK(eval_psi(t1, 1, X({1, 1})) == Approx(6.0));
  const std::vector<double> half = {0.5, 0.5};
  CHECK(eval_phi(t1, 0, std::span<const double>(half)) == Approx(1.0 / 3.0));
}

TEST_CASE("F + G equals the revenue constant on random instances") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto raw = fixtures::random_raw(rng, 1 + int(rng() % 6), 1 + int(rng() % 8), fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    for (int k = 0; k < 10; ++k) {
      const auto x = fixtures::bits(raw.m, rng());
      const double f = eval_revenue(inst, x);
      CHECK(f == Approx(fixtures::naive_revenue(raw, x)).epsilon(1e-12));
      CHECK(f + eval_min_objective(inst, x) == Approx(inst.revenue_constant()).epsilon(1e-10));
    }
  }
}

TEST_CASE("Phi is monotone, supermodular and convex") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 6;
    const auto raw = fixtures::random_raw(rng, 2, m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    for (int i = 0; i < raw.n; ++i) {
      for (int k = 0; k < 30; ++k) {
        const std::uint64_t b = rng() & 63u, a = b & rng();  // A subset of B
        const auto A = fixtures::bits(m, a), B = fixtures::bits(m, b);
        CHECK(eval_phi(inst, i, A) >= eval_phi(inst, i, B) - 1e-15);
        for (int j = 0; j < m; ++j) {
          if (B[std::size_t(j)]) continue;
          auto Aj = A, Bj = B;
          Aj[std::size_t(j)] = Bj[std::size_t(j)] = 1;
          const double gain_a = eval_phi(inst, i, A) - eval_phi(inst, i, Aj);
          const double gain_b = eval_phi(inst, i, B) - eval_phi(inst, i, Bj);
          CHECK(gain_a >= gain_b - 1e-12);
        }
        const auto xa = real(A), xb = real(B);
        for (double lam : {0.25, 0.5, 0.75}) {
          std::vector<double> mix(static_cast<std::size_t>(m));
          for (int j = 0; j < m; ++j) mix[std::size_t(j)] = lam * xa[std::size_t(j)] + (1 - lam) * xb[std::size_t(j)];
          CHECK(fixtures::naive_phi(raw, i, mix) <= lam * eval_phi(inst, i, A) + (1 - lam) * eval_phi(inst, i, B) + 1e-12);
          CHECK(eval_phi(inst, i, std::span<const double>(mix)) == Approx(fixtures::naive_phi(raw, i, mix)).epsilon(1e-14));
        }
      }
    }
  }
}

TEST_CASE("instance validation rejects bad data") {
  CHECK_THROWS_AS(Instance({1.0}, {0.0}, {1.0}, {1.0}), InputError);      // v0 = 0
  CHECK_THROWS_AS(Instance({0.0}, {1.0}, {1.0}, {1.0}), InputError);      // rho sums to 0
  CHECK_THROWS_AS(Instance({-1.0, 2.0}, {1, 1}, {1, 1}, {1, 1}), InputError);
  CHECK_THROWS_AS(Instance({1.0}, {1.0}, {-1.0}, {1.0}), InputError);
  CHECK_THROWS_AS(Instance({1.0}, {1.0}, {1.0, 1.0}, {1.0}), InputError);
  CHECK_THROWS_AS(Instance({1.0}, {1.0}, {1.0}, {1.0}, {{{1.0}, 0.0}}), InputError);
  CHECK_THROWS_AS(Instance({1.0}, {1.0}, {1.0}, {1.0}, {{{1.0, 1.0}, 1.0}}), InputError);
  CHECK_NOTHROW(Instance({1.0}, {1.0}, {}, {}));
}

TEST_CASE("JSON round trip, shorthand and unknown keys") {
  const auto t1 = fixtures::t1(1);
  const auto doc = instance_to_json(t1);
  const auto back = instance_from_json(doc);
  CHECK(instance_to_json(back) == doc);
  CHECK(back.single_cardinality() == 1.0);

  auto shorthand = nlohmann::json::parse(
      R"({"n":2,"m":2,"rho":[0.5,0.5],"v0":[1,2],"v":[[1,3],[2,2]],"r":[[2,1],[2,1]],"constraints":[{"cardinality":1}]})");
  const auto inst = instance_from_json(shorthand);
  REQUIRE(inst.constraints().size() == 1);
  CHECK(inst.constraints()[0].is_cardinality());
  CHECK(inst.constraints()[0].alpha == 1.0);

  auto extra = shorthand;
  extra["comment"] = "x";
  CHECK_THROWS_AS(instance_from_json(extra), InputError);
  auto bad_c = shorthand;
  bad_c["constraints"][0]["weight"] = 2;
  CHECK_THROWS_AS(instance_from_json(bad_c), InputError);
  auto short_row = shorthand;
  short_row["v"][1] = nlohmann::json::array({1});
  CHECK_THROWS_AS(instance_from_json(short_row), InputError);
}

TEST_CASE("rho is kept as given unless normalisation is requested") {
  auto doc = instance_to_json(fixtures::t1());
  doc["rho"] = {0.5, 1.5};
  CHECK(instance_from_json(doc).rho(1) == 1.5);
  const auto norm = instance_from_json(doc, {true});
  CHECK(norm.rho(0) == Approx(0.25));
  CHECK(norm.rho(1) == Approx(0.75));
}

TEST_CASE("saved files are byte-identical for identical instances") {
  const auto dir = std::filesystem::temp_directory_path() / "assort_model_test";
  std::filesystem::create_directories(dir);
  std::mt19937_64 a(5), b(5);
  const auto ia = fixtures::build(fixtures::random_raw(a, 3, 4, fixtures::Scheme::General));
  const auto ib = fixtures::build(fixtures::random_raw(b, 3, 4, fixtures::Scheme::General));
  save_instance(ia, dir / "a.json");
  save_instance(ib, dir / "b.json");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const auto back = load_instance(dir / "a.json");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) CHECK(back.v(i, j) == ia.v(i, j));
  std::filesystem::remove_all(dir);
}

TEST_CASE("subset conversion") {
  const std::vector<int> s = {0, 3};
  const auto x = assortment_from_subset(4, s);
  CHECK(x == X({1, 0, 0, 1}));
  CHECK(subset_from_assortment(x) == s);
  const std::vector<int> bad = {4};
  CHECK_THROWS_AS(assortment_from_subset(4, bad), InputError);
}

TEST_CASE("unit revenue matches the all-ones price instance") {
  std::mt19937_64 rng(13);
  auto raw = fixtures::random_raw(rng, 3, 5, fixtures::Scheme::None);
  const auto inst = fixtures::build(raw);
  std::fill(raw.r.begin(), raw.r.end(), 1.0);
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    const auto x = fixtures::bits(5, mask);
    CHECK(eval_unit_revenue(inst, x) == Approx(fixtures::naive_revenue(raw, x)).epsilon(1e-13));
  }
}
