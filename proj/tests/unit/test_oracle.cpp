#include <random>
#include <string>

#include "assort/error.hpp"
#include "assort/oracle.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace assort;
using doctest::Approx;

TEST_CASE("T1 brute force") {
  for (auto cap : {std::optional<double>{}, std::optional<double>{1.0}}) {
    const auto res = brute_force(fixtures::t1(cap));
    CHECK(res.status == SolveStatus::Optimal);
    CHECK(res.objective == Approx(1.0));
    CHECK(res.x == Assortment{1, 0});
    CHECK(res.gap == 0.0);
  }
}

TEST_CASE("no products") {
  const Instance empty({1.0}, {1.0}, {}, {});
  const auto res = brute_force(empty);
  CHECK(res.objective == 0.0);
  CHECK(res.x.empty());
  CHECK(res.status == SolveStatus::Optimal);
}

TEST_CASE("guard on the product count") {
  std::mt19937_64 rng(71);
  const auto inst = fixtures::build(fixtures::random_raw(rng, 1, kBruteForceMaxProducts + 1, fixtures::Scheme::None));
  try {
    brute_force(inst);
    FAIL("expected a refusal");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("refuses") != std::string::npos);
  }
}

TEST_CASE("ties go to the lexicographically smallest vector") {
  fixtures::Raw raw{1, 3, {1.0}, {1.0}, {1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}, {{1.0, 1.0, 1.0}}, {1.0}};
  const auto res = brute_force(fixtures::build(raw));
  CHECK(res.x == Assortment{0, 0, 1});
  CHECK(res.x == fixtures::naive_optimum(raw).x);
}

TEST_CASE("brute force equals the naive loop for any thread count") {
  std::mt19937_64 rng(72);
  for (int rep = 0; rep < 20; ++rep) {
    const auto raw = fixtures::random_raw(rng, 1 + int(rng() % 4), 1 + int(rng() % 12), static_cast<fixtures::Scheme>(rep % 4));
    const auto inst = fixtures::build(raw);
    const auto naive = fixtures::naive_optimum(raw);
    for (int threads : {1, 3}) {
      const auto res = brute_force(inst, threads);
      CHECK(res.x == naive.x);
      CHECK(res.objective == Approx(naive.value).epsilon(1e-12));
    }
  }
}
