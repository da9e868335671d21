#include <random>

#include "assort/kernels.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace assort;
using doctest::Approx;

namespace {

void check_same(const std::vector<Cut>& a, const std::vector<Cut>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].target == b[k].target);
    CHECK(a[k].kind == b[k].kind);
    CHECK(a[k].a == b[k].a);
    CHECK(a[k].b == b[k].b);
  }
}

}  // namespace

TEST_CASE("parallel enumeration equals the serial reference and the naive loop") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 15; ++rep) {
    const int m = 1 + int(rng() % 14);
    const auto scheme = static_cast<fixtures::Scheme>(rep % 4);
    const auto raw = fixtures::random_raw(rng, 1 + int(rng() % 5), m, scheme);
    const auto inst = fixtures::build(raw);
    const auto ref = kernels::serial::enumerate(inst);
    const auto naive = fixtures::naive_optimum(raw);
    CHECK(ref.best == naive.x);
    CHECK(ref.best_value == Approx(naive.value).epsilon(1e-12));
    CHECK(ref.feasible == std::uint64_t(naive.feasible));
    CHECK(ref.visited == (std::uint64_t(1) << m));
    for (int threads : {1, 2, 3, 8}) {
      const auto par = kernels::omp::enumerate(inst, threads);
      CHECK(par.best == ref.best);
      CHECK(par.best_value == ref.best_value);
      CHECK(par.visited == ref.visited);
      CHECK(par.feasible == ref.feasible);
    }
  }
}

TEST_CASE("parallel cut generation, bounds and phi equal the serial reference") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 1 + int(rng() % 30), m = 1 + int(rng() % 20);
    const auto inst = fixtures::build(fixtures::random_raw(rng, n, m, fixtures::Scheme::None));
    const auto x = fixtures::bits(m, rng());
    for (auto kinds : {CutKinds::oa_only(), CutKinds::oa_sc()})
      for (int threads : {1, 4}) check_same(kernels::serial::all_class_cuts(inst, x, kinds),
                                            kernels::omp::all_class_cuts(inst, x, kinds, threads));
    CHECK(kernels::serial::phi_all(inst, x) == kernels::omp::phi_all(inst, x, 3));
    for (long cap : {-1L, 0L, 1L, long(m / 2), long(m)}) {
      const auto s = kernels::serial::cardinality_bounds(inst, cap);
      const auto p = kernels::omp::cardinality_bounds(inst, cap, 4);
      CHECK(s.phi0 == p.phi0);
      CHECK(s.phi1 == p.phi1);
    }
  }
}

TEST_CASE("serial phi_all matches the direct formula") {
  std::mt19937_64 rng(43);
  const auto raw = fixtures::random_raw(rng, 6, 9, fixtures::Scheme::None);
  const auto inst = fixtures::build(raw);
  const auto x = fixtures::bits(9, 0x155);
  const auto phi = kernels::serial::phi_all(inst, x);
  for (int i = 0; i < 6; ++i)
    CHECK(phi[std::size_t(i)] == Approx(fixtures::naive_phi(raw, i, std::vector<double>(x.begin(), x.end()))));
}
