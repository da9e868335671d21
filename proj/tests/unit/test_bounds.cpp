#include <cmath>
#include <random>

#include "assort/bounds.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace assort;
using doctest::Approx;

namespace {

// min Phi_i over feasible x with x_j = b, by enumeration; nullopt if none.
std::optional<double> naive_bound(const fixtures::Raw& raw, int i, int j, int b) {
  std::optional<double> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << raw.m); ++mask) {
    const auto x = fixtures::bits(raw.m, mask);
    if (x[std::size_t(j)] != b || !fixtures::naive_feasible(raw, x)) continue;
    const std::vector<double> xr(x.begin(), x.end());
    const double phi = fixtures::naive_phi(raw, i, xr);
    if (!best || phi < *best) best = phi;
  }
  return best;
}

}  // namespace

TEST_CASE("T1 conditional bounds with C = 1") {
  const auto t1 = fixtures::t1(1);
  CHECK(*conditional_bound(t1, 0, 0, 1, BoundMode::Exact) == Approx(0.5));
  CHECK(*conditional_bound(t1, 0, 0, 0, BoundMode::Exact) == Approx(0.25));
  const auto table = build_bound_table(t1);
  CHECK(table.mode == BoundMode::Exact);
  CHECK(table.phi(0, 0, 1) == Approx(0.5));
  CHECK(table.phi(0, 0, 0) == Approx(0.25));
  const auto raw = fixtures::t1_raw(1);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int b = 0; b < 2; ++b) CHECK(table.phi(i, j, b) == Approx(*naive_bound(raw, i, j, b)).epsilon(1e-14));
}

TEST_CASE("unconstrained b = 0 bound takes every other product") {
  std::mt19937_64 rng(21);
  const auto raw = fixtures::random_raw(rng, 3, 5, fixtures::Scheme::None);
  const auto inst = fixtures::build(raw);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) {
      double others = 0.0;
      for (int k = 0; k < 5; ++k)
        if (k != j) others += raw.v[std::size_t(i * 5 + k)];
      CHECK(*conditional_bound(inst, i, j, 0, BoundMode::Exact) == Approx(1.0 / (raw.v0[std::size_t(i)] + others)));
    }
}

TEST_CASE("exact bounds equal enumeration; relaxed bounds stay below") {
  std::mt19937_64 rng(22);
  for (auto scheme : {fixtures::Scheme::Cardinality, fixtures::Scheme::General, fixtures::Scheme::Subsets}) {
    for (int rep = 0; rep < 6; ++rep) {
      const int m = 4 + int(rng() % 9);  // up to 12
      const auto raw = fixtures::random_raw(rng, 2, m, scheme);
      const auto inst = fixtures::build(raw);
      const auto exact = build_bound_table(inst, BoundMode::Exact);
      const auto relaxed = build_bound_table(inst, BoundMode::Relaxed);
      for (int i = 0; i < raw.n; ++i) {
        const double cap1 = 1.0 / raw.v0[std::size_t(i)];
        for (int j = 0; j < m; ++j) {
          const double ub1 = 1.0 / (raw.v0[std::size_t(i)] + raw.v[std::size_t(i * m + j)]);
          for (int b = 0; b < 2; ++b) {
            const auto truth = naive_bound(raw, i, j, b);
            if (b == 1 && !truth) {
              CHECK(exact.forced_zero[std::size_t(j)] == 1);
              continue;
            }
            REQUIRE(truth);
            CHECK(exact.phi(i, j, b) == Approx(*truth).epsilon(1e-9));
            CHECK(relaxed.phi(i, j, b) <= exact.phi(i, j, b) + 1e-12);
            CHECK(relaxed.phi(i, j, b) > 0.0);
            CHECK(exact.phi(i, j, b) <= cap1 + 1e-15);
          }
          CHECK(exact.phi(i, j, 1) <= ub1 + 1e-12);
          CHECK(relaxed.phi(i, j, 1) <= ub1 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("bounds never exceed Phi at any feasible point") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const int m = 8 + int(rng() % 5);
    const auto raw = fixtures::random_raw(rng, 3, m, rep % 2 ? fixtures::Scheme::General : fixtures::Scheme::Subsets);
    const auto inst = fixtures::build(raw);
    for (auto mode : {BoundMode::Auto, BoundMode::Relaxed}) {
      const auto table = build_bound_table(inst, mode);
      for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
        const auto x = fixtures::bits(m, mask);
        if (!fixtures::naive_feasible(raw, x)) continue;
        const std::vector<double> xr(x.begin(), x.end());
        for (int i = 0; i < raw.n; ++i) {
          const double phi = fixtures::naive_phi(raw, i, xr);
          for (int j = 0; j < m; ++j) CHECK(table.phi(i, j, x[std::size_t(j)]) <= phi + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("a product that cannot fit is conditionally infeasible") {
  fixtures::Raw raw{1, 2, {1.0}, {1.0}, {1.0, 1.0}, {1.0, 1.0}, {{2.0, 0.5}}, {1.0}};
  const auto inst = fixtures::build(raw);
  CHECK_FALSE(conditional_bound(inst, 0, 0, 1, BoundMode::Exact).has_value());
  CHECK_FALSE(conditional_bound(inst, 0, 0, 1, BoundMode::Relaxed).has_value());
  CHECK(*conditional_bound(inst, 0, 0, 0, BoundMode::Exact) == Approx(0.5));
  const auto table = build_bound_table(inst);
  CHECK(table.forced_zero[0] == 1);
  CHECK(table.forced_zero[1] == 0);
}
