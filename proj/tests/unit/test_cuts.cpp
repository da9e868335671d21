#include <algorithm>
#include <random>

#include "assort/cuts.hpp"
#include "assort/error.hpp"
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

double set_phi(const fixtures::Raw& raw, int i, const Assortment& x) {
  return fixtures::naive_phi(raw, i, std::vector<double>(x.begin(), x.end()));
}

Assortment with(Assortment x, int k, int b) {
  x[std::size_t(k)] = std::uint8_t(b);
  return x;
}

// The two supermodular bounds written directly as set-function
// inequalities: gains at xbar / removals at e, and gains at the empty set /
// removals at xbar. Returns (a, b) of y >= a^T x + b.
std::pair<std::vector<double>, double> naive_sc(const fixtures::Raw& raw, int i, const Assortment& xbar, bool first) {
  const int m = raw.m;
  const Assortment e(std::size_t(m), 1), empty(std::size_t(m), 0);
  std::vector<double> a(std::size_t(m), 0.0);
  double b = set_phi(raw, i, xbar);
  for (int k = 0; k < m; ++k) {
    if (xbar[std::size_t(k)]) {
      const double loss = first ? set_phi(raw, i, with(e, k, 0)) - set_phi(raw, i, e)
                                : set_phi(raw, i, with(xbar, k, 0)) - set_phi(raw, i, xbar);
      a[std::size_t(k)] = -loss;  // + loss * (1 - x_k)
      b += loss;
    } else {
      a[std::size_t(k)] = first ? set_phi(raw, i, with(xbar, k, 1)) - set_phi(raw, i, xbar)
                                : set_phi(raw, i, with(empty, k, 1)) - set_phi(raw, i, empty);
    }
  }
  return {a, b};
}

void check_coeffs(const Cut& cut, const std::vector<double>& a, double b, double tol = 1e-13) {
  REQUIRE(cut.a.size() == a.size());
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(cut.a[j] == Approx(a[j]).epsilon(tol).scale(1.0));
  CHECK(cut.b == Approx(b).epsilon(tol).scale(1.0));
}

const Cut& find(const std::vector<Cut>& cuts, CutTarget target, CutKind kind) {
  auto it = std::find_if(cuts.begin(), cuts.end(), [&](const Cut& c) { return c.target == target && c.kind == kind; });
  REQUIRE(it != cuts.end());
  return *it;
}

}  // namespace

TEST_CASE("T1 outer-approximation cuts") {
  const auto t1 = fixtures::t1();
  const auto c0 = oa_cut(t1, 0, X({0, 0}));
  check_coeffs(c0, {-1.0, -3.0}, 1.0);
  CHECK(c0.rhs(X({1, 0})) == Approx(0.0).scale(1.0));
  CHECK(c0.rhs(X({1, 0})) <= eval_phi(t1, 0, X({1, 0})));
  const auto c1 = oa_cut(t1, 0, X({1, 0}));
  check_coeffs(c1, {-0.25, -0.75}, 0.75);
  CHECK(c0.target == CutTarget::y(0));
  CHECK(c0.kind == CutKind::OA);
  CHECK(c1.origin == X({1, 0}));
}

TEST_CASE("T1 supermodular cuts") {
  const auto t1 = fixtures::t1();
  const auto a0 = sc_cut_a(t1, 0, X({0, 0}));
  check_coeffs(a0, {-0.5, -0.75}, 1.0);
  CHECK(a0.rhs(X({1, 0})) == Approx(0.5));
  CHECK(a0.rhs(X({1, 1})) == Approx(-0.25));

  const auto b1 = sc_cut_b(t1, 0, X({1, 1}));
  check_coeffs(b1, {-0.05, -0.3}, 0.55);
  CHECK(b1.rhs(X({1, 0})) == Approx(0.5));
  CHECK(b1.rhs(X({0, 0})) == Approx(0.55));

  const auto b0 = sc_cut_b(t1, 0, X({0, 0}));
  check_coeffs(b0, a0.a, a0.b);

  // At the full set the addition part vanishes: only removal terms remain.
  const auto ae = sc_cut_a(t1, 0, X({1, 1}));
  const auto raw = fixtures::t1_raw();
  const auto [na, nb] = naive_sc(raw, 0, X({1, 1}), true);
  check_coeffs(ae, na, nb);
  CHECK(ae.b == Approx(0.2 + (0.25 - 0.2) + (0.5 - 0.2)));
}

TEST_CASE("violation is rhs minus value") {
  const auto t1 = fixtures::t1();
  const auto c = oa_cut(t1, 0, X({0, 0}));
  const std::vector<double> origin = {0.0, 0.0};
  CHECK(violation(c, std::span<const double>(origin), 0.9) == Approx(0.1));
  CHECK(violation(c, X({0, 0}), 1.0) == Approx(0.0).scale(1.0));
  CHECK(violation(c, X({1, 0}), 0.5) <= 0.0);
}

TEST_CASE("cut coefficients match the set-function formulas") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    const int m = 1 + int(rng() % 8);
    const auto raw = fixtures::random_raw(rng, 2, m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    const auto xbar = fixtures::bits(m, rng());
    for (int i = 0; i < 2; ++i) {
      const double psi = 1.0 / set_phi(raw, i, xbar);
      std::vector<double> a(static_cast<std::size_t>(m));
      double b = 1.0 / psi;
      for (int j = 0; j < m; ++j) {
        const double vij = raw.v[std::size_t(i * m + j)];
        a[std::size_t(j)] = -vij / (psi * psi);
        b += vij / (psi * psi) * xbar[std::size_t(j)];
      }
      check_coeffs(oa_cut(inst, i, xbar), a, b, 1e-12);
      const auto [a1, b1] = naive_sc(raw, i, xbar, true);
      check_coeffs(sc_cut_a(inst, i, xbar), a1, b1, 1e-10);
      const auto [a2, b2] = naive_sc(raw, i, xbar, false);
      check_coeffs(sc_cut_b(inst, i, xbar), a2, b2, 1e-10);
    }
  }
}

TEST_CASE("every cut is valid everywhere and tight at its origin") {
  std::mt19937_64 rng(32);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const int m = 1 + int(rng() % 12);
    const auto raw = fixtures::random_raw(rng, 1 + int(rng() % 3), m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    const auto xbar = fixtures::bits(m, rng());
    const int i = int(rng() % std::uint64_t(raw.n));
    for (const auto& cut : class_cuts(inst, i, xbar, CutKinds::oa_sc())) {
      CHECK(cut.rhs(xbar) == Approx(set_phi(raw, i, xbar)).epsilon(1e-12).scale(1.0));
      for (int k = 0; k < 4; ++k) {
        const auto x = fixtures::bits(m, rng());
        CHECK(set_phi(raw, i, x) >= cut.rhs(x) - 1e-9);
        ++checked;
      }
    }
  }
  CHECK(checked == 300 * 3 * 4);
}

TEST_CASE("fractional OA cuts are valid on the cube") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 5;
    const auto raw = fixtures::random_raw(rng, 1, m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    std::vector<double> xbar(m), x(m);
    for (auto& v : xbar) v = u01(rng);
    const auto cut = oa_cut(inst, 0, std::span<const double>(xbar));
    CHECK(cut.rhs(std::span<const double>(xbar)) == Approx(fixtures::naive_phi(raw, 0, xbar)).epsilon(1e-12));
    for (int k = 0; k < 10; ++k) {
      for (auto& v : x) v = u01(rng);
      CHECK(fixtures::naive_phi(raw, 0, x) >= cut.rhs(std::span<const double>(x)) - 1e-12);
    }
  }
}

TEST_CASE("T1 aggregated cut over one group") {
  const auto t1 = fixtures::t1();
  const auto part = SegmentPartition::contiguous(2, 1);
  const auto cuts = segment_cuts(t1, part, X({0, 0}), CutKinds::oa_only());
  const auto& t = find(cuts, CutTarget::t(0), CutKind::OA);
  check_coeffs(t, {-2.0, -4.0}, 2.0);
  CHECK(t.rhs(X({0, 0})) == Approx(target_value(t1, &part, CutTarget::t(0), X({0, 0}))));
}

TEST_CASE("singleton groups reproduce weighted per-class cuts") {
  std::mt19937_64 rng(34);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + int(rng() % 4), m = 1 + int(rng() % 6);
    const auto raw = fixtures::random_raw(rng, n, m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    const auto part = SegmentPartition::contiguous(n, n);
    const auto xbar = fixtures::bits(m, rng());
    const auto cuts = segment_cuts(inst, part, xbar, CutKinds::oa_sc());
    for (int i = 0; i < n; ++i) {
      CHECK(part.members(i) == std::vector<int>{i});
      const auto per_class = class_cuts(inst, i, xbar, CutKinds::oa_sc());
      for (const auto& base : per_class) {
        double rmax = 0.0;
        for (int j = 0; j < m; ++j) rmax = std::max(rmax, raw.r[std::size_t(i * m + j)]);
        const double wt = raw.rho[std::size_t(i)] * rmax * raw.v0[std::size_t(i)];
        std::vector<double> scaled;
        for (double a : base.a) scaled.push_back(wt * a);
        check_coeffs(find(cuts, CutTarget::t(i), base.kind), scaled, wt * base.b, 1e-12);
        for (int j = 0; j < m; ++j) {
          const double wz =
              raw.rho[std::size_t(i)] * (rmax - raw.r[std::size_t(i * m + j)]) * raw.v[std::size_t(i * m + j)];
          const bool present = std::any_of(cuts.begin(), cuts.end(), [&](const Cut& c) {
            return c.target == CutTarget::z(i, j) && c.kind == base.kind;
          });
          CHECK(present == (wz != 0.0));
          if (!present) continue;
          std::vector<double> sz;
          for (double a : base.a) sz.push_back(wz * a);
          check_coeffs(find(cuts, CutTarget::z(i, j), base.kind), sz, wz * base.b, 1e-12);
        }
      }
    }
  }
}

TEST_CASE("aggregated cuts are valid and tight") {
  std::mt19937_64 rng(35);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + int(rng() % 6), m = 2 + int(rng() % 7);
    const auto raw = fixtures::random_raw(rng, n, m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    const int groups = 1 + int(rng() % std::uint64_t(n));
    const auto part = SegmentPartition::contiguous(n, groups);
    const auto xbar = fixtures::bits(m, rng());
    for (const auto& cut : segment_cuts(inst, part, xbar, CutKinds::oa_sc())) {
      // Independent value of the target from the raw data.
      auto truth = [&](const Assortment& x) {
        double s = 0.0;
        for (int i : part.members(cut.target.index)) {
          double rmax = 0.0;
          for (int j = 0; j < m; ++j) rmax = std::max(rmax, raw.r[std::size_t(i * m + j)]);
          const double w = cut.target.var == CutTarget::Var::T
                               ? raw.rho[std::size_t(i)] * rmax * raw.v0[std::size_t(i)]
                               : raw.rho[std::size_t(i)] * (rmax - raw.r[std::size_t(i * m + cut.target.product)]) *
                                     raw.v[std::size_t(i * m + cut.target.product)];
          s += w * set_phi(raw, i, x);
        }
        return s;
      };
      CHECK(target_value(inst, &part, cut.target, xbar) == Approx(truth(xbar)).epsilon(1e-12));
      CHECK(cut.rhs(xbar) == Approx(truth(xbar)).epsilon(1e-10).scale(1.0));
      for (int k = 0; k < 5; ++k) {
        const auto x = fixtures::bits(m, rng());
        CHECK(truth(x) >= cut.rhs(x) - 1e-9);
      }
    }
  }
}

TEST_CASE("contiguous partitions") {
  const auto p = SegmentPartition::contiguous(7, 3);
  CHECK(p.members(0) == std::vector<int>{0, 1, 2});
  CHECK(p.members(1) == std::vector<int>{3, 4});
  CHECK(p.members(2) == std::vector<int>{5, 6});
  CHECK_THROWS_AS(SegmentPartition::contiguous(3, 4), InputError);
  CHECK_THROWS_AS(SegmentPartition::contiguous(3, 0), InputError);
  CHECK_THROWS_AS(SegmentPartition(2, {0, 0}), InputError);
  CHECK_THROWS_AS(SegmentPartition(2, {0, 2}), InputError);
}
