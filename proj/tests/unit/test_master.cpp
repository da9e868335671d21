#include <algorithm>
#include <filesystem>
#include <random>

#include "assort/error.hpp"
#include "assort/highs_backend.hpp"
#include "assort/kernels.hpp"
#include "assort/master.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace assort;
using doctest::Approx;

namespace {

double min_g(const fixtures::Raw& raw) {
  double rc = 0.0;
  for (int i = 0; i < raw.n; ++i) {
    double rmax = 0.0;
    for (int j = 0; j < raw.m; ++j) rmax = std::max(rmax, raw.r[std::size_t(i * raw.m + j)]);
    rc += raw.rho[std::size_t(i)] * rmax;
  }
  return rc - fixtures::naive_optimum(raw).value;
}

void add_all_cuts(MasterModel& model, const Instance& inst, const fixtures::Raw& raw, CutKinds kinds) {
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << raw.m); ++mask) {
    const auto x = fixtures::bits(raw.m, mask);
    if (!fixtures::naive_feasible(raw, x)) continue;
    for (const auto& cut : kernels::serial::all_class_cuts(inst, x, kinds)) model.add_cut(cut);
  }
}

class NoLazyBackend : public SolverBackend {
 public:
  std::string name() const override { return "plain"; }
  Capabilities capabilities() const override { return {true, false, false}; }
  MasterSolution solve(const MasterModel& model, const SolveLimits& limits) const override {
    return HighsBackend().solve(model, limits);
  }
};

class NoMilpBackend : public NoLazyBackend {
 public:
  Capabilities capabilities() const override { return {false, false, false}; }
};

}  // namespace

TEST_CASE("T1 linear master dimensions") {
  HighsBackend highs;
  const auto t1 = fixtures::t1();
  const auto model = build_li_master(t1, build_bound_table(t1), highs);
  const auto size = model_size(model);
  CHECK(size.binary == 2);
  CHECK(size.continuous == 6);
  CHECK(model.rows().size() == 16);
  CHECK(model.cut_count() == 0);
  CHECK(model.is_linear());
  const auto capped = fixtures::t1(1);
  CHECK(build_li_master(capped, build_bound_table(capped), highs).rows().size() == 17);
  CHECK(build_li_master(t1, build_bound_table(t1), highs, true).rows().size() == 18);
}

TEST_CASE("linear master without cuts matches the hand-solved relaxation") {
  // With binary x fixed, theta_ij = x_j y_i and every y_i sits at the largest
  // conditional bound its McCormick rows impose.
  HighsBackend highs;
  std::mt19937_64 rng(51);
  for (int rep = 0; rep < 8; ++rep) {
    const auto raw = rep == 0 ? fixtures::t1_raw() : fixtures::random_raw(rng, 2, 4, fixtures::Scheme::Cardinality);
    const auto inst = fixtures::build(raw);
    const auto bounds = build_bound_table(inst);
    double hand = kInf;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << raw.m); ++mask) {
      const auto x = fixtures::bits(raw.m, mask);
      if (!fixtures::naive_feasible(raw, x)) continue;
      double value = 0.0;
      bool ok = true;
      for (int i = 0; i < raw.n; ++i) {
        double lo = 0.0, hi = 1.0 / raw.v0[std::size_t(i)];
        for (int j = 0; j < raw.m; ++j) {
          lo = std::max(lo, bounds.phi(i, j, x[std::size_t(j)]));
          if (x[std::size_t(j)]) hi = std::min(hi, 1.0 / (raw.v0[std::size_t(i)] + raw.v[std::size_t(i * raw.m + j)]));
        }
        if (lo > hi + 1e-12) ok = false;
        double w = inst.rho(i) * inst.r_max(i) * inst.v0(i);
        for (int j = 0; j < raw.m; ++j)
          if (x[std::size_t(j)]) w += inst.rho(i) * inst.r_shift(i, j) * inst.v(i, j);
        value += w * lo;
      }
      if (ok) hand = std::min(hand, value);
    }
    const auto sol = highs.solve(build_li_master(inst, bounds, highs), {});
    REQUIRE(sol.status == MasterStatus::Optimal);
    CHECK(sol.objective == Approx(hand).epsilon(1e-7));
    CHECK(sol.bound <= min_g(raw) + 1e-9);
  }
}

TEST_CASE("all cuts at every feasible point make the master exact") {
  HighsBackend highs;
  EnumerationBackend enumerate;
  const auto raw = fixtures::t1_raw();
  const auto t1 = fixtures::build(raw);
  auto li = build_li_master(t1, build_bound_table(t1), highs);
  add_all_cuts(li, t1, raw, CutKinds::oa_only());
  CHECK(highs.solve(li, {}).objective == Approx(1.0).epsilon(1e-7));
  auto bi = build_bi_master(t1, enumerate);
  CHECK_FALSE(bi.is_linear());
  add_all_cuts(bi, t1, raw, CutKinds::oa_only());
  CHECK(enumerate.solve(bi, {}).objective == Approx(1.0).epsilon(1e-7));

  std::mt19937_64 rng(52);
  for (int rep = 0; rep < 12; ++rep) {
    const auto r = fixtures::random_raw(rng, 1 + int(rng() % 4), 3 + int(rng() % 8), static_cast<fixtures::Scheme>(rep % 4));
    const auto inst = fixtures::build(r);
    const double truth = min_g(r);
    auto model = build_li_master(inst, build_bound_table(inst), highs);
    add_all_cuts(model, inst, r, CutKinds::oa_only());
    const auto sol = highs.solve(model, {});
    REQUIRE(sol.status == MasterStatus::Optimal);
    CHECK(sol.objective == Approx(truth).epsilon(1e-6));
    CHECK(eval_min_objective(inst, sol.x) == Approx(truth).epsilon(1e-6));
    if (r.m <= 8) {
      auto bm = build_bi_master(inst, enumerate);
      add_all_cuts(bm, inst, r, CutKinds::oa_sc());
      CHECK(enumerate.solve(bm, {}).objective == Approx(truth).epsilon(1e-6));
    }
  }
}

TEST_CASE("lifted points evaluate to G in every master") {
  HighsBackend highs;
  EnumerationBackend enumerate;
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 1 + int(rng() % 6), m = 1 + int(rng() % 6);
    const auto raw = fixtures::random_raw(rng, n, m, fixtures::Scheme::None);
    const auto inst = fixtures::build(raw);
    const auto bounds = build_bound_table(inst);
    const auto part = SegmentPartition::contiguous(n, 1 + int(rng() % std::uint64_t(n)));
    const auto x = fixtures::bits(m, rng());
    const double g = eval_min_objective(inst, x);
    std::vector<MasterModel> models;
    models.push_back(build_li_master(inst, bounds, highs));
    models.push_back(build_bi_master(inst, enumerate));
    models.push_back(build_li_master_sb(inst, part, bounds, highs));
    models.push_back(build_bi_master_sb(inst, part, enumerate));
    models.push_back(build_milp_baseline(inst, bounds, Linearization::McCormick, highs));
    models.push_back(build_milp_baseline(inst, bounds, Linearization::BigM, highs));
    for (const auto& model : models) {
      const bool segmented = model.kind() == MasterKind::LiSegment || model.kind() == MasterKind::BiSegment;
      const auto point = lift_point(model, inst, segmented ? &part : nullptr, x);
      CHECK(model.objective_value(point) == Approx(g).epsilon(1e-12));
      // The lifted point satisfies every row and column bound.
      for (std::size_t c = 0; c < point.size(); ++c) {
        CHECK(point[c] >= model.columns()[c].lower - 1e-12);
        CHECK(point[c] <= model.columns()[c].upper + 1e-12);
      }
      for (const auto& row : model.rows()) {
        double s = 0.0;
        for (std::size_t k = 0; k < row.index.size(); ++k) s += row.value[k] * point[std::size_t(row.index[k])];
        for (const auto& t : row.bilinear) s += t.coef * point[std::size_t(t.a)] * point[std::size_t(t.b)];
        CHECK(s >= row.lower - 1e-12);
        CHECK(s <= row.upper + 1e-12);
      }
    }
  }
}

TEST_CASE("segment master dimensions") {
  HighsBackend highs;
  const auto t1 = fixtures::t1();
  const auto part = SegmentPartition::contiguous(2, 1);
  const auto sb = build_li_master_sb(t1, part, build_bound_table(t1), highs);
  CHECK(sb.eta(0, 0) >= 0);
  CHECK(sb.eta(0, 1) >= 0);
  CHECK(sb.y(0) == -1);
  CHECK(model_size(sb).continuous == 2 + 1 + 2);

  std::mt19937_64 rng(54);
  const int n = 1000, m = 3, L = 20;
  const auto inst = fixtures::build(fixtures::random_raw(rng, n, m, fixtures::Scheme::Cardinality));
  const auto bounds = build_bound_table(inst);
  const auto per_class = model_size(build_li_master(inst, bounds, highs));
  const auto grouped = model_size(build_li_master_sb(inst, SegmentPartition::contiguous(n, L), bounds, highs));
  CHECK(per_class.binary == m);
  CHECK(per_class.continuous == n + n * m);
  CHECK(grouped.binary == m);
  CHECK(grouped.continuous == L * m + L + L * m);
}

TEST_CASE("capability gates") {
  HighsBackend highs;
  const auto t1 = fixtures::t1();
  try {
    build_bi_master(t1, highs);
    FAIL("expected bilinear-unsupported");
  } catch (const UnsupportedError& e) {
    CHECK(e.code() == "bilinear-unsupported");
  }
  CHECK_THROWS_AS(build_bi_master_sb(t1, SegmentPartition::contiguous(2, 1), highs), UnsupportedError);
  NoMilpBackend no_milp;
  try {
    build_li_master(t1, build_bound_table(t1), no_milp);
    FAIL("expected milp-unsupported");
  } catch (const UnsupportedError& e) {
    CHECK(e.code() == "milp-unsupported");
  }
  NoLazyBackend no_lazy;
  struct Accept : LazySeparator {
    std::vector<Cut> separate(std::span<const double>, bool) override { return {}; }
  } accept;
  const auto model = build_li_master(t1, build_bound_table(t1), no_lazy);
  try {
    no_lazy.solve_lazy(model, accept, {});
    FAIL("expected lazy-unsupported");
  } catch (const UnsupportedError& e) {
    CHECK(e.code() == "lazy-unsupported");
  }
}

TEST_CASE("McCormick and big-M baselines agree; McCormick relaxes tighter") {
  HighsBackend highs;
  std::mt19937_64 rng(55);
  const auto t1 = fixtures::t1(1);
  const auto sol = highs.solve(build_milp_baseline(t1, build_bound_table(t1), Linearization::McCormick, highs), {});
  CHECK(sol.objective == Approx(min_g(fixtures::t1_raw(1))));
  CHECK(sol.objective == Approx(1.0));
  for (int rep = 0; rep < 20; ++rep) {
    const auto raw = fixtures::random_raw(rng, 1 + int(rng() % 5), 2 + int(rng() % 9), static_cast<fixtures::Scheme>(rep % 4));
    const auto inst = fixtures::build(raw);
    const auto bounds = build_bound_table(inst);
    const auto mc = build_milp_baseline(inst, bounds, Linearization::McCormick, highs);
    const auto bm = build_milp_baseline(inst, bounds, Linearization::BigM, highs);
    const auto smc = highs.solve(mc, {}), sbm = highs.solve(bm, {});
    REQUIRE(smc.status == MasterStatus::Optimal);
    REQUIRE(sbm.status == MasterStatus::Optimal);
    const double truth = min_g(raw);
    CHECK(smc.objective == Approx(truth).epsilon(1e-6));
    CHECK(sbm.objective == Approx(truth).epsilon(1e-6));
    SolveLimits relax;
    relax.relax_integrality = true;
    const auto lmc = highs.solve(mc, relax), lbm = highs.solve(bm, relax);
    CHECK(lmc.objective >= lbm.objective - 1e-9);
    CHECK(lmc.objective <= truth + 1e-9);
  }
}

TEST_CASE("cuts only raise the master optimum; duplicates change nothing") {
  HighsBackend highs;
  std::mt19937_64 rng(56);
  for (int rep = 0; rep < 5; ++rep) {
    const auto raw = fixtures::random_raw(rng, 3, 7, fixtures::Scheme::Cardinality);
    const auto inst = fixtures::build(raw);
    auto model = build_li_master(inst, build_bound_table(inst), highs);
    double last = highs.solve(model, {}).objective;
    const double truth = min_g(raw);
    CHECK(last <= truth + 1e-9);
    for (int k = 0; k < 15; ++k) {
      const auto x = fixtures::bits(7, rng());
      if (!fixtures::naive_feasible(raw, x)) continue;
      for (const auto& cut : kernels::serial::all_class_cuts(inst, x, CutKinds::oa_sc())) model.add_cut(cut);
      const double now = highs.solve(model, {}).objective;
      CHECK(now >= last - 1e-8 * std::max(1.0, std::abs(last)));
      CHECK(now <= truth + 1e-8);
      last = now;
    }
    const auto before = highs.solve(model, {});
    const auto dup = kernels::serial::all_class_cuts(inst, before.x, CutKinds::oa_only());
    for (const auto& cut : dup) model.add_cut(cut);
    const double mid = highs.solve(model, {}).objective;
    for (const auto& cut : dup) model.add_cut(cut);
    CHECK(highs.solve(model, {}).objective == Approx(mid).epsilon(1e-9));
  }
}

TEST_CASE("cut rows bound the right column") {
  HighsBackend highs;
  const auto t1 = fixtures::t1();
  auto model = build_li_master(t1, build_bound_table(t1), highs);
  const Assortment zero = {0, 0};
  const auto cut = oa_cut(t1, 1, zero);
  const auto row = model.cut_row(cut);
  CHECK(row.index.front() == model.y(1));
  CHECK(row.lower == cut.b);
  model.add_cut(cut);
  CHECK(model.cut_count() == 1);
  CHECK_THROWS_AS(model.add_cut(segment_cuts(t1, SegmentPartition::contiguous(2, 1), zero, CutKinds::oa_only()).front()),
                  InputError);
}

TEST_CASE("status names and model dump") {
  CHECK(std::string(to_string(MasterStatus::Optimal)) == "optimal");
  CHECK(std::string(to_string(MasterStatus::FeasibleLimit)) == "feasible-limit");
  CHECK(std::string(to_string(MasterStatus::Infeasible)) == "infeasible");
  CHECK(std::string(to_string(MasterStatus::Error)) == "error");
  HighsBackend highs;
  const auto t1 = fixtures::t1();
  const auto path = std::filesystem::temp_directory_path() / "assort_dump_test.lp";
  std::filesystem::remove(path);
  SolveLimits limits;
  limits.dump_path = path;
  highs.solve(build_li_master(t1, build_bound_table(t1), highs), limits);
  CHECK(std::filesystem::exists(path));
  std::filesystem::remove(path);
}

TEST_CASE("enumeration backend refuses large models") {
  EnumerationBackend enumerate;
  std::mt19937_64 rng(57);
  const auto inst = fixtures::build(fixtures::random_raw(rng, 1, EnumerationBackend::kMaxBinaries + 1, fixtures::Scheme::None));
  CHECK_THROWS(enumerate.solve(build_bi_master(inst, enumerate), {}));
}

TEST_CASE("lazy solves accept candidates the separator accepts") {
  HighsBackend highs;
  EnumerationBackend enumerate;
  const auto t1 = fixtures::t1();
  struct Count : LazySeparator {
    int calls = 0;
    std::vector<Cut> separate(std::span<const double>, bool) override {
      ++calls;
      return {};
    }
  };
  for (const SolverBackend* backend : {static_cast<const SolverBackend*>(&highs), static_cast<const SolverBackend*>(&enumerate)}) {
    Count sep;
    const auto model = build_milp_baseline(t1, build_bound_table(t1), Linearization::McCormick, *backend);
    const auto lazy = backend->solve_lazy(model, sep, {});
    const auto plain = backend->solve(model, {});
    CHECK(sep.calls > 0);
    CHECK(lazy.lazy_cuts == 0);
    CHECK(lazy.objective == Approx(plain.objective));
  }
}
