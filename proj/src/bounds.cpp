#include "assort/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "assort/error.hpp"
#include "assort/kernels.hpp"
#include "highs_util.hpp"

namespace assort {

const char* to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::Exact: return "exact";
    case BoundMode::Relaxed: return "relaxed";
    case BoundMode::Auto: return "auto";
  }
  return "?";
}

namespace {

// Effective capacity of a cardinality-only instance; -1 when unconstrained.
long effective_capacity(const Instance& inst) {
  long cap = -1;
  for (const auto& c : inst.constraints()) {
    const long k = long(std::floor(c.alpha + 1e-9));
    cap = cap < 0 ? k : std::min(cap, k);
  }
  return cap;
}

BoundMode resolve(const Instance& inst, BoundMode mode) {
  if (mode != BoundMode::Auto) return mode;
  return inst.cardinality_only() ? BoundMode::Exact : BoundMode::Relaxed;
}

}  // namespace

std::optional<double> conditional_bound(const Instance& inst, int i, int j, int b, BoundMode mode) {
  if (i < 0 || i >= inst.classes() || j < 0 || j >= inst.products() || (b != 0 && b != 1))
    throw InputError("conditional bound index out of range");
  mode = resolve(inst, mode);
  auto v = inst.v_row(i);

  if (inst.cardinality_only()) {
    // A sort is exact here, and the LP relaxation of a cardinality
    // polytope with integral capacity has the same optimum.
    const long cap = effective_capacity(inst);
    if (b == 1 && cap == 0) return std::nullopt;
    std::vector<double> others;
    for (int k = 0; k < inst.products(); ++k)
      if (k != j) others.push_back(v[k]);
    std::sort(others.begin(), others.end(), std::greater<>());
    long take = cap < 0 ? long(others.size()) : cap - b;
    take = std::clamp(take, 0L, long(others.size()));
    double best = b ? v[j] : 0.0;
    for (long k = 0; k < take; ++k) best += others[std::size_t(k)];
    return 1.0 / (inst.v0(i) + best);
  }

  auto best = detail::maximize_linear(inst, v, j, b, mode == BoundMode::Exact);
  if (!best) return std::nullopt;
  return 1.0 / (inst.v0(i) + std::max(0.0, *best));
}

BoundTable build_bound_table(const Instance& inst, BoundMode mode) {
  const int n = inst.classes(), m = inst.products();
  BoundTable table;
  table.classes = n;
  table.products = m;
  table.mode = resolve(inst, mode);
  table.forced_zero.assign(std::size_t(m), 0);

  if (inst.cardinality_only()) {
    const long cap = effective_capacity(inst);
    auto cb = kernels::omp::cardinality_bounds(inst, cap);
    table.phi1 = std::move(cb.phi1);
    table.phi0 = std::move(cb.phi0);
    if (cap == 0) std::fill(table.forced_zero.begin(), table.forced_zero.end(), 1);
  } else {
    // HiGHS sessions are created per entry; kept serial because HiGHS
    // shares a global task scheduler between instances.
    table.phi1.assign(std::size_t(n) * std::size_t(m), 0.0);
    table.phi0.assign(std::size_t(n) * std::size_t(m), 0.0);
    for (int j = 0; j < m; ++j) {
      for (const auto& c : inst.constraints())
        if (c.beta[j] > c.alpha + 1e-9 * std::max(1.0, c.alpha)) table.forced_zero[j] = 1;
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const std::size_t k = std::size_t(i) * std::size_t(m) + std::size_t(j);
        table.phi0[k] = *conditional_bound(inst, i, j, 0, table.mode);
        if (table.forced_zero[j]) continue;
        auto p1 = conditional_bound(inst, i, j, 1, table.mode);
        if (!p1) {
          table.forced_zero[j] = 1;
          continue;
        }
        table.phi1[k] = *p1;
      }
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (table.forced_zero[j]) table.phi1[std::size_t(i) * std::size_t(m) + std::size_t(j)] = 1.0 / (inst.v0(i) + inst.v(i, j));
  return table;
}

}  // namespace assort
