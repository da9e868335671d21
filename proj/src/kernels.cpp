#include "assort/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "assort/error.hpp"

namespace assort::kernels {

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

int resolve_threads(int threads) { return threads > 0 ? threads : max_threads(); }

bool better(double value, const Assortment& x, double best_value, const Assortment& best) {
  if (value > best_value) return true;
  if (value < best_value || best.empty()) return best.empty();
  return std::lexicographical_compare(x.begin(), x.end(), best.begin(), best.end());
}

// Enumerates Gray-code positions [first, last).
EnumerationResult enumerate_range(const Instance& inst, std::uint64_t first, std::uint64_t last) {
  const int n = inst.classes(), m = inst.products();
  const auto& cons = inst.constraints();
  const std::size_t K = cons.size();

  EnumerationResult out;
  out.best_value = -std::numeric_limits<double>::infinity();
  if (first >= last) return out;

  std::vector<double> psi(static_cast<std::size_t>(n)), num(static_cast<std::size_t>(n)), load(K, 0.0), alpha(K);
  for (std::size_t k = 0; k < K; ++k) alpha[k] = cons[k].alpha + 1e-9 * std::max(1.0, cons[k].alpha);

  std::uint64_t code = first ^ (first >> 1);
  for (int i = 0; i < n; ++i) {
    psi[i] = inst.v0(i);
    num[i] = 0.0;
  }
  for (int j = 0; j < m; ++j) {
    if (!((code >> j) & 1u)) continue;
    for (int i = 0; i < n; ++i) {
      psi[i] += inst.v(i, j);
      num[i] += inst.r(i, j) * inst.v(i, j);
    }
    for (std::size_t k = 0; k < K; ++k) load[k] += cons[k].beta[j];
  }

  Assortment x(static_cast<std::size_t>(m));
  for (std::uint64_t pos = first;; ++pos) {
    ++out.visited;
    bool feasible = true;
    for (std::size_t k = 0; k < K; ++k)
      if (load[k] > alpha[k]) {
        feasible = false;
        break;
      }
    if (feasible) {
      ++out.feasible;
      double f = 0.0;
      for (int i = 0; i < n; ++i) f += inst.rho(i) * num[i] / psi[i];
      const double slack = 1e-9 * std::max(1.0, std::abs(out.best_value));
      if (!(f < out.best_value - slack)) {
        for (int j = 0; j < m; ++j) x[j] = (code >> j) & 1u;
        if (is_feasible(inst, x)) {
          const double exact = eval_revenue(inst, x);
          if (better(exact, x, out.best_value, out.best)) {
            out.best_value = exact;
            out.best = x;
          }
        }
      }
    }
    if (pos + 1 >= last) break;
    const int j = std::countr_zero(pos + 1);
    const std::uint64_t bit = std::uint64_t(1) << j;
    const double sign = (code & bit) ? -1.0 : 1.0;
    code ^= bit;
    for (int i = 0; i < n; ++i) {
      const double vij = inst.v(i, j);
      psi[i] += sign * vij;
      num[i] += sign * inst.r(i, j) * vij;
    }
    for (std::size_t k = 0; k < K; ++k) load[k] += sign * cons[k].beta[j];
  }
  return out;
}

EnumerationResult reduce(std::vector<EnumerationResult>& parts) {
  EnumerationResult out;
  out.best_value = -std::numeric_limits<double>::infinity();
  for (auto& p : parts) {
    out.visited += p.visited;
    out.feasible += p.feasible;
    if (!p.best.empty() && better(p.best_value, p.best, out.best_value, out.best)) {
      out.best_value = p.best_value;
      out.best = std::move(p.best);
    }
  }
  return out;
}

void check_enumerable(const Instance& inst) {
  if (inst.products() > 62) throw InputError("enumeration limited to 62 products");
}

// Sum of the k largest values in row i with product j removed.
struct SortedRow {
  std::vector<double> prefix;  // prefix[k] = sum of the k largest
  std::vector<int> rank;       // rank[j] = position of j in descending order

  explicit SortedRow(std::span<const double> v) : prefix(v.size() + 1, 0.0), rank(v.size()) {
    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return v[a] > v[b]; });
    for (std::size_t p = 0; p < order.size(); ++p) {
      rank[order[p]] = int(p);
      prefix[p + 1] = prefix[p] + v[order[p]];
    }
  }

  double top_excluding(int j, long k, double vj) const {
    const long others = long(rank.size()) - 1;
    k = std::clamp(k, 0L, others);
    if (rank[j] >= k) return prefix[std::size_t(k)];
    return prefix[std::size_t(k + 1)] - vj;
  }
};

void cardinality_row(const Instance& inst, int i, long capacity, CardinalityBounds& out) {
  const int m = inst.products();
  auto v = inst.v_row(i);
  SortedRow row(v);
  const long cap = capacity < 0 ? long(m) : std::min<long>(capacity, m);
  for (int j = 0; j < m; ++j) {
    const std::size_t k = std::size_t(i) * std::size_t(m) + std::size_t(j);
    out.phi0[k] = 1.0 / (inst.v0(i) + row.top_excluding(j, cap, v[j]));
    out.phi1[k] = cap < 1 ? 0.0 : 1.0 / (inst.v0(i) + v[j] + row.top_excluding(j, cap - 1, v[j]));
  }
}

}  // namespace

namespace serial {

EnumerationResult enumerate(const Instance& inst) {
  check_enumerable(inst);
  const std::uint64_t total = std::uint64_t(1) << inst.products();
  return enumerate_range(inst, 0, total);
}

std::vector<Cut> all_class_cuts(const Instance& inst, const Assortment& xbar, CutKinds kinds) {
  std::vector<Cut> out;
  for (int i = 0; i < inst.classes(); ++i) {
    auto cuts = class_cuts(inst, i, xbar, kinds);
    std::move(cuts.begin(), cuts.end(), std::back_inserter(out));
  }
  return out;
}

CardinalityBounds cardinality_bounds(const Instance& inst, long capacity) {
  const std::size_t size = std::size_t(inst.classes()) * std::size_t(inst.products());
  CardinalityBounds out{std::vector<double>(size), std::vector<double>(size)};
  for (int i = 0; i < inst.classes(); ++i) cardinality_row(inst, i, capacity, out);
  return out;
}

std::vector<double> phi_all(const Instance& inst, const Assortment& x) {
  std::vector<double> phi(std::size_t(inst.classes()));
  for (int i = 0; i < inst.classes(); ++i) phi[i] = eval_phi(inst, i, std::span<const std::uint8_t>(x));
  return phi;
}

}  // namespace serial

namespace omp {

EnumerationResult enumerate(const Instance& inst, int threads) {
  check_enumerable(inst);
  const std::uint64_t total = std::uint64_t(1) << inst.products();
  const int t = resolve_threads(threads);
  const std::uint64_t chunks = std::min<std::uint64_t>(total, std::uint64_t(std::max(64, 8 * t)));
  std::vector<EnumerationResult> parts(chunks);
  const long long count = (long long)chunks;
#pragma omp parallel for schedule(dynamic) num_threads(t)
  for (long long c = 0; c < count; ++c) {
    const std::uint64_t first = total * std::uint64_t(c) / chunks;
    const std::uint64_t last = total * std::uint64_t(c + 1) / chunks;
    parts[std::size_t(c)] = enumerate_range(inst, first, last);
  }
  return reduce(parts);
}

std::vector<Cut> all_class_cuts(const Instance& inst, const Assortment& xbar, CutKinds kinds, int threads) {
  const int n = inst.classes();
  const int t = resolve_threads(threads);
  std::vector<std::vector<Cut>> per_class(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) num_threads(t)
  for (int i = 0; i < n; ++i) per_class[std::size_t(i)] = class_cuts(inst, i, xbar, kinds);
  std::vector<Cut> out;
  for (auto& cuts : per_class) std::move(cuts.begin(), cuts.end(), std::back_inserter(out));
  return out;
}

CardinalityBounds cardinality_bounds(const Instance& inst, long capacity, int threads) {
  const std::size_t size = std::size_t(inst.classes()) * std::size_t(inst.products());
  CardinalityBounds out{std::vector<double>(size), std::vector<double>(size)};
  const int t = resolve_threads(threads);
#pragma omp parallel for schedule(static) num_threads(t)
  for (int i = 0; i < inst.classes(); ++i) cardinality_row(inst, i, capacity, out);
  return out;
}

std::vector<double> phi_all(const Instance& inst, const Assortment& x, int threads) {
  std::vector<double> phi(std::size_t(inst.classes()));
  const int t = resolve_threads(threads);
#pragma omp parallel for schedule(static) num_threads(t)
  for (int i = 0; i < inst.classes(); ++i) phi[std::size_t(i)] = eval_phi(inst, i, std::span<const std::uint8_t>(x));
  return phi;
}

}  // namespace omp

}  // namespace assort::kernels
