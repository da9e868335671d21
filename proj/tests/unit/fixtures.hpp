#pragma once

// Shared test instances and a naive reference evaluator that works on the
// raw arrays only, so it shares no code with the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "assort/model.hpp"

namespace fixtures {

struct Raw {
  int n = 0, m = 0;
  std::vector<double> rho, v0, v, r;  // v, r row-major
  std::vector<std::vector<double>> beta;
  std::vector<double> alpha;
};

inline assort::Instance build(const Raw& raw) {
  std::vector<assort::LinearConstraint> cons;
  for (std::size_t k = 0; k < raw.alpha.size(); ++k) cons.push_back({raw.beta[k], raw.alpha[k]});
  return assort::Instance(raw.rho, raw.v0, raw.v, raw.r, cons);
}

/// The two-class, two-product worked example.
inline Raw t1_raw(std::optional<double> capacity = std::nullopt) {
  Raw raw{2, 2, {0.5, 0.5}, {1, 2}, {1, 3, 2, 2}, {2, 1, 2, 1}, {}, {}};
  if (capacity) {
    raw.beta.push_back({1, 1});
    raw.alpha.push_back(*capacity);
  }
  return raw;
}

inline assort::Instance t1(std::optional<double> capacity = std::nullopt) { return build(t1_raw(capacity)); }

inline double naive_revenue(const Raw& raw, const std::vector<std::uint8_t>& x) {
  double f = 0.0;
  for (int i = 0; i < raw.n; ++i) {
    double num = 0.0, den = raw.v0[std::size_t(i)];
    for (int j = 0; j < raw.m; ++j)
      if (x[std::size_t(j)]) {
        num += raw.r[std::size_t(i * raw.m + j)] * raw.v[std::size_t(i * raw.m + j)];
        den += raw.v[std::size_t(i * raw.m + j)];
      }
    f += raw.rho[std::size_t(i)] * num / den;
  }
  return f;
}

inline double naive_phi(const Raw& raw, int i, const std::vector<double>& x) {
  double den = raw.v0[std::size_t(i)];
  for (int j = 0; j < raw.m; ++j) den += raw.v[std::size_t(i * raw.m + j)] * x[std::size_t(j)];
  return 1.0 / den;
}

inline bool naive_feasible(const Raw& raw, const std::vector<std::uint8_t>& x) {
  for (std::size_t k = 0; k < raw.alpha.size(); ++k) {
    double s = 0.0;
    for (int j = 0; j < raw.m; ++j) s += raw.beta[k][std::size_t(j)] * x[std::size_t(j)];
    if (s > raw.alpha[k] + 1e-9) return false;
  }
  return true;
}

inline std::vector<std::uint8_t> bits(int m, std::uint64_t mask) {
  std::vector<std::uint8_t> x(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) x[std::size_t(j)] = (mask >> j) & 1u;
  return x;
}

struct NaiveOptimum {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> x;
  int feasible = 0;
};

/// Plain loop over all masks, no incremental updates.
inline NaiveOptimum naive_optimum(const Raw& raw) {
  NaiveOptimum best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << raw.m); ++mask) {
    auto x = bits(raw.m, mask);
    if (!naive_feasible(raw, x)) continue;
    ++best.feasible;
    const double f = naive_revenue(raw, x);
    if (f > best.value + 1e-12 || (std::abs(f - best.value) <= 1e-12 && x < best.x)) {
      best.value = f;
      best.x = x;
    }
  }
  return best;
}

enum class Scheme { None, Cardinality, General, Subsets };

/// Random instance with m products, n classes and the given scheme.
inline Raw random_raw(std::mt19937_64& rng, int n, int m, Scheme scheme) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Raw raw;
  raw.n = n;
  raw.m = m;
  for (int i = 0; i < n; ++i) {
    raw.rho.push_back(0.05 + u01(rng));
    raw.v0.push_back(0.5 + 5.0 * u01(rng));
  }
  for (int k = 0; k < n * m; ++k) {
    raw.v.push_back(u01(rng) < 0.1 ? 0.0 : 0.2 + 2.0 * u01(rng));
    raw.r.push_back(1.0 + 2.0 * u01(rng));
  }
  const double cap = 1 + std::floor(u01(rng) * (m - 1));
  switch (scheme) {
    case Scheme::None: break;
    case Scheme::Cardinality:
      raw.beta.push_back(std::vector<double>(std::size_t(m), 1.0));
      raw.alpha.push_back(cap);
      break;
    case Scheme::General:
    case Scheme::Subsets: {
      std::vector<double> b;
      for (int j = 0; j < m; ++j) b.push_back(u01(rng));
      raw.beta.push_back(b);
      raw.alpha.push_back(0.3 + u01(rng) * 0.4 * m);
      if (scheme == Scheme::Subsets) {
        for (int k = 0; k < 2; ++k) {
          std::vector<double> s(std::size_t(m), 0.0);
          for (int j = k * m / 2; j < (k + 1) * m / 2; ++j) s[std::size_t(j)] = 1.0;
          raw.beta.push_back(s);
          raw.alpha.push_back(1 + std::floor(u01(rng) * (m / 2)));
        }
      }
      break;
    }
  }
  return raw;
}

}  // namespace fixtures
