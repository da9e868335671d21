#pragma once

// Conditional bounds phi_ij(b) = min { Phi_i(x) : x feasible, x_j = b }.
//
// They tighten the McCormick envelopes of theta_ij = x_j y_i. The minimum
// is 1 / (v0_i + M) with M the largest attainable sum_k v_ik x_k. Exact mode
// computes M over binary x; relaxed mode over the LP relaxation, which can
// only over-estimate M and so still gives a valid lower bound.

#include <cstdint>
#include <optional>
#include <vector>

#include "assort/model.hpp"

namespace assort {

enum class BoundMode : std::uint8_t {
  Exact,
  Relaxed,
  /// Exact for cardinality-only or unconstrained instances (a sort), LP
  /// relaxation otherwise.
  Auto,
};

const char* to_string(BoundMode mode);

struct BoundTable {
  int classes = 0;
  int products = 0;
  BoundMode mode = BoundMode::Exact;  ///< Exact or Relaxed, never Auto
  std::vector<double> phi1;           ///< phi_ij(1), row-major n x m
  std::vector<double> phi0;           ///< phi_ij(0)
  /// Products that cannot be offered at all (x_j = 1 infeasible). Their
  /// phi1 entries hold 1/(v0_i + v_ij) as a placeholder.
  std::vector<std::uint8_t> forced_zero;

  double phi(int i, int j, int b) const {
    const std::size_t k = std::size_t(i) * std::size_t(products) + std::size_t(j);
    return b ? phi1[k] : phi0[k];
  }
};

/// nullopt means conditionally infeasible: no feasible x has x_j = b.
std::optional<double> conditional_bound(const Instance& inst, int i, int j, int b, BoundMode mode);

BoundTable build_bound_table(const Instance& inst, BoundMode mode = BoundMode::Auto);

}  // namespace assort
