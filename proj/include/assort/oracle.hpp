#pragma once

// Exhaustive reference solver.

#include "assort/algorithms.hpp"
#include "assort/model.hpp"

namespace assort {

inline constexpr int kBruteForceMaxProducts = 25;

/// Enumerates all 2^m subsets and returns argmax F over the feasible ones,
/// lexicographically smallest x on ties. Throws InputError when
/// m > kBruteForceMaxProducts. `threads` <= 0 uses the OpenMP default.
ExactResult brute_force(const Instance& inst, int threads = 0);

}  // namespace assort
