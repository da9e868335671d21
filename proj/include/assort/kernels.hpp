#pragma once

// Data-parallel kernels. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp`; both return
// identical results (the tests check this). Without OpenMP the omp
// versions run the serial loops.

#include <cstdint>
#include <vector>

#include "assort/cuts.hpp"
#include "assort/model.hpp"

namespace assort::kernels {

struct EnumerationResult {
  Assortment best;            ///< argmax F, lexicographically smallest on ties
  double best_value = 0.0;    ///< F(best), evaluated from scratch
  std::uint64_t visited = 0;  ///< subsets enumerated
  std::uint64_t feasible = 0;
};

/// phi_ij(0) and phi_ij(1) when the only binding constraint is
/// sum_j x_j <= capacity (capacity < 0 means unconstrained). Row-major
/// n x m; phi1 entries are 0 where x_j = 1 is infeasible (capacity < 1).
struct CardinalityBounds {
  std::vector<double> phi1;
  std::vector<double> phi0;
};

bool openmp_enabled();
int max_threads();

namespace serial {

/// Gray-code enumeration of all 2^m subsets with O(n + K) incremental
/// updates per step.
EnumerationResult enumerate(const Instance& inst);

/// class_cuts for every class, ordered by class then kind.
std::vector<Cut> all_class_cuts(const Instance& inst, const Assortment& xbar, CutKinds kinds);

CardinalityBounds cardinality_bounds(const Instance& inst, long capacity);

/// Phi_i(x) for all classes.
std::vector<double> phi_all(const Instance& inst, const Assortment& x);

}  // namespace serial

namespace omp {

/// Splits the Gray-code sequence into chunks; results are reduced
/// sequentially so the answer does not depend on the thread count.
EnumerationResult enumerate(const Instance& inst, int threads = 0);
std::vector<Cut> all_class_cuts(const Instance& inst, const Assortment& xbar, CutKinds kinds, int threads = 0);
CardinalityBounds cardinality_bounds(const Instance& inst, long capacity, int threads = 0);
std::vector<double> phi_all(const Instance& inst, const Assortment& x, int threads = 0);

}  // namespace omp

}  // namespace assort::kernels
