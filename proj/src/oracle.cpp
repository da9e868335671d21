#include "assort/oracle.hpp"

#include <chrono>
#include <string>

#include "assort/error.hpp"
#include "assort/kernels.hpp"

namespace assort {

ExactResult brute_force(const Instance& inst, int threads) {
  if (inst.products() > kBruteForceMaxProducts)
    throw InputError("brute force refuses m = " + std::to_string(inst.products()) + " (limit " +
                     std::to_string(kBruteForceMaxProducts) + " products)");
  const auto t0 = std::chrono::steady_clock::now();
  auto e = kernels::omp::enumerate(inst, threads);

  ExactResult res;
  res.master_used = "none";
  res.iterations = 1;
  res.nodes = long(e.visited);
  if (e.best.empty() && inst.products() > 0) {
    // The empty assortment is always feasible, so this only happens on
    // degenerate numerical input.
    res.status = SolveStatus::Infeasible;
    res.x.assign(std::size_t(inst.products()), 0);
  } else {
    res.status = SolveStatus::Optimal;
    res.x = e.best.empty() ? Assortment{} : e.best;
  }
  finalize_result(inst, res, eval_min_objective(inst, res.x));
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace assort
