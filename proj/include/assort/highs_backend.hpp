#pragma once

// Solver backends built on the HiGHS LP/MIP solver.
//
// HighsBackend   MIP solves go to HiGHS directly. Lazy constraints run in
//                a branch-and-bound tree of our own over HiGHS LPs, since
//                the HiGHS MIP solver offers no lazy-constraint hook.
//                Bilinear objectives are not supported.
// EnumerationBackend
//                Enumerates every feasible x and solves the remaining LP
//                over the continuous columns. Handles bilinear terms and
//                lazy cuts exactly; meant for small reference instances.

#include <memory>
#include <string>

#include "assort/master.hpp"

namespace assort {

class HighsBackend : public SolverBackend {
 public:
  struct Options {
    int threads = 1;
    /// Separate at fractional tree nodes too (the separator decides).
    bool fractional_separation = false;
  };

  HighsBackend() = default;
  explicit HighsBackend(Options opts) : opts_(opts) {}

  std::string name() const override { return "highs"; }
  Capabilities capabilities() const override { return {true, false, true}; }
  MasterSolution solve(const MasterModel& model, const SolveLimits& limits) const override;
  MasterSolution solve_lazy(const MasterModel& model, LazySeparator& separator,
                            const SolveLimits& limits) const override;

 private:
  Options opts_;
};

class EnumerationBackend : public SolverBackend {
 public:
  /// Refuses models with more binaries than this.
  static constexpr int kMaxBinaries = 20;

  std::string name() const override { return "enumerate"; }
  Capabilities capabilities() const override { return {true, true, true}; }
  MasterSolution solve(const MasterModel& model, const SolveLimits& limits) const override;
  MasterSolution solve_lazy(const MasterModel& model, LazySeparator& separator,
                            const SolveLimits& limits) const override;
};

/// "highs" or "enumerate"; throws InputError for anything else.
std::unique_ptr<SolverBackend> make_backend(const std::string& name, int threads = 1);

}  // namespace assort
