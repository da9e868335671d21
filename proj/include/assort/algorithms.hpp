#pragma once

// Solution methods: the nested greedy heuristic, the cutting-plane loop,
// branch-and-cut with lazy separation and the standalone MILP.
//
// Exact methods minimise G and report F = sum_i rho_i r_i - G. Bounds are
// reported on F (an upper bound, since F is maximised).

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "assort/bounds.hpp"
#include "assort/cuts.hpp"
#include "assort/master.hpp"
#include "assort/model.hpp"

namespace assort {

enum class Method : std::uint8_t { CP, BC, MILP, Greedy, Brute };
enum class MasterChoice : std::uint8_t { Li, Bi };

enum class SolveStatus : std::uint8_t {
  Optimal,
  FeasibleLimit,  ///< stopped by a limit with an incumbent
  Infeasible,
  Error,
  Heuristic,  ///< greedy answer, optimality not proven
};

const char* to_string(Method method);
const char* to_string(MasterChoice master);
const char* to_string(SolveStatus status);
Method parse_method(const std::string& text);
MasterChoice parse_master(const std::string& text);
/// "oa" or "oa+sc".
CutKinds parse_cuts(const std::string& text);
std::string to_string(CutKinds kinds);

struct SolveConfig {
  Method method = Method::CP;
  MasterChoice master = MasterChoice::Li;
  CutKinds cuts = CutKinds::oa_only();
  /// Number of class groups; 0 keeps one auxiliary per class.
  int segments = 0;
  /// Relative optimality gap; also the absolute tolerance of the
  /// cutting-plane convergence test.
  double epsilon = 1e-6;
  double time_limit = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  int threads = 1;
  Linearization linearization = Linearization::McCormick;
  BoundMode bound_mode = BoundMode::Auto;
  /// Cutting-plane iteration cap.
  int max_iterations = 10000;
  std::optional<std::filesystem::path> dump_model;
};

/// One master solve of the cutting-plane loop.
struct CpIteration {
  int iteration = 0;
  double master_bound = 0.0;   ///< lower bound on G reported by this solve
  double running_bound = 0.0;  ///< max over iterations so far
  double incumbent = 0.0;      ///< best G seen so far
  long cuts_added = 0;
  Assortment xbar;
};

struct ExactResult {
  Assortment x;
  double objective = 0.0;      ///< F(x)
  double min_objective = 0.0;  ///< G(x)
  double bound = 0.0;          ///< upper bound on the optimal F
  double gap = 0.0;            ///< (bound - F) / |F|, 0 when they meet
  SolveStatus status = SolveStatus::Error;
  long iterations = 0;
  long nodes = 0;
  long cuts_added = 0;
  double wall_time = 0.0;
  std::string master_used;
  std::string note;
  std::vector<CpIteration> trace;
};

struct GreedyResult {
  Assortment x;
  double objective = 0.0;
  /// (1 - 1/e) r_min / r_max when the instance is cardinality-constrained
  /// or unconstrained; empty for general constraints.
  std::optional<double> ratio;
  long evaluations = 0;  ///< marginal evaluations of the nested greedy
};

/// The nested greedy order on the unit-price objective: element k is the
/// product added at step k+1. Ties go to the lowest index.
std::vector<int> greedy_order(const Instance& inst, long* evaluations = nullptr);

/// S_r, the first r products of the greedy order. Requires 1 <= r <= m.
Assortment greedy_unit(const Instance& inst, int r);

/// Best of S_1..S_m under the true prices, restricted to |S| <= C when C is
/// given. Without C, a single cardinality row of the instance is used;
/// other constraints filter the prefixes by feasibility.
GreedyResult greedy_family(const Instance& inst, std::optional<int> capacity = std::nullopt);

/// (1 - 1/e) r_min / r_max with r over all (i, j).
double approximation_bound(const Instance& inst);

ExactResult cutting_plane(const Instance& inst, const SolveConfig& cfg, const SolverBackend& backend);
ExactResult branch_and_cut(const Instance& inst, const SolveConfig& cfg, const SolverBackend& backend);
ExactResult milp_baseline(const Instance& inst, const SolveConfig& cfg, const SolverBackend& backend);
ExactResult greedy_solve(const Instance& inst, const SolveConfig& cfg);

/// Dispatches on cfg.method.
ExactResult solve(const Instance& inst, const SolveConfig& cfg, const SolverBackend& backend);

/// Fills objective, min_objective, bound and gap from x and a lower bound
/// on G.
void finalize_result(const Instance& inst, ExactResult& res, double g_lower_bound);

}  // namespace assort
