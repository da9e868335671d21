#pragma once

// Instance families, benchmark sweeps and result files.
//
// Random draws come from one mt19937_64 stream per instance, consumed in
// this order: rho (families with random class weights), revenues, graph
// edges (graph family), utilities, capacity weights beta. Matrix draws are
// row-major, class i then product j.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "assort/algorithms.hpp"
#include "assort/model.hpp"

namespace assort {

enum class RevenueScheme : std::uint8_t {
  PerProduct,  ///< r_ij = r_j for all classes, r_j ~ U[1,3]
  PerEntry,    ///< r_ij ~ U[1,3] independently
};
enum class UtilityScheme : std::uint8_t {
  Uniform12,  ///< v_ij ~ U[1,2]
  Uniform01,  ///< v_ij ~ U[0,1]
  Graph,      ///< v_ij ~ U[1,2] on the edges of a random graph, else 0
};
enum class RhoScheme : std::uint8_t {
  Equal,      ///< rho_i = 1/n
  Uniform01,  ///< rho_i ~ U[0,1], not normalised
};
enum class ConstraintScheme : std::uint8_t {
  Cardinality,  ///< sum_j x_j <= C
  Subsets,      ///< sum_j beta_j x_j <= alpha and sum_{S_k} x_j <= C_k
  General,      ///< sum_j beta_j x_j <= alpha
};

struct FamilySpec {
  std::string name;
  int n = 0;  ///< classes
  int m = 0;  ///< products
  RevenueScheme revenue = RevenueScheme::PerProduct;
  UtilityScheme utility = UtilityScheme::Uniform12;
  RhoScheme rho = RhoScheme::Equal;
  std::vector<double> v0_choices;
  ConstraintScheme scheme = ConstraintScheme::Cardinality;
  /// C values (cardinality) or alpha values (general).
  std::vector<double> capacities;
  /// (alpha, C_k) pairs for the subset scheme.
  std::vector<std::pair<double, double>> pairs;
  int subsets = 0;
  int instances_per_cell = 5;
  double edge_probability = 0.1;
};

/// One parameter cell of a family: a v0 value and a capacity setting.
struct Cell {
  double v0 = 0.0;
  double capacity = 0.0;  ///< C, or alpha for the subset/general schemes
  double subset_capacity = 0.0;  ///< C_k, subset scheme only
};

/// The named families; throws InputError for unknown names.
FamilySpec family_spec(const std::string& name);
std::vector<std::string> family_names();

/// Same family with n and m replaced. Capacities are kept; callers
/// choosing small m usually also replace `capacities`/`pairs`.
FamilySpec resize(FamilySpec spec, int n, int m);

/// Every (v0, capacity) cell of the family, v0 outermost.
std::vector<Cell> family_cells(const FamilySpec& spec);

Instance generate(const FamilySpec& spec, const Cell& cell, std::uint64_t seed);

/// "<family>_v<v0>_c<C>_s<seed>", or "..._a<alpha>_k<C_k>_s<seed>".
std::string instance_id(const FamilySpec& spec, const Cell& cell, std::uint64_t seed);

struct GeneratedInstance {
  std::string id;
  std::string family;
  Instance instance;
};

/// instances_per_cell instances per cell, seeds base_seed, base_seed+1, ...
/// continuing across cells.
std::vector<GeneratedInstance> generate_family(const FamilySpec& spec, std::uint64_t base_seed);

/// Writes dir/<family>/<id>.json for each instance; returns the paths.
std::vector<std::filesystem::path> save_instances(const std::vector<GeneratedInstance>& set,
                                                  const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Benchmarks.

struct BenchmarkRecord {
  std::string instance;
  std::string family;
  std::string v0;
  std::string alpha;
  std::string method;
  std::string master;
  std::string cuts;
  int segments = 0;
  std::string status;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double time_s = 0.0;
  long iterations = 0;
  long nodes = 0;
  long cuts_added = 0;
};

inline constexpr const char* kResultsSchema = "# assort-results v1";

/// The v0 and alpha columns derived from an instance.
std::string v0_label(const Instance& inst);
std::string alpha_label(const Instance& inst);

/// Runs every config on every instance with `workers` threads; each run
/// gets its own backend. Failures become status rows. Rows are ordered by
/// instance then config. `time_limit` overrides each config's limit when
/// positive.
std::vector<BenchmarkRecord> run_benchmark(const std::vector<GeneratedInstance>& instances,
                                           const std::vector<SolveConfig>& configs, double time_limit,
                                           const std::string& backend, int workers = 1);

void write_records_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> read_records_csv(std::istream& in);

/// Per (family, v0, alpha, method, master, cuts, L) cell: run count,
/// solved count and mean time over the solved runs only.
struct CellSummary {
  std::string family, v0, alpha, method, master, cuts;
  int segments = 0;
  int runs = 0;
  int solved = 0;
  std::optional<double> mean_time_solved;
};

std::vector<CellSummary> summarize(const std::vector<BenchmarkRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);

inline const std::vector<int> kDefaultSegmentSweep = {1, 5, 10, 20, 50, 100, 200};

/// CP and B&C with segment masters over each L. Values of L above an
/// instance's class count are skipped for that instance.
std::vector<BenchmarkRecord> sweep_segments(const std::vector<GeneratedInstance>& instances,
                                            const std::vector<int>& segments, const SolveConfig& base,
                                            double time_limit, const std::string& backend, int workers = 1);

// ---------------------------------------------------------------------------
// Greedy ratio experiment.

struct RatioRow {
  std::string instance;
  int n = 0, m = 0;
  int capacity = 0;
  double price_ratio = 0.0;  ///< r_min / r_max
  double greedy = 0.0;
  double optimum = 0.0;
  double ratio = 0.0;  ///< greedy / optimum
  double bound = 0.0;  ///< (1 - 1/e) r_min / r_max
};

/// Cardinality instances with r_min / r_max drawn from [0.25, 0.9]; the
/// extreme prices are attained exactly.
std::vector<GeneratedInstance> ratio_instances(int count, int n, int m, int capacity, std::uint64_t seed);

/// Greedy versus brute force on each instance (m <= 25).
std::vector<RatioRow> ratio_experiment(const std::vector<GeneratedInstance>& instances);
void write_ratio_csv(std::ostream& out, const std::vector<RatioRow>& rows);

}  // namespace assort
