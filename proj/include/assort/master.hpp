#pragma once

// Master problems over an abstract MILP backend.
//
// A MasterModel is a plain mixed-binary program: bounded columns, ranged
// linear rows, a linear objective and optional bilinear objective/row
// terms (binary x times continuous auxiliary). Builders create the
// per-class masters (Li: McCormick-linearised, Bi: bilinear), their
// segment-based variants and the standalone MILP baseline; cuts are added
// as rows `target - a^T x >= b`.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "assort/bounds.hpp"
#include "assort/cuts.hpp"
#include "assort/model.hpp"

namespace assort {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Column {
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;
  bool binary = false;
  std::string name;
};

/// coef * col_a * col_b.
struct BilinearTerm {
  int a = 0;
  int b = 0;
  double coef = 0.0;
};

struct Row {
  std::vector<int> index;
  std::vector<double> value;
  std::vector<BilinearTerm> bilinear;
  double lower = -kInf;
  double upper = kInf;
  std::string name;
};

enum class MasterKind : std::uint8_t { Li, Bi, LiSegment, BiSegment, MilpMcCormick, MilpBigM };

const char* to_string(MasterKind kind);

enum class Linearization : std::uint8_t { McCormick, BigM };

class MasterModel {
 public:
  MasterModel(MasterKind kind, int products);

  MasterKind kind() const { return kind_; }
  int products() const { return products_; }

  int add_column(Column col);
  int add_row(Row row);
  void add_objective_term(BilinearTerm term) { objective_bilinear_.push_back(term); }

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<BilinearTerm>& objective_bilinear() const { return objective_bilinear_; }
  std::vector<Column>& mutable_columns() { return columns_; }

  /// True when no objective term or row has bilinear parts.
  bool is_linear() const;

  // Variable registry. Missing families return -1.
  int x(int j) const { return x_[std::size_t(j)]; }
  int y(int i) const { return y_.empty() ? -1 : y_[std::size_t(i)]; }
  int theta(int i, int j) const;
  int z(int l, int j) const;
  int t(int l) const { return t_.empty() ? -1 : t_[std::size_t(l)]; }
  int eta(int l, int j) const;
  std::span<const int> x_columns() const { return x_; }

  /// Column bounded by a cut target; throws InputError if the master has none.
  int column_for(const CutTarget& target) const;

  /// Adds `target - a^T x >= b`; returns the row index.
  int add_cut(const Cut& cut);
  Row cut_row(const Cut& cut) const;
  std::size_t cut_count() const { return cut_count_; }

  /// Linear plus bilinear objective at `values`.
  double objective_value(std::span<const double> values) const;

  // Registration used by the builders.
  void register_x(std::vector<int> cols) { x_ = std::move(cols); }
  void register_y(std::vector<int> cols) { y_ = std::move(cols); }
  void register_theta(int classes, std::vector<int> cols) { theta_rows_ = classes; theta_ = std::move(cols); }
  void register_segments(int groups, std::vector<int> z, std::vector<int> t, std::vector<int> eta);

 private:
  MasterKind kind_;
  int products_ = 0;
  std::vector<Column> columns_;
  std::vector<Row> rows_;
  std::vector<BilinearTerm> objective_bilinear_;
  std::vector<int> x_, y_, theta_, z_, t_, eta_;
  int theta_rows_ = 0;
  int groups_ = 0;
  std::size_t cut_count_ = 0;
};

// ---------------------------------------------------------------------------
// Backends.

struct Capabilities {
  bool milp = true;
  bool bilinear_objective = false;
  bool lazy_constraints = false;
};

enum class MasterStatus : std::uint8_t { Optimal, FeasibleLimit, Infeasible, Error };

const char* to_string(MasterStatus status);

struct SolveLimits {
  double time_limit = kInf;  ///< seconds
  double rel_gap = 1e-9;
  double abs_gap = 1e-10;
  /// Warm-start point (all column values); a hint, may be ignored.
  std::optional<std::vector<double>> warm_start;
  /// Solve the continuous relaxation instead.
  bool relax_integrality = false;
  /// Write the model in LP format here before solving.
  std::optional<std::filesystem::path> dump_path;
};

struct MasterSolution {
  MasterStatus status = MasterStatus::Error;
  bool has_solution = false;
  std::vector<double> values;
  Assortment x;
  double objective = kInf;
  double bound = -kInf;  ///< lower bound (minimisation)
  long nodes = 0;
  long lazy_rounds = 0;
  long lazy_cuts = 0;
  double time = 0.0;
  std::string message;
};

/// Separation for branch-and-cut. Called by the backend at candidate
/// points; returns the cuts to add (empty accepts the candidate).
/// Implementations must only read shared immutable data: a backend may
/// call them from its own threads.
class LazySeparator {
 public:
  virtual ~LazySeparator() = default;
  /// `integral` is true when every x column is within tolerance of 0/1.
  virtual std::vector<Cut> separate(std::span<const double> values, bool integral) = 0;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual Capabilities capabilities() const = 0;
  virtual MasterSolution solve(const MasterModel& model, const SolveLimits& limits) const = 0;
  /// Single solve with lazy separation at candidate solutions. Cuts the
  /// separator returns are kept for the rest of the search.
  virtual MasterSolution solve_lazy(const MasterModel& model, LazySeparator& separator,
                                    const SolveLimits& limits) const;
};

// ---------------------------------------------------------------------------
// Builders.

/// x, y, theta with the four McCormick families. With `strengthen`, adds
/// v0_i y_i + sum_j v_ij theta_ij >= 1 (tighter relaxation; only valid
/// when cuts are lazy, not for cutting-plane masters).
MasterModel build_li_master(const Instance& inst, const BoundTable& bounds, const SolverBackend& backend,
                            bool strengthen = false);

/// x, y with the bilinear objective. With `strengthen`, adds the bilinear
/// row v0_i y_i + sum_j v_ij x_j y_i >= 1. Throws UnsupportedError
/// ("bilinear-unsupported") when the backend cannot handle it.
MasterModel build_bi_master(const Instance& inst, const SolverBackend& backend, bool strengthen = false);

/// x, z[L x m], t[L], eta[L x m] with aggregated McCormick rows.
MasterModel build_li_master_sb(const Instance& inst, const SegmentPartition& part, const BoundTable& bounds,
                               const SolverBackend& backend);

/// x, z, t with objective sum_{l,j} x_j z_l^j + sum_l t_l.
MasterModel build_bi_master_sb(const Instance& inst, const SegmentPartition& part, const SolverBackend& backend);

/// Standalone MILP: capacity rows, linearisation of theta = x y and
/// v0_i y_i + sum_j v_ij theta_ij >= 1. Solving it gives the optimum.
MasterModel build_milp_baseline(const Instance& inst, const BoundTable& bounds, Linearization lin,
                                const SolverBackend& backend);

/// A feasible master point for binary x: auxiliaries at their true values.
std::vector<double> lift_point(const MasterModel& model, const Instance& inst, const SegmentPartition* part,
                               std::span<const std::uint8_t> x);

/// Column counts of a model family, for sizing.
struct ModelSize {
  long binary = 0;
  long continuous = 0;
};
ModelSize model_size(const MasterModel& model);

}  // namespace assort
