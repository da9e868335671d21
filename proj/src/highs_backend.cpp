#include "assort/highs_backend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "Highs.h"
#include "assort/error.hpp"
#include "highs_util.hpp"

namespace assort {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double to_highs(double v) {
  if (v == kInf) return kHighsInf;
  if (v == -kInf) return -kHighsInf;
  return v;
}

constexpr double kIntTol = 1e-6;
constexpr double kCutTol = 1e-7;

// Linear model with the bilinear terms evaluated at fixed binary values
// (`fixed` may be empty when the model is linear).
HighsLp to_lp(const MasterModel& model, bool integral, const std::vector<double>* fixed = nullptr) {
  const auto& cols = model.columns();
  HighsLp lp;
  lp.num_col_ = int(cols.size());
  lp.sense_ = ObjSense::kMinimize;
  for (const auto& c : cols) {
    lp.col_cost_.push_back(c.cost);
    lp.col_lower_.push_back(to_highs(c.lower));
    lp.col_upper_.push_back(to_highs(c.upper));
  }
  if (fixed)
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (cols[c].binary) lp.col_lower_[c] = lp.col_upper_[c] = (*fixed)[c];
  if (integral) {
    lp.integrality_.assign(cols.size(), HighsVarType::kContinuous);
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (cols[c].binary) lp.integrality_[c] = HighsVarType::kInteger;
  }

  // x_a * y_b with x_a fixed contributes to the cost/coefficient of b.
  auto fold = [&](const BilinearTerm& t, auto&& emit) {
    const bool a_fixed = cols[std::size_t(t.a)].binary;
    const int free_col = a_fixed ? t.b : t.a;
    const int fixed_col = a_fixed ? t.a : t.b;
    if (!fixed || !cols[std::size_t(fixed_col)].binary) throw UnsupportedError("bilinear-unsupported", "bilinear term needs a fixed binary factor");
    emit(free_col, t.coef * (*fixed)[std::size_t(fixed_col)]);
  };
  for (const auto& t : model.objective_bilinear()) fold(t, [&](int col, double w) { lp.col_cost_[std::size_t(col)] += w; });

  lp.a_matrix_.format_ = MatrixFormat::kRowwise;
  lp.a_matrix_.num_col_ = lp.num_col_;
  lp.a_matrix_.start_.assign(1, 0);
  for (const auto& row : model.rows()) {
    std::vector<double> dense;
    if (!row.bilinear.empty()) {
      dense.assign(cols.size(), 0.0);
      for (std::size_t k = 0; k < row.index.size(); ++k) dense[std::size_t(row.index[k])] += row.value[k];
      for (const auto& t : row.bilinear) fold(t, [&](int col, double w) { dense[std::size_t(col)] += w; });
      for (std::size_t c = 0; c < cols.size(); ++c)
        if (dense[c] != 0.0) {
          lp.a_matrix_.index_.push_back(int(c));
          lp.a_matrix_.value_.push_back(dense[c]);
        }
    } else {
      for (std::size_t k = 0; k < row.index.size(); ++k) {
        if (row.value[k] == 0.0) continue;
        lp.a_matrix_.index_.push_back(row.index[k]);
        lp.a_matrix_.value_.push_back(row.value[k]);
      }
    }
    lp.a_matrix_.start_.push_back(int(lp.a_matrix_.index_.size()));
    lp.row_lower_.push_back(to_highs(row.lower));
    lp.row_upper_.push_back(to_highs(row.upper));
  }
  lp.num_row_ = int(model.rows().size());
  lp.a_matrix_.num_row_ = lp.num_row_;
  return lp;
}

void add_row(Highs& highs, const Row& row) {
  if (highs.addRow(to_highs(row.lower), to_highs(row.upper), HighsInt(row.index.size()), row.index.data(),
                   row.value.data()) == HighsStatus::kError)
    throw BackendError("HiGHS rejected a cut row");
}

Assortment round_x(const MasterModel& model, std::span<const double> values) {
  Assortment x(std::size_t(model.products()));
  for (int j = 0; j < model.products(); ++j) x[std::size_t(j)] = values[std::size_t(model.x(j))] > 0.5 ? 1 : 0;
  return x;
}

bool x_integral(const MasterModel& model, std::span<const double> values) {
  for (int col : model.x_columns()) {
    const double v = values[std::size_t(col)];
    if (std::abs(v - std::round(v)) > kIntTol) return false;
  }
  return true;
}

double cut_violation(const MasterModel& model, const Cut& cut, std::span<const double> values) {
  double rhs = cut.b;
  for (int j = 0; j < model.products(); ++j) rhs += cut.a[std::size_t(j)] * values[std::size_t(model.x(j))];
  return rhs - values[std::size_t(model.column_for(cut.target))];
}

bool rows_satisfied(const MasterModel& model, std::span<const double> values, double tol) {
  const auto& cols = model.columns();
  if (values.size() != cols.size()) return false;
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (values[c] < cols[c].lower - tol || values[c] > cols[c].upper + tol) return false;
  for (const auto& row : model.rows()) {
    double s = 0.0;
    for (std::size_t k = 0; k < row.index.size(); ++k) s += row.value[k] * values[std::size_t(row.index[k])];
    for (const auto& t : row.bilinear) s += t.coef * values[std::size_t(t.a)] * values[std::size_t(t.b)];
    const double scale = tol * std::max(1.0, std::max(std::abs(row.lower == -kInf ? 0.0 : row.lower),
                                                      std::abs(row.upper == kInf ? 0.0 : row.upper)));
    if (s < row.lower - scale || s > row.upper + scale) return false;
  }
  return true;
}

double cutoff(double incumbent, const SolveLimits& limits) {
  if (incumbent == kInf) return kInf;
  return incumbent - std::max(limits.abs_gap, limits.rel_gap * std::abs(incumbent));
}

void set_time_limit(Highs& highs, const SolveLimits& limits, Clock::time_point t0) {
  if (limits.time_limit == kInf) return;
  highs.setOptionValue("time_limit", std::max(1e-3, limits.time_limit - seconds_since(t0)));
}

void require_linear(const MasterModel& model, const std::string& backend) {
  if (!model.is_linear())
    throw UnsupportedError("bilinear-unsupported", "backend '" + backend + "' cannot solve bilinear masters");
}

struct Node {
  std::vector<double> lower, upper;  // bounds of the x columns
  double bound = -kInf;
  int depth = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.depth < b.depth;
  }
};

}  // namespace

MasterSolution HighsBackend::solve(const MasterModel& model, const SolveLimits& limits) const {
  require_linear(model, name());
  const auto t0 = Clock::now();
  const bool integral = !limits.relax_integrality;

  Highs highs;
  detail::configure_defaults(highs);
  highs.setOptionValue("threads", std::max(1, opts_.threads));
  highs.setOptionValue("mip_rel_gap", limits.rel_gap);
  highs.setOptionValue("mip_abs_gap", limits.abs_gap);
  set_time_limit(highs, limits, t0);
  if (highs.passModel(to_lp(model, integral)) == HighsStatus::kError) throw BackendError("HiGHS rejected the master");
  if (limits.dump_path) highs.writeModel(limits.dump_path->string());
  if (integral && limits.warm_start && limits.warm_start->size() == model.columns().size()) {
    HighsSolution start;
    start.col_value = *limits.warm_start;
    start.value_valid = true;
    highs.setSolution(start);
  }
  highs.run();

  MasterSolution out;
  const auto status = highs.getModelStatus();
  const auto& info = highs.getInfo();
  out.time = seconds_since(t0);
  out.nodes = integral ? long(info.mip_node_count) : 0;
  out.has_solution = info.primal_solution_status == kSolutionStatusFeasible;
  if (out.has_solution) {
    out.values = highs.getSolution().col_value;
    out.x = round_x(model, out.values);
    out.objective = info.objective_function_value;
  }
  switch (status) {
    case HighsModelStatus::kOptimal:
      out.status = MasterStatus::Optimal;
      out.bound = integral ? info.mip_dual_bound : info.objective_function_value;
      break;
    case HighsModelStatus::kInfeasible:
      out.status = MasterStatus::Infeasible;
      out.bound = kInf;
      out.has_solution = false;
      break;
    case HighsModelStatus::kTimeLimit:
    case HighsModelStatus::kIterationLimit:
    case HighsModelStatus::kSolutionLimit:
    case HighsModelStatus::kInterrupt:
      out.status = MasterStatus::FeasibleLimit;
      out.bound = integral ? info.mip_dual_bound : -kInf;
      out.message = highs.modelStatusToString(status);
      break;
    default:
      out.status = MasterStatus::Error;
      out.has_solution = false;
      out.message = highs.modelStatusToString(status);
  }
  return out;
}

// Branch-and-bound over LP relaxations with separation at integral nodes.
// Best-first node selection with plunging into the child on the rounding
// side of the branching variable.
MasterSolution HighsBackend::solve_lazy(const MasterModel& model, LazySeparator& separator,
                                        const SolveLimits& limits) const {
  require_linear(model, name());
  const auto t0 = Clock::now();
  const auto xcols = model.x_columns();
  const std::size_t m = xcols.size();

  Highs highs;
  detail::configure_defaults(highs);
  highs.setOptionValue("threads", 1);
  highs.setOptionValue("presolve", "off");
  highs.setOptionValue("solver", "simplex");
  if (highs.passModel(to_lp(model, false)) == HighsStatus::kError) throw BackendError("HiGHS rejected the master");
  if (limits.dump_path) highs.writeModel(limits.dump_path->string());

  MasterSolution out;
  double incumbent = kInf;
  double pruned = kInf;  // smallest LP bound among nodes pruned by the cutoff
  bool interrupted = false;

  auto add_cuts = [&](const std::vector<Cut>& cuts) {
    for (const auto& cut : cuts) {
      add_row(highs, model.cut_row(cut));
      ++out.lazy_cuts;
    }
  };

  if (limits.warm_start && rows_satisfied(model, *limits.warm_start, 1e-7) &&
      x_integral(model, *limits.warm_start)) {
    auto cuts = separator.separate(*limits.warm_start, true);
    ++out.lazy_rounds;
    if (cuts.empty()) {
      incumbent = model.objective_value(*limits.warm_start);
      out.values = *limits.warm_start;
      out.has_solution = true;
    } else {
      add_cuts(cuts);
    }
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  Node root;
  for (int c : xcols) {
    root.lower.push_back(model.columns()[std::size_t(c)].lower);
    root.upper.push_back(model.columns()[std::size_t(c)].upper);
  }
  std::optional<Node> current = std::move(root);
  std::vector<HighsInt> xidx(xcols.begin(), xcols.end());

  while (current || !open.empty()) {
    if (limits.time_limit != kInf && seconds_since(t0) >= limits.time_limit) {
      interrupted = true;
      break;
    }
    if (!current) {
      Node next = open.top();
      open.pop();
      if (next.bound >= cutoff(incumbent, limits)) {
        pruned = std::min(pruned, next.bound);
        continue;
      }
      current = std::move(next);
    }
    Node node = std::move(*current);
    current.reset();
    ++out.nodes;
    highs.changeColsBounds(HighsInt(m), xidx.data(), node.lower.data(), node.upper.data());

    for (int round = 0;; ++round) {
      set_time_limit(highs, limits, t0);
      highs.run();
      const auto status = highs.getModelStatus();
      if (status == HighsModelStatus::kInfeasible) break;
      if (status != HighsModelStatus::kOptimal) {
        if (status == HighsModelStatus::kTimeLimit || status == HighsModelStatus::kIterationLimit) {
          open.push(node);
          interrupted = true;
          break;
        }
        throw BackendError("LP relaxation failed: " + highs.modelStatusToString(status));
      }
      const double obj = highs.getInfo().objective_function_value;
      if (obj >= cutoff(incumbent, limits)) {
        pruned = std::min(pruned, obj);
        break;
      }
      node.bound = std::max(node.bound, obj);
      const auto& values = highs.getSolution().col_value;
      const bool integral = x_integral(model, values);

      if (integral || opts_.fractional_separation) {
        auto cuts = separator.separate(values, integral);
        ++out.lazy_rounds;
        double worst = 0.0;
        for (const auto& cut : cuts) worst = std::max(worst, cut_violation(model, cut, values));
        add_cuts(cuts);
        if (worst > kCutTol && round < 200) continue;
        if (integral) {
          if (worst > kCutTol) out.message = "separation stalled at a candidate";
          incumbent = obj;
          out.values = values;
          out.has_solution = true;
          break;
        }
      }

      // Branch on the most fractional x.
      std::size_t branch = m;
      double best_frac = -1.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double v = values[std::size_t(xidx[k])];
        const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
        if (frac > best_frac) {
          best_frac = frac;
          branch = k;
        }
      }
      const double v = values[std::size_t(xidx[branch])];
      Node down = node, up = node;
      down.upper[branch] = std::floor(v);
      up.lower[branch] = std::ceil(v);
      down.depth = up.depth = node.depth + 1;
      if (v - std::floor(v) >= 0.5) {
        open.push(std::move(down));
        current = std::move(up);
      } else {
        open.push(std::move(up));
        current = std::move(down);
      }
      break;
    }
    if (interrupted) break;
  }

  out.time = seconds_since(t0);
  if (out.has_solution) {
    out.x = round_x(model, out.values);
    for (int j = 0; j < model.products(); ++j) out.values[std::size_t(model.x(j))] = out.x[std::size_t(j)];
    out.objective = incumbent;
  }
  double bound = std::min(incumbent, pruned);
  if (interrupted) {
    if (current) bound = std::min(bound, current->bound);
    while (!open.empty()) {
      bound = std::min(bound, open.top().bound);
      open.pop();
    }
    out.status = MasterStatus::FeasibleLimit;
    out.message = "time limit";
  } else if (!out.has_solution) {
    out.status = MasterStatus::Infeasible;
  } else {
    out.status = MasterStatus::Optimal;
  }
  out.bound = bound;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> binary_columns(const MasterModel& model) {
  std::vector<int> out;
  for (std::size_t c = 0; c < model.columns().size(); ++c)
    if (model.columns()[c].binary) out.push_back(int(c));
  if (int(out.size()) > EnumerationBackend::kMaxBinaries)
    throw InputError("enumeration backend limited to " + std::to_string(EnumerationBackend::kMaxBinaries) +
                     " binary columns");
  return out;
}

// Rows that only touch binary columns, checked before any LP is built.
bool binary_rows_hold(const MasterModel& model, const std::vector<double>& point) {
  for (const auto& row : model.rows()) {
    if (!row.bilinear.empty()) continue;
    bool binary_only = true;
    double s = 0.0;
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      if (!model.columns()[std::size_t(row.index[k])].binary) {
        binary_only = false;
        break;
      }
      s += row.value[k] * point[std::size_t(row.index[k])];
    }
    if (!binary_only) continue;
    const double tol = 1e-9 * std::max(1.0, std::abs(row.upper == kInf ? 0.0 : row.upper));
    if (s > row.upper + tol || s < row.lower - tol) return false;
  }
  return true;
}

struct FixedLp {
  bool feasible = false;
  double objective = kInf;
  std::vector<double> values;
};

FixedLp solve_fixed(const MasterModel& model, const std::vector<double>& point, const std::vector<Row>& extra) {
  HighsLp lp = to_lp(model, false, &point);
  Highs highs;
  detail::configure_defaults(highs);
  highs.setOptionValue("threads", 1);
  if (highs.passModel(std::move(lp)) == HighsStatus::kError) throw BackendError("HiGHS rejected a fixed master");
  for (const auto& row : extra) add_row(highs, row);
  highs.run();
  FixedLp out;
  const auto status = highs.getModelStatus();
  if (status == HighsModelStatus::kInfeasible) return out;
  if (status != HighsModelStatus::kOptimal) throw BackendError("fixed-x LP failed: " + highs.modelStatusToString(status));
  out.feasible = true;
  out.values = highs.getSolution().col_value;
  for (std::size_t c = 0; c < model.columns().size(); ++c)
    if (model.columns()[c].binary) out.values[c] = point[c];
  out.objective = model.objective_value(out.values);
  return out;
}

template <class Visit>
bool for_each_binary_point(const MasterModel& model, const std::vector<int>& bins, Clock::time_point t0,
                           const SolveLimits& limits, Visit&& visit) {
  std::vector<double> point(model.columns().size(), 0.0);
  const std::uint64_t total = std::uint64_t(1) << bins.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if (limits.time_limit != kInf && seconds_since(t0) >= limits.time_limit) return false;
    bool in_bounds = true;
    for (std::size_t k = 0; k < bins.size(); ++k) {
      // Bit k of the mask is the (size-1-k)th column so that masks run in
      // lexicographic order of x.
      const double v = double((mask >> (bins.size() - 1 - k)) & 1u);
      const auto& col = model.columns()[std::size_t(bins[k])];
      if (v < col.lower || v > col.upper) in_bounds = false;
      point[std::size_t(bins[k])] = v;
    }
    if (!in_bounds || !binary_rows_hold(model, point)) continue;
    visit(point);
  }
  return true;
}

void finish(const MasterModel& model, MasterSolution& out, bool complete, Clock::time_point t0) {
  out.time = seconds_since(t0);
  if (out.has_solution) out.x = round_x(model, out.values);
  if (!complete) {
    out.status = MasterStatus::FeasibleLimit;
    out.bound = -kInf;
    out.message = "time limit";
  } else if (out.has_solution) {
    out.status = MasterStatus::Optimal;
    out.bound = out.objective;
  } else {
    out.status = MasterStatus::Infeasible;
    out.bound = kInf;
  }
}

}  // namespace

MasterSolution EnumerationBackend::solve(const MasterModel& model, const SolveLimits& limits) const {
  if (limits.relax_integrality) {
    require_linear(model, name());
    return HighsBackend().solve(model, limits);
  }
  const auto t0 = Clock::now();
  const auto bins = binary_columns(model);
  MasterSolution out;
  const bool complete = for_each_binary_point(model, bins, t0, limits, [&](const std::vector<double>& point) {
    ++out.nodes;
    auto r = solve_fixed(model, point, {});
    if (r.feasible && r.objective < out.objective - 1e-12) {
      out.objective = r.objective;
      out.values = std::move(r.values);
      out.has_solution = true;
    }
  });
  finish(model, out, complete, t0);
  return out;
}

MasterSolution EnumerationBackend::solve_lazy(const MasterModel& model, LazySeparator& separator,
                                              const SolveLimits& limits) const {
  const auto t0 = Clock::now();
  const auto bins = binary_columns(model);
  MasterSolution out;
  std::vector<Row> pool;
  const bool complete = for_each_binary_point(model, bins, t0, limits, [&](const std::vector<double>& point) {
    ++out.nodes;
    for (int round = 0; round < 1000; ++round) {
      auto r = solve_fixed(model, point, pool);
      if (!r.feasible) return;
      auto cuts = separator.separate(r.values, true);
      ++out.lazy_rounds;
      if (cuts.empty()) {
        if (r.objective < out.objective - 1e-12) {
          out.objective = r.objective;
          out.values = std::move(r.values);
          out.has_solution = true;
        }
        return;
      }
      for (const auto& cut : cuts) {
        pool.push_back(model.cut_row(cut));
        ++out.lazy_cuts;
      }
    }
    throw BackendError("separation did not converge at a fixed assortment");
  });
  finish(model, out, complete, t0);
  return out;
}

std::unique_ptr<SolverBackend> make_backend(const std::string& name, int threads) {
  if (name == "highs") return std::make_unique<HighsBackend>(HighsBackend::Options{std::max(1, threads), false});
  if (name == "enumerate") return std::make_unique<EnumerationBackend>();
  throw InputError("unknown backend '" + name + "' (expected highs or enumerate)");
}

}  // namespace assort
