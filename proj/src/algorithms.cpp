#include "assort/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <set>

#include "assort/error.hpp"
#include "assort/kernels.hpp"
#include "assort/oracle.hpp"

namespace assort {

const char* to_string(Method method) {
  switch (method) {
    case Method::CP: return "cp";
    case Method::BC: return "bc";
    case Method::MILP: return "milp";
    case Method::Greedy: return "greedy";
    case Method::Brute: return "brute";
  }
  return "?";
}

const char* to_string(MasterChoice master) { return master == MasterChoice::Li ? "li" : "bi"; }

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleLimit: return "feasible-limit";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Error: return "error";
    case SolveStatus::Heuristic: return "heuristic";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "cp") return Method::CP;
  if (text == "bc") return Method::BC;
  if (text == "milp") return Method::MILP;
  if (text == "greedy") return Method::Greedy;
  if (text == "brute") return Method::Brute;
  throw InputError("unknown method '" + text + "'");
}

MasterChoice parse_master(const std::string& text) {
  if (text == "li") return MasterChoice::Li;
  if (text == "bi") return MasterChoice::Bi;
  throw InputError("unknown master '" + text + "'");
}

CutKinds parse_cuts(const std::string& text) {
  if (text == "oa") return CutKinds::oa_only();
  if (text == "oa+sc") return CutKinds::oa_sc();
  throw InputError("unknown cut set '" + text + "'");
}

std::string to_string(CutKinds kinds) { return kinds.sc ? "oa+sc" : "oa"; }

// ---------------------------------------------------------------------------
// Greedy.

std::vector<int> greedy_order(const Instance& inst, long* evaluations) {
  const int n = inst.classes(), m = inst.products();
  std::vector<double> psi(static_cast<std::size_t>(n)), attract(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) psi[std::size_t(i)] = inst.v0(i);
  std::vector<std::uint8_t> taken(std::size_t(m), 0);
  std::vector<int> order;
  long evals = 0;
  for (int step = 0; step < m; ++step) {
    int best = -1;
    double best_value = -1.0;
    for (int j = 0; j < m; ++j) {
      if (taken[std::size_t(j)]) continue;
      ++evals;
      double value = 0.0;
      for (int i = 0; i < n; ++i) {
        const double vij = inst.v(i, j);
        value += inst.rho(i) * (attract[std::size_t(i)] + vij) / (psi[std::size_t(i)] + vij);
      }
      if (value > best_value) {
        best_value = value;
        best = j;
      }
    }
    taken[std::size_t(best)] = 1;
    order.push_back(best);
    for (int i = 0; i < n; ++i) {
      psi[std::size_t(i)] += inst.v(i, best);
      attract[std::size_t(i)] += inst.v(i, best);
    }
  }
  if (evaluations) *evaluations = evals;
  return order;
}

Assortment greedy_unit(const Instance& inst, int r) {
  if (r < 1 || r > inst.products()) throw InputError("greedy size must lie in [1, m]");
  auto order = greedy_order(inst);
  Assortment x(std::size_t(inst.products()), 0);
  for (int k = 0; k < r; ++k) x[std::size_t(order[std::size_t(k)])] = 1;
  return x;
}

double approximation_bound(const Instance& inst) {
  constexpr double factor = 1.0 - 1.0 / 2.718281828459045235360287;
  if (inst.products() == 0 || inst.price_max() <= 0.0) return factor;
  return factor * inst.price_min() / inst.price_max();
}

GreedyResult greedy_family(const Instance& inst, std::optional<int> capacity) {
  const int m = inst.products();
  GreedyResult out;
  out.x.assign(std::size_t(m), 0);
  out.objective = 0.0;

  // The ratio certificate needs cardinality-only constraints; otherwise
  // prefixes are filtered by feasibility and no ratio is reported.
  const bool general = !inst.cardinality_only();
  if (!capacity && !general && !inst.constraints().empty()) {
    double cap = std::numeric_limits<double>::infinity();
    for (const auto& c : inst.constraints()) cap = std::min(cap, c.alpha);
    capacity = int(std::floor(cap + 1e-9));
  }
  if (capacity && *capacity < 0) throw InputError("capacity must be non-negative");
  if (!general) out.ratio = approximation_bound(inst);

  auto order = greedy_order(inst, &out.evaluations);
  const int limit = capacity ? std::min(*capacity, m) : m;
  Assortment x(std::size_t(m), 0);
  for (int k = 0; k < limit; ++k) {
    x[std::size_t(order[std::size_t(k)])] = 1;
    if (!is_feasible(inst, x)) continue;
    const double f = eval_revenue(inst, x);
    if (f > out.objective) {
      out.objective = f;
      out.x = x;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared plumbing for the exact methods.

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double remaining(const SolveConfig& cfg, Clock::time_point t0) {
  if (cfg.time_limit == kInf) return kInf;
  return std::max(0.0, cfg.time_limit - seconds_since(t0));
}

void check_config(const Instance& inst, const SolveConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (cfg.segments < 0 || cfg.segments > inst.classes())
    throw InputError("segments must lie in [0, n] (n = " + std::to_string(inst.classes()) + ")");
}

// The master the configuration asks for, falling back to Li when the
// backend has no bilinear support.
struct MasterSetup {
  MasterModel model;
  std::optional<SegmentPartition> part;
  std::string label;
  std::string note;
};

MasterSetup build_master(const Instance& inst, const SolveConfig& cfg, const SolverBackend& backend, bool strengthen) {
  bool bi = cfg.master == MasterChoice::Bi;
  std::string note;
  if (bi && !backend.capabilities().bilinear_objective) {
    bi = false;
    note = "bilinear-unsupported: backend " + backend.name() + " fell back to the li master";
  }
  std::optional<SegmentPartition> part;
  if (cfg.segments > 0) part = SegmentPartition::contiguous(inst.classes(), cfg.segments);

  std::optional<BoundTable> bounds;
  if (!bi) bounds = build_bound_table(inst, cfg.bound_mode);

  auto model = [&] {
    if (part) return bi ? build_bi_master_sb(inst, *part, backend) : build_li_master_sb(inst, *part, *bounds, backend);
    return bi ? build_bi_master(inst, backend, strengthen) : build_li_master(inst, *bounds, backend, strengthen);
  }();
  std::string label = bi ? "bi" : "li";
  if (part) label += "-sb" + std::to_string(part->groups());
  return {std::move(model), std::move(part), std::move(label), std::move(note)};
}

struct TargetCheck {
  CutTarget target;
  double violation = 0.0;  // true value - auxiliary value
};

// Targets whose auxiliary value sits more than tol below the true value at x.
std::vector<TargetCheck> violated_targets(const Instance& inst, const MasterSetup& setup, std::span<const double> values,
                                          const Assortment& x, double tol) {
  std::vector<TargetCheck> out;
  const auto& model = setup.model;
  if (!setup.part) {
    auto phi = kernels::serial::phi_all(inst, x);
    for (int i = 0; i < inst.classes(); ++i) {
      const double gap = phi[std::size_t(i)] - values[std::size_t(model.y(i))];
      if (gap > tol) out.push_back({CutTarget::y(i), gap});
    }
    return out;
  }
  const auto& part = *setup.part;
  for (int l = 0; l < part.groups(); ++l) {
    const auto t = CutTarget::t(l);
    const double gap_t = target_value(inst, &part, t, x) - values[std::size_t(model.t(l))];
    if (gap_t > tol) out.push_back({t, gap_t});
    for (int j = 0; j < inst.products(); ++j) {
      const auto z = CutTarget::z(l, j);
      const double gap_z = target_value(inst, &part, z, x) - values[std::size_t(model.z(l, j))];
      if (gap_z > tol) out.push_back({z, gap_z});
    }
  }
  return out;
}

// All cuts of the configured kinds at x for the given targets.
std::vector<Cut> cuts_for(const Instance& inst, const MasterSetup& setup, const Assortment& x,
                          const std::vector<TargetCheck>& targets, CutKinds kinds) {
  std::vector<Cut> out;
  if (targets.empty()) return out;
  if (!setup.part) {
    for (const auto& t : targets) {
      auto cuts = class_cuts(inst, t.target.index, x, kinds);
      std::move(cuts.begin(), cuts.end(), std::back_inserter(out));
    }
    return out;
  }
  auto all = segment_cuts(inst, *setup.part, x, kinds);
  for (auto& cut : all)
    if (std::any_of(targets.begin(), targets.end(), [&](const TargetCheck& t) { return t.target == cut.target; }))
      out.push_back(std::move(cut));
  return out;
}

// Every cut of the configured kinds at x, for all targets.
std::vector<Cut> all_cuts_at(const Instance& inst, const MasterSetup& setup, const Assortment& x, CutKinds kinds,
                             int threads) {
  if (setup.part) return segment_cuts(inst, *setup.part, x, kinds);
  return kernels::omp::all_class_cuts(inst, x, kinds, threads);
}

ExactResult trivial_result(const Instance& inst, const char* master, Clock::time_point t0) {
  ExactResult res;
  res.x.assign(std::size_t(inst.products()), 0);
  res.status = SolveStatus::Optimal;
  res.master_used = master;
  res.note = "no products";
  finalize_result(inst, res, eval_min_objective(inst, res.x));
  res.wall_time = seconds_since(t0);
  return res;
}

SolveStatus from_master(MasterStatus s) {
  switch (s) {
    case MasterStatus::Optimal: return SolveStatus::Optimal;
    case MasterStatus::FeasibleLimit: return SolveStatus::FeasibleLimit;
    case MasterStatus::Infeasible: return SolveStatus::Infeasible;
    case MasterStatus::Error: return SolveStatus::Error;
  }
  return SolveStatus::Error;
}

}  // namespace

void finalize_result(const Instance& inst, ExactResult& res, double g_lower_bound) {
  res.objective = eval_revenue(inst, res.x);
  res.min_objective = eval_min_objective(inst, res.x);
  const double g_bound = std::min(g_lower_bound, res.min_objective);
  res.bound = inst.revenue_constant() - g_bound;
  const double diff = std::max(0.0, res.bound - res.objective);
  if (diff == 0.0) res.gap = 0.0;
  else res.gap = std::abs(res.objective) > 0.0 ? diff / std::abs(res.objective) : kInf;
}

// ---------------------------------------------------------------------------
// Cutting plane.

ExactResult cutting_plane(const Instance& inst, const SolveConfig& cfg, const SolverBackend& backend) {
  const auto t0 = Clock::now();
  check_config(inst, cfg);
  if (inst.products() == 0) return trivial_result(inst, "none", t0);

  auto setup = build_master(inst, cfg, backend, false);
  ExactResult res;
  res.master_used = setup.label;
  res.note = setup.note;

  auto greedy = greedy_family(inst);
  Assortment best = greedy.x;
  double best_g = eval_min_objective(inst, best);

  const Assortment zero(std::size_t(inst.products()), 0);
  for (const Assortment* seed : {static_cast<const Assortment*>(&greedy.x), &zero})
    for (const auto& cut : all_cuts_at(inst, setup, *seed, cfg.cuts, cfg.threads)) setup.model.add_cut(cut);
  res.cuts_added = long(setup.model.cut_count());

  std::set<Assortment> seen;
  double running = -kInf;
  bool proven = false;
  bool limited = false;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    SolveLimits limits;
    limits.time_limit = remaining(cfg, t0);
    if (limits.time_limit <= 0.0) {
      limited = true;
      break;
    }
    limits.warm_start = lift_point(setup.model, inst, setup.part ? &*setup.part : nullptr, best);
    if (cfg.dump_model) {
      auto path = *cfg.dump_model;
      path.replace_filename(path.stem().string() + "_it" + std::to_string(iter) + path.extension().string());
      limits.dump_path = path;
    }
    auto sol = backend.solve(setup.model, limits);
    res.iterations = iter;
    res.nodes += sol.nodes;
    if (sol.status == MasterStatus::FeasibleLimit) {
      running = std::max(running, sol.bound);
      limited = true;
      break;
    }
    if (sol.status != MasterStatus::Optimal)
      throw BackendError(std::string("master solve ended with status ") + to_string(sol.status) + " " + sol.message);

    running = std::max(running, sol.bound);
    const Assortment& xbar = sol.x;
    const double g = eval_min_objective(inst, xbar);
    if (g < best_g) {
      best_g = g;
      best = xbar;
    }

    const double tol = std::max(cfg.epsilon, 1e-6);
    auto targets = violated_targets(inst, setup, sol.values, xbar, tol);
    const bool repeated = !seen.insert(xbar).second;
    long added = 0;
    if (!targets.empty() && !repeated) {
      for (const auto& cut : cuts_for(inst, setup, xbar, targets, cfg.cuts)) {
        setup.model.add_cut(cut);
        ++added;
      }
    }
    res.cuts_added += added;
    res.trace.push_back({iter, sol.bound, running, best_g, added, xbar});

    if (targets.empty() || repeated) {
      proven = true;
      if (!targets.empty()) res.note += (res.note.empty() ? "" : "; ") + std::string("stopped on a repeated candidate");
      break;
    }
    if ((best_g - running) / std::max(1.0, std::abs(best_g)) <= cfg.epsilon) {
      proven = true;
      break;
    }
  }

  res.x = best;
  if (proven) {
    res.status = SolveStatus::Optimal;
    finalize_result(inst, res, running);
  } else {
    res.status = SolveStatus::FeasibleLimit;
    if (!limited) res.note += (res.note.empty() ? "" : "; ") + std::string("iteration limit");
    finalize_result(inst, res, running);
  }
  res.wall_time = seconds_since(t0);
  return res;
}

// ---------------------------------------------------------------------------
// Branch and cut.

namespace {

class MasterSeparator : public LazySeparator {
 public:
  MasterSeparator(const Instance& inst, const MasterSetup& setup, CutKinds kinds)
      : inst_(inst), setup_(setup), kinds_(kinds) {}

  std::vector<Cut> separate(std::span<const double> values, bool integral) override {
    const auto& model = setup_.model;
    if (!integral) {
      // Fractional points: OA cuts of the convex Phi_i, per-class only.
      if (setup_.part) return {};
      std::vector<double> x(std::size_t(inst_.products()));
      for (int j = 0; j < inst_.products(); ++j) x[std::size_t(j)] = values[std::size_t(model.x(j))];
      std::vector<Cut> out;
      for (int i = 0; i < inst_.classes(); ++i)
        if (eval_phi(inst_, i, std::span<const double>(x)) - values[std::size_t(model.y(i))] > 1e-6)
          out.push_back(oa_cut(inst_, i, std::span<const double>(x)));
      count(out.size());
      return out;
    }
    Assortment x(std::size_t(inst_.products()));
    for (int j = 0; j < inst_.products(); ++j) x[std::size_t(j)] = values[std::size_t(model.x(j))] > 0.5 ? 1 : 0;
    auto targets = violated_targets(inst_, setup_, values, x, 1e-6);
    auto cuts = cuts_for(inst_, setup_, x, targets, kinds_);
    count(cuts.size());
    return cuts;
  }

  long emitted() const {
    std::lock_guard lock(mutex_);
    return emitted_;
  }

 private:
  void count(std::size_t k) {
    std::lock_guard lock(mutex_);
    emitted_ += long(k);
  }

  const Instance& inst_;
  const MasterSetup& setup_;
  CutKinds kinds_;
  mutable std::mutex mutex_;
  long emitted_ = 0;
};

}  // namespace

ExactResult branch_and_cut(const Instance& inst, const SolveConfig& cfg, const SolverBackend& backend) {
  const auto t0 = Clock::now();
  check_config(inst, cfg);
  if (!backend.capabilities().lazy_constraints)
    throw UnsupportedError("lazy-unsupported",
                           "backend '" + backend.name() + "' has no lazy-constraint support; use --method cp");
  if (inst.products() == 0) return trivial_result(inst, "none", t0);

  auto setup = build_master(inst, cfg, backend, true);
  ExactResult res;
  res.master_used = setup.label;
  res.note = setup.note;

  auto greedy = greedy_family(inst);
  const Assortment zero(std::size_t(inst.products()), 0);
  for (const Assortment* seed : {static_cast<const Assortment*>(&greedy.x), &zero})
    for (const auto& cut : all_cuts_at(inst, setup, *seed, cfg.cuts, cfg.threads)) setup.model.add_cut(cut);
  const long initial = long(setup.model.cut_count());

  MasterSeparator separator(inst, setup, cfg.cuts);
  SolveLimits limits;
  limits.time_limit = remaining(cfg, t0);
  limits.rel_gap = cfg.epsilon;
  limits.abs_gap = 1e-9;
  limits.warm_start = lift_point(setup.model, inst, setup.part ? &*setup.part : nullptr, greedy.x);
  if (cfg.dump_model) limits.dump_path = cfg.dump_model;
  auto sol = backend.solve_lazy(setup.model, separator, limits);

  res.iterations = sol.lazy_rounds;
  res.nodes = sol.nodes;
  res.cuts_added = initial + sol.lazy_cuts;
  if (!sol.message.empty()) res.note += (res.note.empty() ? "" : "; ") + sol.message;
  res.status = from_master(sol.status);
  if (!sol.has_solution) {
    if (res.status == SolveStatus::Infeasible || res.status == SolveStatus::Error) {
      res.x = zero;
      finalize_result(inst, res, -kInf);
      res.wall_time = seconds_since(t0);
      return res;
    }
    res.x = greedy.x;
  } else {
    res.x = sol.x;
    if (eval_min_objective(inst, greedy.x) < eval_min_objective(inst, res.x)) res.x = greedy.x;
  }
  finalize_result(inst, res, sol.bound);
  res.wall_time = seconds_since(t0);
  return res;
}

// ---------------------------------------------------------------------------
// MILP baseline.

ExactResult milp_baseline(const Instance& inst, const SolveConfig& cfg, const SolverBackend& backend) {
  const auto t0 = Clock::now();
  check_config(inst, cfg);
  const char* label = cfg.linearization == Linearization::McCormick ? "milp-mccormick" : "milp-bigm";
  if (inst.products() == 0) return trivial_result(inst, label, t0);

  auto bounds = build_bound_table(inst, cfg.bound_mode);
  auto model = build_milp_baseline(inst, bounds, cfg.linearization, backend);
  auto greedy = greedy_family(inst);

  SolveLimits limits;
  limits.time_limit = remaining(cfg, t0);
  limits.rel_gap = cfg.epsilon;
  limits.abs_gap = 1e-9;
  limits.warm_start = lift_point(model, inst, nullptr, greedy.x);
  if (cfg.dump_model) limits.dump_path = cfg.dump_model;
  auto sol = backend.solve(model, limits);

  ExactResult res;
  res.master_used = label;
  res.iterations = 1;
  res.nodes = sol.nodes;
  res.status = from_master(sol.status);
  if (!sol.message.empty()) res.note = sol.message;
  if (sol.status == MasterStatus::Error) throw BackendError("MILP solve failed: " + sol.message);
  res.x = sol.has_solution ? sol.x : greedy.x;
  if (sol.has_solution && eval_min_objective(inst, greedy.x) < eval_min_objective(inst, res.x)) res.x = greedy.x;
  finalize_result(inst, res, sol.status == MasterStatus::Infeasible ? -kInf : sol.bound);
  res.wall_time = seconds_since(t0);
  return res;
}

ExactResult greedy_solve(const Instance& inst, const SolveConfig&) {
  const auto t0 = Clock::now();
  auto g = greedy_family(inst);
  ExactResult res;
  res.x = g.x;
  res.status = SolveStatus::Heuristic;
  res.master_used = "none";
  res.iterations = 1;
  // The guarantee bounds the optimum by F(greedy) / ratio.
  const double f = eval_revenue(inst, g.x);
  double g_lower = -kInf;
  if (g.ratio && *g.ratio > 0.0) g_lower = inst.revenue_constant() - f / *g.ratio;
  finalize_result(inst, res, g_lower);
  if (!g.ratio) res.note = "general constraints: no ratio certificate";
  res.wall_time = seconds_since(t0);
  return res;
}

ExactResult solve(const Instance& inst, const SolveConfig& cfg, const SolverBackend& backend) {
  switch (cfg.method) {
    case Method::CP: return cutting_plane(inst, cfg, backend);
    case Method::BC: return branch_and_cut(inst, cfg, backend);
    case Method::MILP: return milp_baseline(inst, cfg, backend);
    case Method::Greedy: return greedy_solve(inst, cfg);
    case Method::Brute: return brute_force(inst, cfg.threads);
  }
  throw InputError("unknown method");
}

}  // namespace assort
