#include "assort/master.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "assort/error.hpp"

namespace assort {

const char* to_string(MasterKind kind) {
  switch (kind) {
    case MasterKind::Li: return "li";
    case MasterKind::Bi: return "bi";
    case MasterKind::LiSegment: return "li-sb";
    case MasterKind::BiSegment: return "bi-sb";
    case MasterKind::MilpMcCormick: return "milp-mccormick";
    case MasterKind::MilpBigM: return "milp-bigm";
  }
  return "?";
}

const char* to_string(MasterStatus status) {
  switch (status) {
    case MasterStatus::Optimal: return "optimal";
    case MasterStatus::FeasibleLimit: return "feasible-limit";
    case MasterStatus::Infeasible: return "infeasible";
    case MasterStatus::Error: return "error";
  }
  return "?";
}

MasterModel::MasterModel(MasterKind kind, int products) : kind_(kind), products_(products) {}

int MasterModel::add_column(Column col) {
  columns_.push_back(std::move(col));
  return int(columns_.size()) - 1;
}

int MasterModel::add_row(Row row) {
  rows_.push_back(std::move(row));
  return int(rows_.size()) - 1;
}

bool MasterModel::is_linear() const {
  if (!objective_bilinear_.empty()) return false;
  return std::none_of(rows_.begin(), rows_.end(), [](const Row& r) { return !r.bilinear.empty(); });
}

int MasterModel::theta(int i, int j) const {
  if (theta_.empty()) return -1;
  return theta_[std::size_t(i) * std::size_t(products_) + std::size_t(j)];
}

int MasterModel::z(int l, int j) const {
  if (z_.empty()) return -1;
  return z_[std::size_t(l) * std::size_t(products_) + std::size_t(j)];
}

int MasterModel::eta(int l, int j) const {
  if (eta_.empty()) return -1;
  return eta_[std::size_t(l) * std::size_t(products_) + std::size_t(j)];
}

void MasterModel::register_segments(int groups, std::vector<int> z, std::vector<int> t, std::vector<int> eta) {
  groups_ = groups;
  z_ = std::move(z);
  t_ = std::move(t);
  eta_ = std::move(eta);
}

int MasterModel::column_for(const CutTarget& target) const {
  int col = -1;
  switch (target.var) {
    case CutTarget::Var::Y:
      if (!y_.empty() && target.index >= 0 && target.index < int(y_.size())) col = y_[std::size_t(target.index)];
      break;
    case CutTarget::Var::Z:
      if (target.index >= 0 && target.index < groups_ && target.product >= 0 && target.product < products_)
        col = z(target.index, target.product);
      break;
    case CutTarget::Var::T:
      if (target.index >= 0 && target.index < groups_) col = t(target.index);
      break;
  }
  if (col < 0) throw InputError("cut target has no column in this master");
  return col;
}

Row MasterModel::cut_row(const Cut& cut) const {
  if (int(cut.a.size()) != products_) throw InputError("cut dimension does not match the master");
  Row row;
  row.index.push_back(column_for(cut.target));
  row.value.push_back(1.0);
  for (int j = 0; j < products_; ++j) {
    if (cut.a[j] == 0.0) continue;
    row.index.push_back(x_[std::size_t(j)]);
    row.value.push_back(-cut.a[j]);
  }
  row.lower = cut.b;
  row.name = "cut" + std::to_string(cut_count_);
  return row;
}

int MasterModel::add_cut(const Cut& cut) {
  Row row = cut_row(cut);
  ++cut_count_;
  return add_row(std::move(row));
}

double MasterModel::objective_value(std::span<const double> values) const {
  double s = 0.0;
  for (std::size_t c = 0; c < columns_.size(); ++c) s += columns_[c].cost * values[c];
  for (const auto& t : objective_bilinear_) s += t.coef * values[std::size_t(t.a)] * values[std::size_t(t.b)];
  return s;
}

MasterSolution SolverBackend::solve_lazy(const MasterModel&, LazySeparator&, const SolveLimits&) const {
  throw UnsupportedError("lazy-unsupported", "backend '" + name() + "' has no lazy-constraint support; use the cutting-plane method");
}

namespace {

void require_milp(const SolverBackend& backend) {
  if (!backend.capabilities().milp)
    throw UnsupportedError("milp-unsupported", "backend '" + backend.name() + "' cannot solve mixed-binary programs");
}

void require_bilinear(const SolverBackend& backend) {
  if (!backend.capabilities().bilinear_objective)
    throw UnsupportedError("bilinear-unsupported",
                           "backend '" + backend.name() + "' has no bilinear objective support; use the li master");
}

// x columns plus one row per capacity constraint. Products that can never
// be offered get upper bound 0.
void add_assortment(MasterModel& model, const Instance& inst, const std::vector<std::uint8_t>* forced_zero) {
  const int m = inst.products();
  std::vector<int> x(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    Column c;
    c.upper = (forced_zero && (*forced_zero)[std::size_t(j)]) ? 0.0 : 1.0;
    c.binary = true;
    c.name = "x" + std::to_string(j);
    x[std::size_t(j)] = model.add_column(std::move(c));
  }
  for (std::size_t k = 0; k < inst.constraints().size(); ++k) {
    const auto& con = inst.constraints()[k];
    Row row;
    for (int j = 0; j < m; ++j) {
      if (con.beta[j] == 0.0) continue;
      row.index.push_back(x[std::size_t(j)]);
      row.value.push_back(con.beta[j]);
    }
    row.upper = con.alpha;
    row.name = "cap" + std::to_string(k);
    model.add_row(std::move(row));
  }
  model.register_x(std::move(x));
}

std::vector<int> add_y(MasterModel& model, const Instance& inst, bool with_cost) {
  std::vector<int> y(std::size_t(inst.classes()));
  for (int i = 0; i < inst.classes(); ++i) {
    Column c;
    c.upper = 1.0 / inst.v0(i);
    c.cost = with_cost ? inst.rho(i) * inst.r_max(i) * inst.v0(i) : 0.0;
    c.name = "y" + std::to_string(i);
    y[std::size_t(i)] = model.add_column(std::move(c));
  }
  model.register_y(y);
  return y;
}

// The four McCormick families for theta = x y with y in [phi(0/1), ...].
void add_mccormick(MasterModel& model, int th, int x, int y, double upper1, double lower1, double lower0,
                   double upper0, const std::string& tag) {
  // theta <= upper1 x
  model.add_row({{th, x}, {1.0, -upper1}, {}, -kInf, 0.0, tag + "_mc1"});
  // theta >= lower1 x
  model.add_row({{th, x}, {1.0, -lower1}, {}, 0.0, kInf, tag + "_mc2"});
  // theta <= y - lower0 (1 - x)
  model.add_row({{th, y, x}, {1.0, -1.0, -lower0}, {}, -kInf, -lower0, tag + "_mc3"});
  // theta >= y - upper0 (1 - x)
  model.add_row({{th, y, x}, {1.0, -1.0, -upper0}, {}, -upper0, kInf, tag + "_mc4"});
}

void add_bigm(MasterModel& model, int th, int x, int y, double v0, const std::string& tag) {
  // v0 theta <= x
  model.add_row({{th, x}, {v0, -1.0}, {}, -kInf, 0.0, tag + "_bm1"});
  // theta <= y
  model.add_row({{th, y}, {1.0, -1.0}, {}, -kInf, 0.0, tag + "_bm2"});
  // v0 (y - theta) <= 1 - x
  model.add_row({{y, th, x}, {v0, -v0, 1.0}, {}, -kInf, 1.0, tag + "_bm3"});
}

// theta_ij columns with objective rho_i r'_ij v_ij.
std::vector<int> add_theta(MasterModel& model, const Instance& inst) {
  const int n = inst.classes(), m = inst.products();
  std::vector<int> th(std::size_t(n) * std::size_t(m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      Column c;
      c.upper = 1.0 / inst.v0(i);
      c.cost = inst.rho(i) * inst.r_shift(i, j) * inst.v(i, j);
      c.name = "th" + std::to_string(i) + "_" + std::to_string(j);
      th[std::size_t(i) * std::size_t(m) + std::size_t(j)] = model.add_column(std::move(c));
    }
  model.register_theta(n, th);
  return th;
}

void add_theta_strengthening(MasterModel& model, const Instance& inst) {
  for (int i = 0; i < inst.classes(); ++i) {
    Row row;
    row.index.push_back(model.y(i));
    row.value.push_back(inst.v0(i));
    for (int j = 0; j < inst.products(); ++j) {
      if (inst.v(i, j) == 0.0) continue;
      row.index.push_back(model.theta(i, j));
      row.value.push_back(inst.v(i, j));
    }
    row.lower = 1.0;
    row.name = "rel" + std::to_string(i);
    model.add_row(std::move(row));
  }
}

void check_bounds(const Instance& inst, const BoundTable& bounds) {
  if (bounds.classes != inst.classes() || bounds.products != inst.products())
    throw InputError("bound table does not match the instance");
}

void check_partition(const Instance& inst, const SegmentPartition& part) {
  if (part.classes() != inst.classes()) throw InputError("segment partition does not cover the instance classes");
}

// Segment columns z_l^j and t_l, bounded by their weights over v0.
struct SegmentColumns {
  std::vector<int> z, t;
};

SegmentColumns add_segment_columns(MasterModel& model, const Instance& inst, const SegmentPartition& part) {
  const int L = part.groups(), m = inst.products();
  SegmentColumns out;
  out.z.resize(std::size_t(L) * std::size_t(m));
  out.t.resize(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    for (int j = 0; j < m; ++j) {
      double ub = 0.0;
      for (int i : part.members(l)) ub += inst.rho(i) * inst.r_shift(i, j) * inst.v(i, j) / inst.v0(i);
      Column c;
      c.upper = ub;
      c.name = "z" + std::to_string(l) + "_" + std::to_string(j);
      out.z[std::size_t(l) * std::size_t(m) + std::size_t(j)] = model.add_column(std::move(c));
    }
    double ub = 0.0;
    for (int i : part.members(l)) ub += inst.rho(i) * inst.r_max(i);
    Column c;
    c.upper = ub;
    c.cost = 1.0;
    c.name = "t" + std::to_string(l);
    out.t[std::size_t(l)] = model.add_column(std::move(c));
  }
  return out;
}

}  // namespace

MasterModel build_li_master(const Instance& inst, const BoundTable& bounds, const SolverBackend& backend,
                            bool strengthen) {
  require_milp(backend);
  check_bounds(inst, bounds);
  MasterModel model(MasterKind::Li, inst.products());
  add_assortment(model, inst, &bounds.forced_zero);
  add_y(model, inst, true);
  add_theta(model, inst);
  for (int i = 0; i < inst.classes(); ++i)
    for (int j = 0; j < inst.products(); ++j)
      add_mccormick(model, model.theta(i, j), model.x(j), model.y(i), 1.0 / (inst.v0(i) + inst.v(i, j)),
                    bounds.phi(i, j, 1), bounds.phi(i, j, 0), 1.0 / inst.v0(i),
                    std::to_string(i) + "_" + std::to_string(j));
  if (strengthen) add_theta_strengthening(model, inst);
  return model;
}

MasterModel build_bi_master(const Instance& inst, const SolverBackend& backend, bool strengthen) {
  require_milp(backend);
  require_bilinear(backend);
  MasterModel model(MasterKind::Bi, inst.products());
  add_assortment(model, inst, nullptr);
  add_y(model, inst, true);
  for (int i = 0; i < inst.classes(); ++i)
    for (int j = 0; j < inst.products(); ++j) {
      const double w = inst.rho(i) * inst.r_shift(i, j) * inst.v(i, j);
      if (w != 0.0) model.add_objective_term({model.x(j), model.y(i), w});
    }
  if (strengthen) {
    for (int i = 0; i < inst.classes(); ++i) {
      Row row;
      row.index.push_back(model.y(i));
      row.value.push_back(inst.v0(i));
      for (int j = 0; j < inst.products(); ++j)
        if (inst.v(i, j) != 0.0) row.bilinear.push_back({model.x(j), model.y(i), inst.v(i, j)});
      row.lower = 1.0;
      row.name = "rel" + std::to_string(i);
      model.add_row(std::move(row));
    }
  }
  return model;
}

MasterModel build_li_master_sb(const Instance& inst, const SegmentPartition& part, const BoundTable& bounds,
                               const SolverBackend& backend) {
  require_milp(backend);
  check_bounds(inst, bounds);
  check_partition(inst, part);
  const int L = part.groups(), m = inst.products();
  MasterModel model(MasterKind::LiSegment, m);
  add_assortment(model, inst, &bounds.forced_zero);
  auto seg = add_segment_columns(model, inst, part);
  std::vector<int> eta(std::size_t(L) * std::size_t(m));
  for (int l = 0; l < L; ++l)
    for (int j = 0; j < m; ++j) {
      double upper1 = 0.0, lower1 = 0.0, lower0 = 0.0, upper0 = 0.0;
      for (int i : part.members(l)) {
        const double w = inst.rho(i) * inst.r_shift(i, j) * inst.v(i, j);
        upper1 += w / (inst.v0(i) + inst.v(i, j));
        lower1 += w * bounds.phi(i, j, 1);
        lower0 += w * bounds.phi(i, j, 0);
        upper0 += w / inst.v0(i);
      }
      Column c;
      c.upper = upper0;
      c.cost = 1.0;
      c.name = "eta" + std::to_string(l) + "_" + std::to_string(j);
      const int col = model.add_column(std::move(c));
      eta[std::size_t(l) * std::size_t(m) + std::size_t(j)] = col;
      add_mccormick(model, col, model.x(j), seg.z[std::size_t(l) * std::size_t(m) + std::size_t(j)], upper1, lower1,
                    lower0, upper0, "g" + std::to_string(l) + "_" + std::to_string(j));
    }
  model.register_segments(L, std::move(seg.z), std::move(seg.t), std::move(eta));
  return model;
}

MasterModel build_bi_master_sb(const Instance& inst, const SegmentPartition& part, const SolverBackend& backend) {
  require_milp(backend);
  require_bilinear(backend);
  check_partition(inst, part);
  const int L = part.groups(), m = inst.products();
  MasterModel model(MasterKind::BiSegment, m);
  add_assortment(model, inst, nullptr);
  auto seg = add_segment_columns(model, inst, part);
  for (int l = 0; l < L; ++l)
    for (int j = 0; j < m; ++j)
      model.add_objective_term({model.x(j), seg.z[std::size_t(l) * std::size_t(m) + std::size_t(j)], 1.0});
  model.register_segments(L, std::move(seg.z), std::move(seg.t), {});
  return model;
}

MasterModel build_milp_baseline(const Instance& inst, const BoundTable& bounds, Linearization lin,
                                const SolverBackend& backend) {
  require_milp(backend);
  check_bounds(inst, bounds);
  MasterModel model(lin == Linearization::McCormick ? MasterKind::MilpMcCormick : MasterKind::MilpBigM,
                    inst.products());
  add_assortment(model, inst, lin == Linearization::McCormick ? &bounds.forced_zero : nullptr);
  add_y(model, inst, true);
  add_theta(model, inst);
  for (int i = 0; i < inst.classes(); ++i)
    for (int j = 0; j < inst.products(); ++j) {
      const std::string tag = std::to_string(i) + "_" + std::to_string(j);
      if (lin == Linearization::McCormick)
        add_mccormick(model, model.theta(i, j), model.x(j), model.y(i), 1.0 / (inst.v0(i) + inst.v(i, j)),
                      bounds.phi(i, j, 1), bounds.phi(i, j, 0), 1.0 / inst.v0(i), tag);
      else
        add_bigm(model, model.theta(i, j), model.x(j), model.y(i), inst.v0(i), tag);
    }
  add_theta_strengthening(model, inst);
  return model;
}

std::vector<double> lift_point(const MasterModel& model, const Instance& inst, const SegmentPartition* part,
                               std::span<const std::uint8_t> x) {
  check_dimension(inst, x);
  std::vector<double> values(model.columns().size(), 0.0);
  for (int j = 0; j < inst.products(); ++j) values[std::size_t(model.x(j))] = x[j];
  std::vector<double> phi(std::size_t(inst.classes()));
  for (int i = 0; i < inst.classes(); ++i) phi[std::size_t(i)] = eval_phi(inst, i, x);

  if (model.y(0) >= 0 || inst.classes() == 0) {
    for (int i = 0; i < inst.classes(); ++i) {
      values[std::size_t(model.y(i))] = phi[std::size_t(i)];
      for (int j = 0; j < inst.products(); ++j)
        if (model.theta(i, j) >= 0) values[std::size_t(model.theta(i, j))] = x[j] * phi[std::size_t(i)];
    }
    return values;
  }

  if (!part) throw InputError("segment master needs its partition to lift a point");
  for (int l = 0; l < part->groups(); ++l) {
    values[std::size_t(model.t(l))] = target_value(inst, part, CutTarget::t(l), x);
    for (int j = 0; j < inst.products(); ++j) {
      const double zv = target_value(inst, part, CutTarget::z(l, j), x);
      values[std::size_t(model.z(l, j))] = zv;
      if (model.eta(l, j) >= 0) values[std::size_t(model.eta(l, j))] = x[j] * zv;
    }
  }
  return values;
}

ModelSize model_size(const MasterModel& model) {
  ModelSize s;
  for (const auto& c : model.columns()) (c.binary ? s.binary : s.continuous) += 1;
  return s;
}

}  // namespace assort
