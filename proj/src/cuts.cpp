#include "assort/cuts.hpp"

#include <algorithm>
#include <numeric>

#include "assort/error.hpp"

namespace assort {

const char* to_string(CutKind kind) {
  switch (kind) {
    case CutKind::OA: return "OA";
    case CutKind::SC1: return "SC1";
    case CutKind::SC2: return "SC2";
  }
  return "?";
}

double Cut::rhs(std::span<const double> x) const {
  double s = b;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * x[j];
  return s;
}

double Cut::rhs(std::span<const std::uint8_t> x) const {
  double s = b;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (x[j]) s += a[j];
  return s;
}

SegmentPartition SegmentPartition::contiguous(int classes, int groups) {
  if (classes < 1 || groups < 1 || groups > classes)
    throw InputError("segment count must be between 1 and the number of classes");
  std::vector<int> assignment(static_cast<std::size_t>(classes));
  // The first (classes % groups) blocks get one extra class.
  const int base = classes / groups, extra = classes % groups;
  int i = 0;
  for (int l = 0; l < groups; ++l) {
    const int size = base + (l < extra ? 1 : 0);
    for (int k = 0; k < size; ++k) assignment[std::size_t(i++)] = l;
  }
  return SegmentPartition(groups, std::move(assignment));
}

SegmentPartition::SegmentPartition(int groups, std::vector<int> assignment)
    : groups_(groups), assignment_(std::move(assignment)), members_(std::size_t(std::max(groups, 0))) {
  if (groups_ < 1) throw InputError("partition needs at least one group");
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    const int l = assignment_[i];
    if (l < 0 || l >= groups_) throw InputError("class assigned to a group out of range");
    members_[std::size_t(l)].push_back(int(i));
  }
  for (const auto& g : members_)
    if (g.empty()) throw InputError("partition has an empty group");
}

namespace {

Cut make_cut(CutTarget target, int m, CutKind kind, std::span<const std::uint8_t> xbar) {
  Cut c;
  c.target = target;
  c.a.assign(std::size_t(m), 0.0);
  c.kind = kind;
  c.origin.assign(xbar.begin(), xbar.end());
  return c;
}

double full_psi(const Instance& inst, int i) {
  auto v = inst.v_row(i);
  return inst.v0(i) + std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

Cut oa_cut(const Instance& inst, int i, std::span<const std::uint8_t> xbar) {
  check_dimension(inst, xbar);
  const int m = inst.products();
  auto v = inst.v_row(i);
  const double psi = eval_psi(inst, i, xbar);
  const double inv_sq = 1.0 / (psi * psi);
  Cut c = make_cut(CutTarget::y(i), m, CutKind::OA, xbar);
  c.b = 1.0 / psi;
  for (int j = 0; j < m; ++j) {
    c.a[j] = -v[j] * inv_sq;
    if (xbar[j]) c.b += v[j] * inv_sq;
  }
  return c;
}

Cut oa_cut(const Instance& inst, int i, std::span<const double> xbar) {
  const int m = inst.products();
  auto v = inst.v_row(i);
  const double psi = eval_psi(inst, i, xbar);
  const double inv_sq = 1.0 / (psi * psi);
  Cut c;
  c.target = CutTarget::y(i);
  c.kind = CutKind::OA;
  c.a.assign(std::size_t(m), 0.0);
  c.b = 1.0 / psi;
  c.origin.assign(std::size_t(m), 0);
  for (int j = 0; j < m; ++j) {
    c.a[j] = -v[j] * inv_sq;
    c.b += v[j] * inv_sq * xbar[j];
    c.origin[j] = xbar[j] >= 0.5 ? 1 : 0;
  }
  return c;
}

Cut sc_cut_a(const Instance& inst, int i, std::span<const std::uint8_t> xbar) {
  check_dimension(inst, xbar);
  const int m = inst.products();
  auto v = inst.v_row(i);
  const double psi = eval_psi(inst, i, xbar);
  const double psi_full = full_psi(inst, i);
  Cut c = make_cut(CutTarget::y(i), m, CutKind::SC1, xbar);
  c.b = 1.0 / psi;
  for (int k = 0; k < m; ++k) {
    if (v[k] == 0.0) continue;
    if (xbar[k]) {
      // Removal gain at the full set: +g (1 - x_k).
      const double g = v[k] / (psi_full * (psi_full - v[k]));
      c.a[k] = -g;
      c.b += g;
    } else {
      // Addition gain at xbar: v_k (0 - 1) / (Psi(xbar) Psi(xbar + e_k)) x_k.
      c.a[k] = -v[k] / (psi * (psi + v[k]));
    }
  }
  return c;
}

Cut sc_cut_b(const Instance& inst, int i, std::span<const std::uint8_t> xbar) {
  check_dimension(inst, xbar);
  const int m = inst.products();
  auto v = inst.v_row(i);
  const double psi = eval_psi(inst, i, xbar);
  const double psi_empty = inst.v0(i);
  Cut c = make_cut(CutTarget::y(i), m, CutKind::SC2, xbar);
  c.b = 1.0 / psi;
  for (int k = 0; k < m; ++k) {
    if (v[k] == 0.0) continue;
    if (xbar[k]) {
      // Removal gain at xbar: +g (1 - x_k) with g = v_k / (Psi(xbar) Psi(xbar - e_k)).
      const double g = v[k] / (psi * (psi - v[k]));
      c.a[k] = -g;
      c.b += g;
    } else {
      // Addition gain at the empty set.
      c.a[k] = -v[k] / (psi_empty * (psi_empty + v[k]));
    }
  }
  return c;
}

std::vector<Cut> class_cuts(const Instance& inst, int i, std::span<const std::uint8_t> xbar, CutKinds kinds) {
  std::vector<Cut> out;
  if (kinds.oa) out.push_back(oa_cut(inst, i, xbar));
  if (kinds.sc) {
    out.push_back(sc_cut_a(inst, i, xbar));
    out.push_back(sc_cut_b(inst, i, xbar));
  }
  return out;
}

std::vector<Cut> segment_cuts(const Instance& inst, const SegmentPartition& part,
                              std::span<const std::uint8_t> xbar, CutKinds kinds) {
  check_dimension(inst, xbar);
  if (part.classes() != inst.classes()) throw InputError("partition does not match the instance");
  const int m = inst.products();

  std::vector<CutKind> kind_list;
  if (kinds.oa) kind_list.push_back(CutKind::OA);
  if (kinds.sc) {
    kind_list.push_back(CutKind::SC1);
    kind_list.push_back(CutKind::SC2);
  }

  std::vector<Cut> out;
  for (int l = 0; l < part.groups(); ++l) {
    const auto& members = part.members(l);
    for (CutKind kind : kind_list) {
      std::vector<Cut> base;
      base.reserve(members.size());
      for (int i : members) {
        switch (kind) {
          case CutKind::OA: base.push_back(oa_cut(inst, i, xbar)); break;
          case CutKind::SC1: base.push_back(sc_cut_a(inst, i, xbar)); break;
          case CutKind::SC2: base.push_back(sc_cut_b(inst, i, xbar)); break;
        }
      }

      auto aggregate = [&](CutTarget target, auto weight_of) {
        Cut agg = make_cut(target, m, kind, xbar);
        bool any = false;
        for (std::size_t k = 0; k < members.size(); ++k) {
          const double w = weight_of(members[k]);
          if (w == 0.0) continue;
          any = true;
          agg.b += w * base[k].b;
          for (int j = 0; j < m; ++j) agg.a[j] += w * base[k].a[j];
        }
        if (any) out.push_back(std::move(agg));
      };

      aggregate(CutTarget::t(l), [&](int i) { return inst.rho(i) * inst.r_max(i) * inst.v0(i); });
      for (int j = 0; j < m; ++j)
        aggregate(CutTarget::z(l, j), [&](int i) { return inst.rho(i) * inst.r_shift(i, j) * inst.v(i, j); });
    }
  }
  return out;
}

double violation(const Cut& cut, std::span<const double> x, double value) { return cut.rhs(x) - value; }

double violation(const Cut& cut, std::span<const std::uint8_t> x, double value) { return cut.rhs(x) - value; }

double target_value(const Instance& inst, const SegmentPartition* part, const CutTarget& target,
                    std::span<const std::uint8_t> x) {
  switch (target.var) {
    case CutTarget::Var::Y: return eval_phi(inst, target.index, x);
    case CutTarget::Var::T: {
      if (!part) throw InputError("segment target without a partition");
      double s = 0.0;
      for (int i : part->members(target.index))
        s += inst.rho(i) * inst.r_max(i) * inst.v0(i) * eval_phi(inst, i, x);
      return s;
    }
    case CutTarget::Var::Z: {
      if (!part) throw InputError("segment target without a partition");
      const int j = target.product;
      double s = 0.0;
      for (int i : part->members(target.index)) {
        const double w = inst.rho(i) * inst.r_shift(i, j) * inst.v(i, j);
        if (w != 0.0) s += w * eval_phi(inst, i, x);
      }
      return s;
    }
  }
  return 0.0;
}

}  // namespace assort
