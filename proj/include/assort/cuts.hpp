#pragma once

// Linear under-estimators of Phi_i(x) = 1 / Psi_i(x) and of its weighted
// group aggregates.
//
// Three kinds, all tight at the generating point xbar:
//   OA   gradient of the convex Phi_i at xbar
//   SC1  supermodular bound with addition gains at xbar and removal gains
//        at the full set e
//   SC2  supermodular bound with addition gains at the empty set and
//        removal gains at xbar
//
// A cut reads  target >= a^T x + b.

#include <cstdint>
#include <span>
#include <vector>

#include "assort/model.hpp"

namespace assort {

enum class CutKind : std::uint8_t { OA, SC1, SC2 };

const char* to_string(CutKind kind);

/// Which auxiliary variable a cut bounds: y_i (per class), z_l^j or t_l
/// (per segment).
struct CutTarget {
  enum class Var : std::uint8_t { Y, Z, T };
  Var var = Var::Y;
  int index = 0;    ///< class i for Y, group l for Z and T
  int product = 0;  ///< j for Z, unused otherwise

  static CutTarget y(int i) { return {Var::Y, i, 0}; }
  static CutTarget z(int l, int j) { return {Var::Z, l, j}; }
  static CutTarget t(int l) { return {Var::T, l, 0}; }

  friend bool operator==(const CutTarget&, const CutTarget&) = default;
};

struct Cut {
  CutTarget target;
  std::vector<double> a;
  double b = 0.0;
  CutKind kind = CutKind::OA;
  Assortment origin;

  /// a^T x + b.
  double rhs(std::span<const double> x) const;
  double rhs(std::span<const std::uint8_t> x) const;
};

/// Which cut families to emit. `sc` adds both SC1 and SC2.
struct CutKinds {
  bool oa = true;
  bool sc = false;

  static CutKinds oa_only() { return {true, false}; }
  static CutKinds oa_sc() { return {true, true}; }
};

/// Disjoint groups of customer classes covering [n].
class SegmentPartition {
 public:
  /// Contiguous index blocks of near-equal size. Requires 1 <= groups <= n.
  static SegmentPartition contiguous(int classes, int groups);
  /// Explicit class -> group map; groups must be 0..L-1 and non-empty.
  SegmentPartition(int groups, std::vector<int> assignment);

  int groups() const { return groups_; }
  int classes() const { return int(assignment_.size()); }
  int group_of(int i) const { return assignment_[i]; }
  const std::vector<int>& members(int l) const { return members_[l]; }

 private:
  int groups_ = 0;
  std::vector<int> assignment_;
  std::vector<std::vector<int>> members_;
};

Cut oa_cut(const Instance& inst, int i, std::span<const std::uint8_t> xbar);
Cut sc_cut_a(const Instance& inst, int i, std::span<const std::uint8_t> xbar);
Cut sc_cut_b(const Instance& inst, int i, std::span<const std::uint8_t> xbar);

/// OA cut at a fractional point; valid by convexity of Phi_i on [0,1]^m.
Cut oa_cut(const Instance& inst, int i, std::span<const double> xbar);

/// Per-class cuts of the requested kinds for class i, in OA, SC1, SC2 order.
std::vector<Cut> class_cuts(const Instance& inst, int i, std::span<const std::uint8_t> xbar, CutKinds kinds);

/// Aggregated cuts for every group: one t_l cut per kind and one z_l^j
/// cut per kind and product. The t_l cut is the rho_i r_i v0_i weighted sum
/// of per-class cuts; z_l^j uses weights rho_i r'_ij v_ij. Targets whose
/// weights are all zero are skipped (their function is identically zero).
std::vector<Cut> segment_cuts(const Instance& inst, const SegmentPartition& part,
                              std::span<const std::uint8_t> xbar, CutKinds kinds);

/// (a^T x + b) - value. Positive means the cut is violated.
double violation(const Cut& cut, std::span<const double> x, double value);
double violation(const Cut& cut, std::span<const std::uint8_t> x, double value);

/// True value of a segment target at x: G_l^j(x) or R_l(x); Phi_i for Y.
double target_value(const Instance& inst, const SegmentPartition* part, const CutTarget& target,
                    std::span<const std::uint8_t> x);

}  // namespace assort
