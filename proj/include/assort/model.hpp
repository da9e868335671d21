#pragma once

// Mixed-multinomial-logit assortment instances and objective evaluation.
//
// An instance has n customer classes and m products. Class i arrives with
// weight rho_i and buys product j from assortment S with probability
// v_ij / (v0_i + sum_{k in S} v_ik). The revenue of S is
//
//   F(S) = sum_i rho_i * (sum_{j in S} r_ij v_ij) / (v0_i + sum_{j in S} v_ij)
//
// With r_i = max_j r_ij and r'_ij = r_i - r_ij, F = sum_i rho_i r_i - G where
//
//   G(S) = sum_i rho_i (sum_{j in S} r'_ij v_ij + r_i v0_i) / Psi_i(S)
//
// is the minimisation form every exact method works on, and
// Psi_i(x) = v0_i + sum_j v_ij x_j, Phi_i = 1 / Psi_i.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace assort {

/// Binary assortment indicator, one entry per product.
using Assortment = std::vector<std::uint8_t>;

/// sum_j beta_j x_j <= alpha. A cardinality constraint has beta = 1.
struct LinearConstraint {
  std::vector<double> beta;
  double alpha = 0.0;

  static LinearConstraint cardinality(int m, double capacity);
  bool is_cardinality() const;
};

class Instance {
 public:
  /// `v` and `r` are row-major n x m. Throws InputError when the data
  /// violates the instance invariants.
  Instance(std::vector<double> rho, std::vector<double> v0, std::vector<double> v,
           std::vector<double> r, std::vector<LinearConstraint> constraints = {});

  int classes() const { return n_; }
  int products() const { return m_; }

  double rho(int i) const { return rho_[i]; }
  double v0(int i) const { return v0_[i]; }
  double v(int i, int j) const { return v_[idx(i, j)]; }
  double r(int i, int j) const { return r_[idx(i, j)]; }
  /// r_i = max_j r_ij (0 when m = 0).
  double r_max(int i) const { return r_max_[i]; }
  /// r'_ij = r_i - r_ij >= 0.
  double r_shift(int i, int j) const { return r_shift_[idx(i, j)]; }

  std::span<const double> rho() const { return rho_; }
  std::span<const double> v0() const { return v0_; }
  std::span<const double> v_row(int i) const { return {v_.data() + idx(i, 0), std::size_t(m_)}; }
  std::span<const double> r_row(int i) const { return {r_.data() + idx(i, 0), std::size_t(m_)}; }

  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

  /// The capacity when the only constraint is a single cardinality row.
  std::optional<double> single_cardinality() const;
  /// True when there are no constraints or only cardinality rows.
  bool cardinality_only() const;

  /// sum_i rho_i r_i; F(x) + G(x) equals this for every x.
  double revenue_constant() const { return revenue_constant_; }

  /// min / max over all r_ij.
  double price_min() const { return price_min_; }
  double price_max() const { return price_max_; }

 private:
  std::size_t idx(int i, int j) const { return std::size_t(i) * std::size_t(m_) + std::size_t(j); }

  int n_ = 0;
  int m_ = 0;
  std::vector<double> rho_;
  std::vector<double> v0_;
  std::vector<double> v_;
  std::vector<double> r_;
  std::vector<LinearConstraint> constraints_;
  std::vector<double> r_max_;
  std::vector<double> r_shift_;
  double revenue_constant_ = 0.0;
  double price_min_ = 0.0;
  double price_max_ = 0.0;
};

/// Throws InputError unless x has one entry per product.
void check_dimension(const Instance& inst, std::span<const std::uint8_t> x);

bool is_feasible(const Instance& inst, std::span<const std::uint8_t> x);

/// F(x), the expected revenue.
double eval_revenue(const Instance& inst, std::span<const std::uint8_t> x);
/// G(x), the minimisation form.
double eval_min_objective(const Instance& inst, std::span<const std::uint8_t> x);

/// Psi_i and Phi_i on real-valued x (binary x is a special case).
double eval_psi(const Instance& inst, int i, std::span<const double> x);
double eval_phi(const Instance& inst, int i, std::span<const double> x);
double eval_psi(const Instance& inst, int i, std::span<const std::uint8_t> x);
double eval_phi(const Instance& inst, int i, std::span<const std::uint8_t> x);

/// Unit-price revenue sum_i rho_i (sum_{j in S} v_ij) / Psi_i(S).
double eval_unit_revenue(const Instance& inst, std::span<const std::uint8_t> x);

Assortment assortment_from_subset(int m, std::span<const int> subset);
std::vector<int> subset_from_assortment(std::span<const std::uint8_t> x);

// ---------------------------------------------------------------------------
// JSON persistence.

struct LoadOptions {
  /// Rescale rho to sum to one. Off by default: some families use
  /// unnormalised class weights.
  bool normalize_rho = false;
};

Instance instance_from_json(const nlohmann::json& doc, const LoadOptions& opts = {});
nlohmann::json instance_to_json(const Instance& inst);

Instance load_instance(const std::filesystem::path& path, const LoadOptions& opts = {});
/// Deterministic serialisation: identical instances give identical bytes.
void save_instance(const Instance& inst, const std::filesystem::path& path);

}  // namespace assort
