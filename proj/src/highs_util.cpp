#include "highs_util.hpp"

#include <vector>

#include "assort/error.hpp"

namespace assort::detail {

void configure_defaults(Highs& highs) {
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("log_to_console", false);
  // Cut rows carry small coefficients; the 1e-6/1e-7 defaults let master
  // optima drift by that much as rows are added.
  highs.setOptionValue("primal_feasibility_tolerance", 1e-9);
  highs.setOptionValue("dual_feasibility_tolerance", 1e-9);
  highs.setOptionValue("mip_feasibility_tolerance", 1e-9);
}

std::optional<double> maximize_linear(const Instance& inst, std::span<const double> weights, int fixed,
                                      int value, bool integral) {
  const int m = inst.products();
  HighsLp lp;
  lp.num_col_ = m;
  lp.num_row_ = int(inst.constraints().size());
  lp.sense_ = ObjSense::kMaximize;
  lp.col_cost_.assign(weights.begin(), weights.end());
  lp.col_lower_.assign(std::size_t(m), 0.0);
  lp.col_upper_.assign(std::size_t(m), 1.0);
  lp.col_lower_[fixed] = lp.col_upper_[fixed] = double(value);

  lp.a_matrix_.format_ = MatrixFormat::kRowwise;
  lp.a_matrix_.num_col_ = m;
  lp.a_matrix_.num_row_ = lp.num_row_;
  lp.a_matrix_.start_.assign(1, 0);
  for (const auto& c : inst.constraints()) {
    for (int j = 0; j < m; ++j) {
      if (c.beta[j] == 0.0) continue;
      lp.a_matrix_.index_.push_back(j);
      lp.a_matrix_.value_.push_back(c.beta[j]);
    }
    lp.a_matrix_.start_.push_back(int(lp.a_matrix_.index_.size()));
    lp.row_lower_.push_back(-kHighsInf);
    lp.row_upper_.push_back(c.alpha);
  }
  if (integral) lp.integrality_.assign(std::size_t(m), HighsVarType::kInteger);

  Highs highs;
  configure_defaults(highs);
  if (integral) {
    highs.setOptionValue("mip_rel_gap", 0.0);
    highs.setOptionValue("mip_abs_gap", 1e-12);
  }
  if (highs.passModel(std::move(lp)) == HighsStatus::kError) throw BackendError("HiGHS rejected bound model");
  highs.run();
  const auto status = highs.getModelStatus();
  if (status == HighsModelStatus::kInfeasible) return std::nullopt;
  if (status != HighsModelStatus::kOptimal) throw BackendError("bound subproblem not solved to optimality");
  // The dual bound over-estimates the maximum, which keeps 1/(v0 + M) a
  // valid lower bound even when the MIP gap is not fully closed.
  if (integral) return highs.getInfo().mip_dual_bound;
  return highs.getInfo().objective_function_value;
}

}  // namespace assort::detail
