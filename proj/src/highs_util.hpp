#pragma once

// Internal helpers around the HiGHS C++ API.

#include <optional>
#include <span>

#include "Highs.h"
#include "assort/model.hpp"

namespace assort::detail {

/// A quiet HiGHS session.
void configure_defaults(Highs& highs);

/// max sum_j w_j x_j over the instance constraints with x_j in [0,1]
/// (integral when `integral`), x_fixed = value. nullopt when infeasible.
std::optional<double> maximize_linear(const Instance& inst, std::span<const double> weights, int fixed,
                                      int value, bool integral);

}  // namespace assort::detail
