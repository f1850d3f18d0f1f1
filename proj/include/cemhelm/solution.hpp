#pragma once

#include "cemhelm/kernels.hpp"

namespace cemhelm {

enum class SolutionKind { kReference, kMultiscale, kExact, kCoarseFem };

/// Complex nodal field on the fine grid.
struct Solution {
  ComplexVector values;
  SolutionKind kind = SolutionKind::kReference;
};

}  // namespace cemhelm
