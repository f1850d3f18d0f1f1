#pragma once

#include "cemhelm/assembly.hpp"

namespace cemhelm {

// Discrete norms from the assembled operators: sqrt(u^H X u).
double l2_norm(const DiscreteForms& forms, const ComplexVector& u);
double a_norm(const DiscreteForms& forms, const ComplexVector& u);
double s_norm(const DiscreteForms& forms, const ComplexVector& u);
/// sqrt(k^2 |u|^2 + |u|_a^2).
double k_weighted_norm(const DiscreteForms& forms, const ComplexVector& u);

struct ErrorReport {
  double e_l2 = 0.0;
  double e_a = 0.0;
  double reference_l2 = 0.0;
  double reference_a = 0.0;
  double difference_l2 = 0.0;
  double difference_a = 0.0;
};

/// Relative L2 and energy errors of `approx` against `reference`.
ErrorReport relative_errors(const DiscreteForms& forms, const ComplexVector& reference,
                            const ComplexVector& approx);

}  // namespace cemhelm
