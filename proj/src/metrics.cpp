#include "cemhelm/metrics.hpp"

#include <cmath>

namespace cemhelm {

namespace {

double quadratic_norm(const RealSparse& x, const ComplexVector& u) {
  if (u.size() != x.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "norm: vector length " + std::to_string(u.size()) +
                                                   " != " + std::to_string(x.rows()));
  }
  // Real symmetric X: u^H X u = re^T X re + im^T X im.
  const RealVector re = u.real();
  const RealVector im = u.imag();
  const double q = re.dot(x * re) + im.dot(x * im);
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace

double l2_norm(const DiscreteForms& forms, const ComplexVector& u) {
  return quadratic_norm(forms.mass, u);
}

double a_norm(const DiscreteForms& forms, const ComplexVector& u) {
  return quadratic_norm(forms.stiffness, u);
}

double s_norm(const DiscreteForms& forms, const ComplexVector& u) {
  return quadratic_norm(forms.weighted_mass, u);
}

double k_weighted_norm(const DiscreteForms& forms, const ComplexVector& u) {
  const double l2 = l2_norm(forms, u);
  const double a = a_norm(forms, u);
  return std::sqrt(forms.k * forms.k * l2 * l2 + a * a);
}

ErrorReport relative_errors(const DiscreteForms& forms, const ComplexVector& reference,
                            const ComplexVector& approx) {
  if (reference.size() != approx.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "relative_errors: fields differ in length");
  }
  ErrorReport r;
  const ComplexVector diff = approx - reference;
  r.reference_l2 = l2_norm(forms, reference);
  r.reference_a = a_norm(forms, reference);
  r.difference_l2 = l2_norm(forms, diff);
  r.difference_a = a_norm(forms, diff);
  if (r.reference_l2 == 0.0 || r.reference_a == 0.0) {
    throw Error(ErrorKind::kZeroReference, "reference field has zero norm");
  }
  r.e_l2 = r.difference_l2 / r.reference_l2;
  r.e_a = r.difference_a / r.reference_a;
  return r;
}

}  // namespace cemhelm
