#pragma once

#include "laue/exterior_algebra.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace laue {

// Where a stationary field's non-smooth set sits, described in the field's
// own rest chart, together with the affine map (x -> A x + a) that has been
// applied to the field since it was built.  Quadrature uses it to place
// nodes so cell faces follow shells and box faces.
struct RestFrameHint {
  enum class Kind { radial, box };
  Kind kind = Kind::radial;
  Vec center;                       // spacetime point in the rest chart
  std::vector<double> radial_breaks;  // increasing radii; the last panel runs to r_out
  double r_out = 0.0;               // 0 means the whole hyperplane
  std::vector<double> box_half_widths;
  Vec shift;  // accumulated translation a
  Mat linear; // accumulated linear part A
};

struct ScalarField {
  int n = 4;
  std::function<double(const Vec&)> eval;
};

struct VectorField {
  int n = 4;
  std::function<Vec(const Vec&)> eval;
};

// Components alpha_a of a one-form field.
struct CovectorField {
  int n = 4;
  std::function<Vec(const Vec&)> eval;
};

struct FormField {
  int n = 4;
  int p = 0;
  std::function<ext::PForm(const Vec&)> eval;
};

// Symmetric (2,0) tensor field T^{ab}, usually an energy-momentum tensor.
struct SymTensorField {
  int n = 4;
  std::function<Mat(const Vec&)> eval;
  std::optional<double> support_radius;
  bool stationary = false;
  std::function<Vec(const Vec&)> analytic_divergence;  // empty when absent
  std::optional<RestFrameHint> hint;
};

// Generic rank-2 covariant tensor field (used for L_K g and nabla K).
struct CovTensorField {
  int n = 4;
  std::function<Mat(const Vec&)> eval;
};

struct MetricField {
  int n = 4;
  std::function<Mat(const Vec&)> eval;
  bool flat = false;

  static MetricField constant(const ext::Signature& sig);
  static MetricField constant(const Mat& g);
  ext::Metric at(const Vec& x) const { return ext::Metric(eval(x)); }
};

// Covector-valued (n-1)-form: one (n-1)-form per value index a.
struct CovectorValuedForm {
  int n = 4;
  std::function<std::vector<ext::PForm>(const Vec&)> eval;
};

}  // namespace laue
