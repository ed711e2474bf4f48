#pragma once

#include "laue/affine_poincare.hpp"
#include "laue/field_types.hpp"

#include <array>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace laue::quad {

// Uniform midpoint grid over the box prod_i [-L_i, L_i] in frame coordinates.
struct BoxRule {
  std::vector<double> half_widths;
  std::vector<int> grid;
};

// Spherical midpoint rule in three frame coordinates (n = 4 only).  Radial
// panels [0, b0], [b0, b1], ... are uniform in r; the last panel
// [b_last, r_out] is uniform in u = 1/r, so r_out = 0 (infinity) costs nothing
// extra for 1/r^4 tails.  Polar nodes are uniform in cos(theta).
struct RadialRule {
  std::vector<double> breaks;
  double r_out = 0.0;
  int n_radial = 64;  // per panel
  int n_polar = 64;
  int n_azimuth = 64;
};

struct HyperplanePatch {
  Vec origin;
  Mat frame;  // n x (n-1) tangent vectors, one per column
  Vec normal;
  int orientation = 1;
  std::variant<BoxRule, RadialRule> rule;

  int dim() const { return static_cast<int>(origin.size()); }
  int grid_N() const;
  std::size_t node_count() const;
};

// Box patch on the hyperplane x^0 = t, centred at spatial point `center`.
HyperplanePatch time_slice(int n, double t, double half_width, int N);
HyperplanePatch time_slice_box(const Vec& center, const std::vector<double>& half_widths, const std::vector<int>& grid);
HyperplanePatch make_patch(const Vec& origin, const Vec& normal, const Mat& frame, const std::vector<double>& half_widths,
                           const std::vector<int>& grid, int orientation = 1);
// Whole time slice through `center` (a spacetime point) with a radial rule.
HyperplanePatch radial_slice(const Vec& center, const std::vector<double>& breaks, double r_out, int N);

// Throws on violated invariants.  Adapted patches pass require_orthonormal = false.
void validate(const HyperplanePatch& patch, const ext::Metric& eta, bool require_orthonormal = true);

// +-1: orientation of the parametrisation relative to the oriented patch.
int param_sign(const HyperplanePatch& patch, const ext::Metric& eta);

// g(n,n) i_n eps, the induced measure on the patch.
ext::PForm induced_measure(const HyperplanePatch& patch, const ext::Metric& eta);

// Signed sum over quadrature nodes of weight * f(x), component-wise, with the
// parametrisation Jacobian included.  Reduction order is fixed.
std::vector<double> integrate(const HyperplanePatch& patch, int k,
                              const std::function<void(const Vec& x, double* out)>& f);

double integrate_form(const FormField& w, const HyperplanePatch& patch, const ext::Metric& eta);
double integrate_form(const FormField& w, const HyperplanePatch& patch);

// Q = integral of star(J flat)
double flux_charge(const VectorField& J, const HyperplanePatch& patch, const MetricField& g);
// Q = integral of g(J, n) dmu, with the unit normal taken in g at each node
double flux_charge_normal(const VectorField& J, const HyperplanePatch& patch, const MetricField& g);

Vec four_momentum(const SymTensorField& T, const HyperplanePatch& patch);
// integral of T^{ab} dmu over the patch
Mat emt_integral(const SymTensorField& T, const HyperplanePatch& patch);

struct LaueIntegrals {
  // 01, 02, 03, 11, 12, 13, 22, 23, 33
  std::array<double, 9> values{};
  static const std::array<std::string, 9>& names();
  double max_abs() const;
  bool satisfied(double tol) const { return max_abs() < tol; }
  double component(int a, int b) const;
};
LaueIntegrals laue_integrals(const SymTensorField& T, const HyperplanePatch& patch);
LaueIntegrals laue_from_matrix(const Mat& S);

HyperplanePatch transform_patch(const poincare::PoincareElement& g, const HyperplanePatch& patch);

// Reparametrise the hyperplane of `sigma` so quadrature cells follow the
// field's non-smooth set (needs a field that is stationary in its rest chart).
HyperplanePatch adapt_to_field(const HyperplanePatch& sigma, const RestFrameHint& hint, int N);
// adapt_to_field when T carries a hint, otherwise sigma unchanged.
HyperplanePatch patch_for(const SymTensorField& T, const HyperplanePatch& sigma);

struct MomentumValue {
  poincare::PoinLieElement value;
  std::vector<double> fluxes;
  Vec origin;
};
MomentumValue momentum_map(const SymTensorField& T, const HyperplanePatch& patch, const Vec& o);

struct IntegralRecord {
  std::string name;
  double value = 0.0;
  int grid_N = 0;
  double h = 0.0;
  double refinement_ratio = 0.0;
};

// Same patch with every grid count (box) or per-panel count (radial) set to N.
HyperplanePatch with_grid(const HyperplanePatch& patch, int N);
// Node positions in the chart, in reduction order (serial; meant for coarse grids).
std::vector<Vec> node_positions(const HyperplanePatch& patch);
// Representative cell width in frame units.
double cell_size(const HyperplanePatch& patch);

// Worker threads used by integrate(); LAUE_LAB_THREADS caps it.
int worker_count();

}  // namespace laue::quad
