#pragma once

#include "laue/exterior_algebra.hpp"
#include "laue/field_types.hpp"

namespace laue::poincare {

// x -> A x + a in the reference chart (origin at the chart's zero).
struct PoincareElement {
  Vec a;
  Mat A;

  static PoincareElement identity(int n);
  int dim() const { return static_cast<int>(a.size()); }
};

PoincareElement compose(const PoincareElement& g, const PoincareElement& h);
PoincareElement invert(const PoincareElement& g);
Mat linear_part(const PoincareElement& g);
bool is_isometry(const PoincareElement& g, const ext::Metric& eta, double tol = 1e-10);
bool is_isometry(const PoincareElement& g, double tol = 1e-10);

PoincareElement standard_boost(int axis, double beta, int n = 4);
PoincareElement rotation(int i, int j, double angle, int n = 4);
PoincareElement translation(const Vec& a);

// Passive change of affine chart: x' = A x + a.
struct AffineChartMap {
  Vec shift;
  Mat basis;
};
Vec chart_transition(const AffineChartMap& B, const Vec& coords);
AffineChartMap inverse(const AffineChartMap& B);
// Active motion of a point, expressed in one fixed chart.
Vec active_in_chart(const PoincareElement& g, const Vec& coords);

// The same affine map written relative to origin o instead of the chart
// origin: x - o -> A (x - o) + (A o + a - o).
PoincareElement rebase(const PoincareElement& g, const Vec& o);

// Element (P, M) of V + Lambda^2 V.  M holds the contravariant components
// M^{ab}, a < b, in the multi_indices(n, 2) order.  As an endomorphism,
// M acts by v -> M^{ab} eta_{bc} v^c, which makes (x^y)(v) = x eta(y,v) - y eta(x,v).
struct PoinLieElement {
  Vec P;
  Vec M;

  static PoinLieElement zero(int n);
  static PoinLieElement translation(const Vec& P);
  static PoinLieElement wedge(const Vec& u, const Vec& v);
  // Basis ordering: e_0..e_{n-1}, then e_a ^ e_b for a < b in multi-index order.
  static PoinLieElement basis(int n, int k);
  static int basis_size(int n) { return n + n * (n - 1) / 2; }

  int dim() const { return static_cast<int>(P.size()); }
  Mat M_contra() const;                          // antisymmetric M^{ab}
  Mat M_endo(const ext::Metric& eta) const;      // M^a_c
  static Vec M_from_contra(const Mat& m);
  Vec flat() const;                              // (P, M) as one coefficient vector
  static PoinLieElement from_flat(int n, const Vec& c);
};

PoinLieElement operator+(const PoinLieElement& x, const PoinLieElement& y);
PoinLieElement operator-(const PoinLieElement& x, const PoinLieElement& y);
PoinLieElement operator*(double s, const PoinLieElement& x);

PoinLieElement lie_bracket(const PoinLieElement& x, const PoinLieElement& y, const ext::Metric& eta);
PoinLieElement lie_bracket(const PoinLieElement& x, const PoinLieElement& y);
double pairing(const PoinLieElement& x, const PoinLieElement& y, const ext::Metric& eta);
double pairing(const PoinLieElement& x, const PoinLieElement& y);
// Gram matrix of the pairing on the basis above.
Mat pairing_gram(int n, const ext::Metric& eta);

PoinLieElement ad(const PoincareElement& g, const PoinLieElement& x, const ext::Metric& eta);
PoinLieElement ad(const PoincareElement& g, const PoinLieElement& x);
PoinLieElement coad(const PoincareElement& g, const PoinLieElement& x, const ext::Metric& eta);
PoinLieElement coad(const PoincareElement& g, const PoinLieElement& x);
PoinLieElement ad_transpose(const PoincareElement& g, const PoinLieElement& x, const ext::Metric& eta);
PoinLieElement ad_transpose(const PoincareElement& g, const PoinLieElement& x);

// exp of the homogeneous (n+1)x(n+1) matrix [[M_endo, P], [0, 0]].
PoincareElement exp(const PoinLieElement& x, const ext::Metric& eta);
PoincareElement exp(const PoinLieElement& x);

Vec fundamental_value(const PoinLieElement& x, const Vec& o, const Vec& point, const ext::Metric& eta);
VectorField fundamental_field(const PoinLieElement& x, const Vec& o, const ext::Metric& eta);
VectorField fundamental_field(const PoinLieElement& x, const Vec& o);

// Commutator of two affine vector fields v(x) = b + B x, exact.
// Returns (c, C) with [v, w](x) = c + C x.
std::pair<Vec, Mat> affine_commutator(const Vec& b, const Mat& B, const Vec& c, const Mat& C);

}  // namespace laue::poincare
