#pragma once

#include "laue/affine_poincare.hpp"
#include "laue/field_types.hpp"

#include <vector>

namespace laue::fields {

constexpr double kDefaultStep = 1e-3;

// Central differences (f(x + h e) - f(x - h e)) / 2h along chart axis `dir`.
ScalarField fd_partial(const ScalarField& f, int dir, double h = kDefaultStep);
VectorField fd_partial(const VectorField& f, int dir, double h = kDefaultStep);
FormField fd_partial(const FormField& f, int dir, double h = kDefaultStep);
SymTensorField fd_partial(const SymTensorField& f, int dir, double h = kDefaultStep);
MetricField fd_partial(const MetricField& f, int dir, double h = kDefaultStep);

Vec fd_gradient(const ScalarField& f, const Vec& x, double h = kDefaultStep);
// J(x)[a][b] = d_b v^a
Mat fd_jacobian(const VectorField& v, const Vec& x, double h = kDefaultStep);
// Directional central difference along an arbitrary vector.
double fd_directional(const ScalarField& f, const Vec& x, const Vec& dir, double h = kDefaultStep);

// gamma[a](b, c) = Gamma^a_{bc}; zero for flat metrics.
std::vector<Mat> christoffel(const MetricField& g, const Vec& x, double h = kDefaultStep);

// nabla_b T^{ab}.  Flat metrics use the analytic hook when present.
VectorField divergence(const SymTensorField& T, const MetricField& g, double h = kDefaultStep);
// nabla_a J^a = |g|^{-1/2} d_a(|g|^{1/2} J^a)
ScalarField divergence(const VectorField& J, const MetricField& g, double h = kDefaultStep);

FormField exterior_derivative(const FormField& w, double h = kDefaultStep);
FormField interior(const VectorField& v, const FormField& w);
FormField wedge(const FormField& a, const FormField& b);
FormField hodge(const FormField& w, const MetricField& g);
// J -> star(J flat)
FormField dual_current(const VectorField& J, const MetricField& g);
// inverse of dual_current: the vector J with star(J flat) = w for an (n-1)-form w
VectorField undual_current(const FormField& w, const MetricField& g);

FormField lie_derivative(const FormField& w, const VectorField& V, double h = kDefaultStep);
CovTensorField lie_derivative(const MetricField& g, const VectorField& V, double h = kDefaultStep);
VectorField lie_derivative(const VectorField& W, const VectorField& V, double h = kDefaultStep);
SymTensorField lie_derivative(const SymTensorField& T, const VectorField& V, double h = kDefaultStep);

// (nabla K-flat)_{ab} = nabla_a K_b
CovTensorField covariant_derivative_flat(const VectorField& K, const MetricField& g, double h = kDefaultStep);

struct KillingResidual {
  double identity = 0.0;  // max |nabla_a K_b + nabla_b K_a - (L_K g)_{ab}|
  double lie_norm = 0.0;  // max |(L_K g)_{ab}|
  double total() const { return identity + lie_norm; }
};
KillingResidual killing_residual(const VectorField& K, const MetricField& g, const std::vector<Vec>& samples,
                                 double h = kDefaultStep);

ScalarField active_transform(const poincare::PoincareElement& g, const ScalarField& f);
VectorField active_transform(const poincare::PoincareElement& g, const VectorField& v);
CovectorField active_transform(const poincare::PoincareElement& g, const CovectorField& a);
SymTensorField active_transform(const poincare::PoincareElement& g, const SymTensorField& T);
FormField active_transform(const poincare::PoincareElement& g, const FormField& w);

// Closed-form component laws for a boost along x^1 (n = 4).
SymTensorField boost_emt_analytic(const SymTensorField& T, double beta);
// Boost along spatial axis k, by conjugating the x^1 laws with the rotation e_1 -> e_k.
SymTensorField boost_emt_along(const SymTensorField& T, int axis, double beta);
Mat axis_rotation(int axis, int n = 4);

CovectorValuedForm emt_to_form(const SymTensorField& T, const MetricField& g);
SymTensorField form_to_emt(const CovectorValuedForm& F, const MetricField& g);
FormField contract(const CovectorValuedForm& F, const VectorField& K);

struct Current {
  VectorField J;
  FormField form;
};
Current current_from_killing(const SymTensorField& T, const VectorField& K, const MetricField& g);

struct IdentityResiduals {
  double r1 = 0.0;
  double r2 = 0.0;
};
IdentityResiduals identity_residuals(const SymTensorField& T, const VectorField& K, const MetricField& g, double h,
                                     const std::vector<Vec>& samples, bool include_killing_term = true);

// max over samples of |d_0 T^{ab}|
double stationarity_defect(const SymTensorField& T, const std::vector<Vec>& samples, double h = kDefaultStep);
double symmetry_defect(const SymTensorField& T, const std::vector<Vec>& samples);

// Coarse/fine residual pair and their ratio.
struct Refinement {
  double coarse = 0.0;
  double fine = 0.0;
  double ratio() const;
};

}  // namespace laue::fields
