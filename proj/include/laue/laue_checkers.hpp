#pragma once

#include "laue/affine_poincare.hpp"
#include "laue/field_types.hpp"
#include "laue/quadrature.hpp"

#include <optional>
#include <string>
#include <vector>

namespace laue::checks {

struct BoostRow {
  int axis = 1;
  double beta = 0.0;
  Vec direct;       // quadrature of the boosted field over the fixed slice
  Vec predicted;    // change-of-variables prediction from rest integrals
  Vec printed;      // same, with the time component as printed (no beta^2 on the stress term)
  Vec fourvector;   // Lambda P
  double fourvector_residual = 0.0;  // max |direct - fourvector| / scale
  double predicted_residual = 0.0;
  double printed_residual = 0.0;     // time component only
};

struct LaueReport {
  Vec P;
  quad::LaueIntegrals stress;
  std::vector<BoostRow> rows;
  double scale = 1.0;  // |P^0|, the reference for relative tolerances
  double tol = 1e-3;
  int grid_N = 0;
  double h = 0.0;
  double stationarity_defect = 0.0;
  double symmetry_defect = 0.0;

  double max_fourvector_residual = 0.0;
  double max_stress = 0.0;  // relative to scale
  bool transform_ok = false;
  bool stress_ok = false;
  bool four_vector = false;
  bool split = false;  // one side of the biconditional without the other

  // strict mode: same report at 2N
  std::optional<double> fine_fourvector_residual;
  std::optional<double> fine_stress;
  std::optional<double> refinement_ratio;
  bool strict_ok = true;
};

struct LaueOptions {
  double tol = 1e-3;
  std::vector<int> axes{1};
  bool strict = false;
};

// The patch is the x^0 = 0 slice; scenario hints reshape its rule.
LaueReport classical_laue_report(const SymTensorField& T, const quad::HyperplanePatch& patch,
                                 const std::vector<double>& betas, const LaueOptions& opt = {});

struct FakeCovariance {
  Vec moved;      // P[g Sigma, g T]
  Vec predicted;  // Lambda P[Sigma, T]
  double residual = 0.0;  // max difference relative to max |P|
};
FakeCovariance fake_covariance_check(const SymTensorField& T, const quad::HyperplanePatch& patch,
                                     const poincare::PoincareElement& g);

struct GaussResidual {
  Vec interior;  // int T^{mu n} d_n phi d^3x
  Vec boundary;  // surface integral of T^{mu n} phi nu_n
  Vec residual;  // |interior - boundary| per mu
  double divergence_defect = 0.0;
  double max() const { return residual.cwiseAbs().maxCoeff(); }
};
// patch: an axis-aligned time-slice box.  grad_phi may be empty (fd is used).
GaussResidual gauss_residual(const SymTensorField& T, const ScalarField& phi, const quad::HyperplanePatch& patch,
                             const CovectorField& grad_phi = {}, double h = 1e-3);

struct GeometricResiduals {
  double rA = 0.0;
  double rB = 0.0;
  double rC = 0.0;
  double A = 0.0, B = 0.0, C = 0.0;  // signed integrals
  double divergence_defect = 0.0;    // precondition: div J
  double lie_defect = 0.0;           // precondition: L_U calJ
};
// dphi may be empty, in which case d(phi) is taken by central differences.
GeometricResiduals geometric_laue_residuals(const VectorField& J, const VectorField& U, const ScalarField& phi,
                                            const quad::HyperplanePatch& patch, const MetricField& g,
                                            const CovectorField& dphi = {}, double h = 1e-3);

struct ExactCurrent {
  VectorField J;
  FormField form;
};
ExactCurrent exact_current_factory(const FormField& lambda, const MetricField& g, double h = 1e-3);

enum class EquivarianceMode { full, restricted };

struct EquivarianceEntry {
  poincare::PoincareElement g;
  Vec lhs;  // flat coefficients of M[g Sigma, g T] (full) or M[Sigma, g T] (restricted)
  Vec rhs;  // coad(g) M[Sigma, T]
  double residual = 0.0;  // |lhs - rhs| / |M[Sigma, T]|
};
struct EquivarianceReport {
  EquivarianceMode mode = EquivarianceMode::full;
  Vec base;  // M[Sigma, T]
  Vec origin;
  int grid_N = 0;
  std::vector<EquivarianceEntry> entries;
  double max_residual() const;
};
EquivarianceReport equivariance_report(const SymTensorField& T, const quad::HyperplanePatch& patch, const Vec& o,
                                       const std::vector<poincare::PoincareElement>& elements,
                                       EquivarianceMode mode);

struct ConservationResult {
  double Q1 = 0.0;
  double Q2 = 0.0;
  double difference = 0.0;
  bool void_check = false;  // support reached the side boundary
  std::string warning;
};
// patch2 must be patch1 shifted in x^0; the box sides join them.
ConservationResult conservation_check(const VectorField& J, const quad::HyperplanePatch& patch1,
                                      const quad::HyperplanePatch& patch2, const MetricField& g);

// Midpoint rule for the integral of div J over the slab between two parallel time slices.
double volume_divergence_integral(const VectorField& J, const quad::HyperplanePatch& patch1, double t2, int Nt,
                                  const MetricField& g, double h = 1e-3);

}  // namespace laue::checks
