#pragma once

#include "laue/field_types.hpp"
#include "laue/quadrature.hpp"

#include <string>
#include <utility>
#include <vector>

namespace laue::scenarios {

// Heaviside-Lorentz units, c = 1.
struct ScenarioParams {
  double q = 1.0;
  double R = 1.0;
  double R_out = 1e3;  // 0 integrates the whole slice
  double rho0 = 1.0;
  double sigma = 1.0;
  double E0 = 1.0;
  double tilt_deg = 45.0;  // field direction in the (1,2) plane
  double box_half = 0.5;   // uniform_field_box is the cube [-box_half, box_half]^3
  double beta = 0.5;       // moving_dust velocity along x^1
  double mollify = 0.0;    // C2 blend width at the shell; 0 keeps the sharp field
};

struct ScenarioSpec {
  std::string name;
  ScenarioParams params;
};

struct Scenario {
  SymTensorField T;
  ScenarioSpec spec;
};

const std::vector<std::string>& names();
Scenario build(const std::string& name, const ScenarioParams& params = {});

// Time slice x^0 = 0 with an N-point rule adapted to the scenario's support.
quad::HyperplanePatch rest_slice(const Scenario& s, int N);

// Compactly decaying static field with T^{ij} = delta^{ij} lap(psi) - d_i d_j psi
// and T^00 = rho: divergence free, with nonzero pointwise stresses.
SymTensorField smooth_conserved(double rho0 = 1.0, double sigma = 1.0, double psi_amp = 0.3, double psi_width = 0.8);

// Electric field of the shell (zero inside; blended when mollify > 0).
Vec shell_field(const ScenarioParams& p, const Vec& x);

struct TolmanResult {
  double L_int = 0.0;
  double passive_mass = 0.0;
  double integrand_residual = 0.0;  // pointwise Tolman identity, max over nodes
};
// Phi is taken constant over the support.
TolmanResult tolman_weak_ep(const SymTensorField& T, const quad::HyperplanePatch& slice, double Phi);

struct Particle {
  double mass = 1.0;
  Vec velocity;  // spatial, 3 components
};
struct KineticSums {
  double energy = 0.0;         // sum m gamma
  double stress = 0.0;         // sum m gamma |v|^2
  double rest_mass = 0.0;      // sum m
  double kinetic = 0.0;        // sum m v^2 / 2
};
KineticSums kinetic_stress_sums(const std::vector<Particle>& particles);

double coulomb_pair_energy(const std::vector<std::pair<double, Vec>>& charges);

struct OrbitParams {
  double q1 = 1.0, q2 = -1.0;
  double m1 = 1.0, m2 = 1.0;
  double d = 1.0;
};
struct VirialResult {
  double kinetic = 0.0;
  double potential = 0.0;
  double residual = 0.0;  // |2 E_kin + U| / |U|
};
VirialResult virial_check(const OrbitParams& orbit);

struct TroutonNoble {
  double transverse_direct = 0.0;  // quadrature of the boosted field
  double closed_form = 0.0;        // -beta E^1 E^2 V
  double T12_integral = 0.0;
};
TroutonNoble trouton_noble_demo(double tilt_deg, double E0, double box_half, double beta, int N = 16);

}  // namespace laue::scenarios
