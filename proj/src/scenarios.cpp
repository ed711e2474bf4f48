#include "laue/scenarios.hpp"

#include "laue/affine_poincare.hpp"
#include "laue/fields.hpp"

#include <cmath>
#include <numbers>

namespace laue::scenarios {

namespace {

constexpr double kPi = std::numbers::pi;

// quintic smoothstep, C2 at both ends
double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double spatial_r(const Vec& x) { return x.tail(3).norm(); }

Mat maxwell_stress(const Vec& E) {
  Mat t = Mat::Zero(4, 4);
  const double e2 = E.squaredNorm();
  t(0, 0) = 0.5 * e2;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) t(a + 1, b + 1) = (a == b ? 0.5 * e2 : 0.0) - E(a) * E(b);
  return t;
}

RestFrameHint radial_hint(const ScenarioParams& p) {
  RestFrameHint h;
  h.kind = RestFrameHint::Kind::radial;
  h.center = Vec::Zero(4);
  if (p.mollify > 0.0)
    h.radial_breaks = {p.R - p.mollify, p.R + p.mollify};
  else
    h.radial_breaks = {p.R};
  h.r_out = p.R_out;
  h.shift = Vec::Zero(4);
  h.linear = Mat::Identity(4, 4);
  return h;
}

RestFrameHint box_hint(double half) {
  RestFrameHint h;
  h.kind = RestFrameHint::Kind::box;
  h.center = Vec::Zero(4);
  h.box_half_widths = {half, half, half};
  h.shift = Vec::Zero(4);
  h.linear = Mat::Identity(4, 4);
  return h;
}

void check_params(const std::string& name, const ScenarioParams& p) {
  auto positive = [&](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(name + ": " + what + " must be positive");
  };
  positive(p.R, "R");
  positive(p.sigma, "sigma");
  positive(p.box_half, "box_half");
  if (p.R_out < 0.0 || (p.R_out > 0.0 && p.R_out <= p.R + p.mollify)) throw UsageError(name + ": R_out must exceed R");
  if (p.mollify < 0.0 || p.mollify >= p.R) throw UsageError(name + ": mollify must lie in [0, R)");
  if (!(std::abs(p.beta) < 1.0)) throw DomainError(name + ": |beta| must be below 1");
}

SymTensorField gaussian_dust(const ScenarioParams& p) {
  SymTensorField T;
  T.n = 4;
  const double rho0 = p.rho0, s2 = p.sigma * p.sigma;
  T.eval = [rho0, s2](const Vec& x) -> Mat {
    Mat t = Mat::Zero(4, 4);
    t(0, 0) = rho0 * std::exp(-x.tail(3).squaredNorm() / s2);
    return t;
  };
  T.stationary = true;
  T.analytic_divergence = [](const Vec&) -> Vec { return Vec::Zero(4); };
  T.hint = box_hint(8.0 * p.sigma);
  return T;
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> k{"gaussian_dust", "coulomb_shell", "completed_shell", "uniform_field_box",
                                          "moving_dust"};
  return k;
}

Vec shell_field(const ScenarioParams& p, const Vec& x) {
  const double r = spatial_r(x);
  Vec E = Vec::Zero(3);
  double w;
  if (p.mollify > 0.0)
    w = smoothstep((r - (p.R - p.mollify)) / (2.0 * p.mollify));
  else
    w = r > p.R ? 1.0 : 0.0;
  if (w == 0.0) return E;
  return w * p.q / (4.0 * kPi * r * r * r) * x.tail(3);
}

Scenario build(const std::string& name, const ScenarioParams& p) {
  check_params(name, p);
  Scenario s{{}, {name, p}};
  SymTensorField& T = s.T;
  if (name == "gaussian_dust") {
    T = gaussian_dust(p);
  } else if (name == "coulomb_shell" || name == "completed_shell") {
    const bool completed = name == "completed_shell";
    const double pressure = p.q * p.q / (32.0 * kPi * kPi * p.R * p.R * p.R * p.R);
    T.n = 4;
    T.eval = [p, completed, pressure](const Vec& x) -> Mat {
      Mat t = maxwell_stress(shell_field(p, x));
      if (completed) {
        const double r = spatial_r(x);
        double inside;
        if (p.mollify > 0.0)
          inside = 1.0 - smoothstep((r - (p.R - p.mollify)) / (2.0 * p.mollify));
        else
          inside = r < p.R ? 1.0 : 0.0;
        // interior tension; matches the radial Maxwell stress -E^2/2 at r = R
        for (int a = 1; a < 4; ++a) t(a, a) -= inside * pressure;
      }
      return t;
    };
    T.stationary = true;
    T.hint = radial_hint(p);
  } else if (name == "uniform_field_box") {
    const double th = p.tilt_deg * kPi / 180.0;
    Vec E(3);
    E << p.E0 * std::cos(th), p.E0 * std::sin(th), 0.0;
    const Mat inside = maxwell_stress(E);
    const double L = p.box_half;
    T.n = 4;
    T.eval = [inside, L](const Vec& x) -> Mat {
      if (x.tail(3).cwiseAbs().maxCoeff() > L) return Mat::Zero(4, 4);
      return inside;
    };
    T.support_radius = std::sqrt(3.0) * L;
    T.stationary = true;
    T.hint = box_hint(L);
  } else if (name == "moving_dust") {
    T = fields::active_transform(poincare::standard_boost(1, p.beta), gaussian_dust(p));
  } else {
    throw UsageError("unknown scenario '" + name + "'");
  }
  return s;
}

quad::HyperplanePatch rest_slice(const Scenario& s, int N) {
  return quad::patch_for(s.T, quad::time_slice(4, 0.0, 1.0, N));
}

SymTensorField smooth_conserved(double rho0, double sigma, double psi_amp, double psi_width) {
  SymTensorField T;
  T.n = 4;
  const double s2 = sigma * sigma, w2 = psi_width * psi_width;
  T.eval = [rho0, s2, psi_amp, w2](const Vec& x) -> Mat {
    const Vec y = x.tail(3);
    const double r2 = y.squaredNorm();
    const double psi = psi_amp * std::exp(-r2 / w2);
    Mat t = Mat::Zero(4, 4);
    t(0, 0) = rho0 * std::exp(-r2 / s2);
    const double diag = (4.0 * r2 / (w2 * w2) - 4.0 / w2) * psi;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i + 1, j + 1) = (i == j ? diag : 0.0) - 4.0 * y(i) * y(j) / (w2 * w2) * psi;
    return t;
  };
  T.stationary = true;
  T.analytic_divergence = [](const Vec&) -> Vec { return Vec::Zero(4); };
  T.hint = box_hint(7.0 * std::max(sigma, psi_width));
  return T;
}

TolmanResult tolman_weak_ep(const SymTensorField& T, const quad::HyperplanePatch& slice, double Phi) {
  if (T.n != 4) throw UsageError("tolman_weak_ep needs n = 4");
  const quad::HyperplanePatch patch = quad::patch_for(T, slice);
  const Mat S = quad::emt_integral(T, patch);
  TolmanResult r;
  r.passive_mass = S.trace();
  r.L_int = Phi * r.passive_mass;

  const Mat eta = ext::Signature::mostly_minus(4).matrix();
  for (const Vec& x : quad::node_positions(quad::with_grid(patch, 6))) {
    const Mat t = T.eval(x);
    const double tr = (eta * t).trace();  // eta_{mu nu} T^{mu nu}
    // 2 (T^{ab} - eta^{ab} tr / 2) n_a n_b with n = e_0
    const double rhs = 2.0 * (t(0, 0) - 0.5 * eta(0, 0) * tr);
    r.integrand_residual = std::max(r.integrand_residual, std::abs(t.trace() - rhs));
  }
  return r;
}

KineticSums kinetic_stress_sums(const std::vector<Particle>& particles) {
  KineticSums k;
  for (const auto& p : particles) {
    if (p.velocity.size() != 3) throw UsageError("particle velocity needs three components");
    const double v2 = p.velocity.squaredNorm();
    if (!(v2 < 1.0)) throw DomainError("particle speed must be below 1");
    if (!(p.mass >= 0.0)) throw UsageError("particle mass must be non-negative");
    const double gamma = 1.0 / std::sqrt(1.0 - v2);
    k.energy += p.mass * gamma;
    k.stress += p.mass * gamma * v2;
    k.rest_mass += p.mass;
    k.kinetic += 0.5 * p.mass * v2;
  }
  return k;
}

double coulomb_pair_energy(const std::vector<std::pair<double, Vec>>& charges) {
  double U = 0.0;
  for (std::size_t a = 0; a < charges.size(); ++a)
    for (std::size_t b = a + 1; b < charges.size(); ++b) {
      const double d = (charges[a].second - charges[b].second).norm();
      if (d == 0.0) throw DomainError("coincident charges");
      U += charges[a].first * charges[b].first / (4.0 * kPi * d);
    }
  return U;
}

VirialResult virial_check(const OrbitParams& o) {
  if (!(o.m1 > 0.0 && o.m2 > 0.0 && o.d > 0.0)) throw UsageError("orbit needs positive masses and separation");
  if (!(o.q1 * o.q2 < 0.0)) throw DomainError("no circular orbit: the pair does not attract");
  const double force = -o.q1 * o.q2 / (4.0 * kPi * o.d * o.d);
  // both bodies circle the centre of mass with a common angular velocity
  const double r1 = o.d * o.m2 / (o.m1 + o.m2), r2 = o.d - r1;
  const double omega2 = force / (o.m1 * r1);
  VirialResult v;
  v.kinetic = 0.5 * omega2 * (o.m1 * r1 * r1 + o.m2 * r2 * r2);
  Vec x1 = Vec::Zero(3), x2 = Vec::Zero(3);
  x2(0) = o.d;
  v.potential = coulomb_pair_energy({{o.q1, x1}, {o.q2, x2}});
  v.residual = std::abs(2.0 * v.kinetic + v.potential) / std::abs(v.potential);
  return v;
}

TroutonNoble trouton_noble_demo(double tilt_deg, double E0, double box_half, double beta, int N) {
  ScenarioParams p;
  p.tilt_deg = tilt_deg;
  p.E0 = E0;
  p.box_half = box_half;
  const Scenario s = build("uniform_field_box", p);
  const auto base = quad::time_slice(4, 0.0, 1.0, N);
  const SymTensorField boosted = fields::boost_emt_analytic(s.T, beta);

  TroutonNoble r;
  r.transverse_direct = quad::four_momentum(boosted, quad::patch_for(boosted, base))(2);
  r.T12_integral = quad::emt_integral(s.T, quad::patch_for(s.T, base))(1, 2);
  const double th = tilt_deg * kPi / 180.0;
  const double V = std::pow(2.0 * box_half, 3);
  r.closed_form = -beta * E0 * std::cos(th) * E0 * std::sin(th) * V;
  return r;
}

}  // namespace laue::scenarios
