#include "doctest.h"

#include "laue/fields.hpp"
#include "laue/quadrature.hpp"
#include "laue/scenarios.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace laue;

namespace {

const double kPi = std::numbers::pi;

MetricField eta() { return MetricField::constant(ext::Signature::mostly_minus(4)); }

VectorField blob_current(const Vec& v) {
  return {4, [v](const Vec& x) -> Vec {
            const Vec y = x.tail(3) - v * x(0);
            const double rho = std::exp(-2.0 * y.squaredNorm());
            Vec j(4);
            j << rho, rho * v;
            return j;
          }};
}

}  // namespace

TEST_CASE("box volume and Gaussian integral") {
  const auto p = quad::time_slice(4, 0.0, 2.0, 8);
  const auto vol = quad::integrate(p, 1, [](const Vec&, double* out) { out[0] = 1.0; });
  CHECK(vol[0] == doctest::Approx(64.0).epsilon(1e-14));
  const auto g = quad::integrate(quad::time_slice(4, 0.0, 8.0, 64), 1,
                                 [](const Vec& x, double* out) { out[0] = std::exp(-x.tail(3).squaredNorm()); });
  CHECK(g[0] == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-12));
}

TEST_CASE("frozen shell and dust momenta") {
  // closed forms: q^2/(8 pi R) (1 - R/R_out) and rho0 pi^{3/2} sigma^3
  const auto shell = scenarios::build("coulomb_shell");
  const Vec P = quad::four_momentum(shell.T, scenarios::rest_slice(shell, 16));
  CHECK(P(0) == doctest::Approx(0.0397489470372).epsilon(1e-11));
  CHECK(std::abs(P(1)) < 1e-15);
  const auto dust = scenarios::build("gaussian_dust");
  const Vec D = quad::four_momentum(dust.T, scenarios::rest_slice(dust, 48));
  CHECK(D(0) == doctest::Approx(5.56832799683).epsilon(1e-11));
}

TEST_CASE("radial rule integrates a 1/r^4 tail to infinity exactly") {
  const auto p = quad::radial_slice(Vec::Zero(4), {1.0}, 0.0, 8);
  const auto v = quad::integrate(p, 1, [](const Vec& x, double* out) {
    const double r = x.tail(3).norm();
    out[0] = r > 1.0 ? 1.0 / std::pow(r, 4) : 0.0;
  });
  CHECK(v[0] == doctest::Approx(4.0 * kPi).epsilon(1e-13));
}

TEST_CASE("form route and normal route give the same charge on tilted slices") {
  Vec vel(3);
  vel << 0.2, -0.1, 0.05;
  const auto J = blob_current(vel);
  const auto base = quad::time_slice(4, 0.0, 4.0, 32);
  for (const auto& g : {poincare::standard_boost(1, 0.4), poincare::compose(poincare::standard_boost(2, -0.3),
                                                                            poincare::rotation(1, 3, 0.5))}) {
    const auto p = quad::transform_patch(g, base);
    CHECK(quad::flux_charge(J, p, eta()) == doctest::Approx(quad::flux_charge_normal(J, p, eta())).epsilon(1e-12));
  }
  CHECK(quad::param_sign(base, ext::Signature::mostly_minus(4)) == 1);
}

TEST_CASE("charge is invariant under moving both field and slice") {
  Vec vel(3);
  vel << 0.3, 0.0, 0.0;
  const auto J = blob_current(vel);
  const auto base = quad::time_slice(4, 0.0, 4.0, 32);
  const auto g = poincare::compose(poincare::standard_boost(3, 0.5), poincare::translation(Vec::Constant(4, 0.2)));
  const double q0 = quad::flux_charge(J, base, eta());
  const double q1 = quad::flux_charge(fields::active_transform(g, J), quad::transform_patch(g, base), eta());
  CHECK(q1 == doctest::Approx(q0).epsilon(1e-12));
}

TEST_CASE("non-finite integrand raises a located numeric fault") {
  const auto p = quad::time_slice(4, 0.0, 1.0, 4);
  bool located = false;
  try {
    quad::integrate(p, 1, [](const Vec& x, double* out) { out[0] = x(1) > 0.5 ? std::nan("") : 1.0; });
  } catch (const NumericFault& e) {
    located = std::string(e.what()).find("x =") != std::string::npos;
  }
  CHECK(located);
}

TEST_CASE("null normals are rejected") {
  Vec normal(4), origin = Vec::Zero(4);
  normal << 1.0, 1.0, 0.0, 0.0;
  Mat frame = Mat::Zero(4, 3);
  frame(0, 0) = 1.0;
  frame(1, 0) = 1.0;
  frame(2, 1) = 1.0;
  frame(3, 2) = 1.0;
  CHECK_THROWS(quad::validate(quad::make_patch(origin, normal, frame, {1, 1, 1}, {4, 4, 4}),
                              ext::Signature::mostly_minus(4)));
}

TEST_CASE("reduction is deterministic and the thread cap is honoured") {
  const auto dust = scenarios::build("gaussian_dust");
  const auto p = scenarios::rest_slice(dust, 32);
  const Mat a = quad::emt_integral(dust.T, p);
  setenv("LAUE_LAB_THREADS", "1", 1);
  CHECK(quad::worker_count() == 1);
  const Mat b = quad::emt_integral(dust.T, p);
  unsetenv("LAUE_LAB_THREADS");
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Laue integral bookkeeping") {
  Mat S = Mat::Zero(4, 4);
  S(1, 2) = S(2, 1) = 3.0;
  S(3, 3) = -0.5;
  const auto L = quad::laue_from_matrix(S);
  CHECK(quad::LaueIntegrals::names().size() == 9);
  CHECK(L.component(1, 2) == 3.0);
  CHECK(L.component(2, 1) == 3.0);
  CHECK(L.max_abs() == 3.0);
  CHECK_FALSE(L.satisfied(1.0));
  CHECK_THROWS(quad::laue_integrals(scenarios::build("gaussian_dust").T,
                                    quad::transform_patch(poincare::standard_boost(1, 0.3), quad::time_slice(4, 0, 1, 4))));
}

TEST_CASE("momentum map: translations carry the four-momentum") {
  const auto dust = scenarios::build("gaussian_dust");
  const auto p = scenarios::rest_slice(dust, 32);
  Vec o(4);
  o << 0.0, 1.0, 0.0, 0.0;
  const auto m0 = quad::momentum_map(dust.T, p, Vec::Zero(4));
  const auto m1 = quad::momentum_map(dust.T, p, o);
  CHECK((m0.value.P - m1.value.P).norm() < 1e-12);
  CHECK(m0.value.M.cwiseAbs().maxCoeff() < 1e-12);
  // moving the origin by o adds o ^ P to the angular part
  CHECK(m1.value.M.cwiseAbs().maxCoeff() == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-10));
}
