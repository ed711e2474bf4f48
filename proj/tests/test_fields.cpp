#include "doctest.h"

#include "laue/affine_poincare.hpp"
#include "laue/fields.hpp"
#include "laue/rng.hpp"
#include "laue/scenarios.hpp"

#include <cmath>

using namespace laue;

namespace {

MetricField eta() { return MetricField::constant(ext::Signature::mostly_minus(4)); }

MetricField bumpy() {
  return {4,
          [](const Vec& x) -> Mat {
            Mat m = ext::Signature::mostly_minus(4).matrix();
            const double f = 1.0 + 0.1 * std::sin(x(1));
            m(1, 1) = -f * f;
            return m;
          },
          false};
}

std::vector<Vec> samples(std::uint64_t seed, int count, double scale) {
  SplitMix64 rng(seed);
  std::vector<Vec> xs;
  for (int i = 0; i < count; ++i) {
    Vec x(4);
    for (int k = 0; k < 4; ++k) x(k) = rng.uniform(-scale, scale);
    xs.push_back(x);
  }
  return xs;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("central differences converge at second order") {
  const ScalarField f{4, [](const Vec& x) { return std::sin(x(0)) * std::exp(0.5 * x(2)) + x(3) * x(3) * x(1); }};
  Vec x(4);
  x << 0.3, -0.7, 0.2, 1.1;
  Vec exact(4);
  exact << std::cos(0.3) * std::exp(0.1), x(3) * x(3), 0.5 * std::sin(0.3) * std::exp(0.1), 2.0 * x(3) * x(1);
  const double e1 = (fields::fd_gradient(f, x, 1e-2) - exact).cwiseAbs().maxCoeff();
  const double e2 = (fields::fd_gradient(f, x, 5e-3) - exact).cwiseAbs().maxCoeff();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("d of d vanishes and d(x1 dx2) = dx1 ^ dx2") {
  const FormField w{4, 1, [](const Vec& x) {
                      Vec a(4);
                      a << std::sin(x(1) * x(2)), x(0) * x(3), std::exp(0.2 * x(0)), 0.0;
                      return ext::PForm::covector(a);
                    }};
  const auto dw = fields::exterior_derivative(w);
  const auto ddw = fields::exterior_derivative(dw);
  for (const Vec& x : samples(3, 5, 1.0)) CHECK(ddw.eval(x).max_abs() < 1e-6);

  const FormField v{4, 1, [](const Vec& x) { return x(1) * ext::PForm::basis(4, {2}); }};
  const auto dv = fields::exterior_derivative(v).eval(Vec::Constant(4, 0.4));
  CHECK(dv.at({1, 2}) == doctest::Approx(1.0));
  CHECK(std::abs(dv.at({0, 1})) < 1e-12);
}

TEST_CASE("closed-form boost laws agree with the active transform") {
  const auto T = scenarios::smooth_conserved();
  for (int axis = 1; axis <= 3; ++axis) {
    const auto direct = fields::active_transform(poincare::standard_boost(axis, 0.45), T);
    const auto closed = fields::boost_emt_along(T, axis, 0.45);
    for (const Vec& x : samples(5, 6, 1.5)) CHECK(max_abs(direct.eval(x) - closed.eval(x)) < 1e-12);
  }
  const auto one = fields::boost_emt_analytic(T, -0.3);
  const auto ref = fields::active_transform(poincare::standard_boost(1, -0.3), T);
  for (const Vec& x : samples(6, 6, 1.5)) CHECK(max_abs(one.eval(x) - ref.eval(x)) < 1e-12);
}

TEST_CASE("active transform of a scalar pulls back by the inverse") {
  const ScalarField f{4, [](const Vec& x) { return x(1) + 2.0 * x(0); }};
  const auto g = poincare::translation(basis_vector(4, 1));
  CHECK(fields::active_transform(g, f).eval(basis_vector(4, 1)) == doctest::Approx(0.0));
}

TEST_CASE("smooth conserved field is divergence free by differences too") {
  auto T = scenarios::smooth_conserved();
  T.analytic_divergence = nullptr;
  const auto div = fields::divergence(T, eta(), 1e-3);
  for (const Vec& x : samples(7, 8, 1.0)) CHECK(div.eval(x).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("Killing residuals separate isometries from scalings") {
  const auto pts = samples(8, 6, 1.0);
  for (int k = 0; k < 10; ++k) {
    const auto K = poincare::fundamental_field(poincare::PoinLieElement::basis(4, k), Vec::Zero(4));
    CHECK(fields::killing_residual(K, eta(), pts).total() < 1e-9);
  }
  const VectorField scale{4, [](const Vec& x) -> Vec { return x; }};
  CHECK(fields::killing_residual(scale, eta(), pts).lie_norm == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("Lie derivative of affine fields is the exact commutator") {
  Mat B = Mat::Zero(4, 4), C = Mat::Zero(4, 4);
  B(0, 1) = 0.5;
  B(2, 3) = -1.0;
  C(1, 2) = 2.0;
  C(3, 0) = 0.25;
  const Vec b = Vec::LinSpaced(4, 0.1, 0.4), c = Vec::LinSpaced(4, -1.0, 1.0);
  const VectorField v{4, [=](const Vec& x) -> Vec { return b + B * x; }};
  const VectorField w{4, [=](const Vec& x) -> Vec { return c + C * x; }};
  const auto [k, K] = poincare::affine_commutator(b, B, c, C);
  for (const Vec& x : samples(9, 4, 1.0))
    CHECK((fields::lie_derivative(w, v).eval(x) - (k + K * x)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("christoffel symbols of a stretched axis") {
  Vec x = Vec::Constant(4, 0.3);
  const auto gam = fields::christoffel(bumpy(), x, 1e-4);
  const double f = 1.0 + 0.1 * std::sin(x(1));
  CHECK(gam[1](1, 1) == doctest::Approx(0.1 * std::cos(x(1)) / f).epsilon(1e-6));
  CHECK(std::abs(gam[0](1, 1)) < 1e-9);
  for (const Mat& m : fields::christoffel(eta(), x)) CHECK(max_abs(m) == 0.0);
}

TEST_CASE("current duality and form conversion round trip") {
  const VectorField J{4, [](const Vec& x) -> Vec {
                        Vec j(4);
                        j << 1.0 + x(1) * x(1), std::sin(x(2)), 0.3, -x(0);
                        return j;
                      }};
  const auto back = fields::undual_current(fields::dual_current(J, bumpy()), bumpy());
  const auto T = scenarios::smooth_conserved();
  const auto T2 = fields::form_to_emt(fields::emt_to_form(T, bumpy()), bumpy());
  for (const Vec& x : samples(10, 5, 1.0)) {
    CHECK((back.eval(x) - J.eval(x)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(max_abs(T2.eval(x) - T.eval(x)) < 1e-13);
  }
}

TEST_CASE("stationarity and symmetry defects") {
  const auto dust = scenarios::build("gaussian_dust");
  const auto moving = scenarios::build("moving_dust");
  const auto pts = samples(11, 6, 1.0);
  CHECK(fields::stationarity_defect(dust.T, pts) < 1e-12);
  CHECK(fields::stationarity_defect(moving.T, pts) > 1e-3);
  CHECK(fields::symmetry_defect(moving.T, pts) < 1e-14);
  SymTensorField skew{4, [](const Vec&) -> Mat {
                        Mat m = Mat::Zero(4, 4);
                        m(0, 1) = 1.0;
                        return m;
                      }};
  CHECK(fields::symmetry_defect(skew, pts) == doctest::Approx(1.0));
}

TEST_CASE("identity residuals shrink fourfold when h halves") {
  const auto T = scenarios::smooth_conserved();
  const auto K = poincare::fundamental_field(poincare::PoinLieElement::basis(4, 7), Vec::Zero(4));
  const auto pts = samples(12, 6, 0.8);
  const auto a = fields::identity_residuals(T, K, eta(), 2e-3, pts);
  const auto b = fields::identity_residuals(T, K, eta(), 1e-3, pts);
  CHECK(a.r1 / b.r1 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(a.r2 / b.r2 == doctest::Approx(4.0).epsilon(0.05));
}
