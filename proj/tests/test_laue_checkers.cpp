#include "doctest.h"

#include "laue/fields.hpp"
#include "laue/laue_checkers.hpp"
#include "laue/scenarios.hpp"
#include "laue/suites.hpp"

#include <cmath>

using namespace laue;

namespace {

MetricField eta() { return MetricField::constant(ext::Signature::mostly_minus(4)); }

checks::LaueReport classical(const std::string& name, int N, std::vector<double> betas) {
  scenarios::ScenarioParams p;
  // the completed shell balances only with its whole exterior field
  if (name == "completed_shell") p.R_out = 0.0;
  return checks::classical_laue_report(scenarios::build(name, p).T, quad::time_slice(4, 0.0, 1.0, N), betas);
}

}  // namespace

TEST_CASE("completed shell and dust satisfy both sides") {
  for (const char* n : {"completed_shell", "gaussian_dust"}) {
    const auto r = classical(n, 32, {0.3, 0.9});
    CHECK(r.four_vector);
    CHECK(r.transform_ok);
    CHECK(r.stress_ok);
    CHECK_FALSE(r.split);
  }
}

TEST_CASE("bare shell: four-thirds and the missing beta^2") {
  const auto r = classical("coulomb_shell", 32, {0.6});
  CHECK_FALSE(r.four_vector);
  CHECK_FALSE(r.transform_ok);
  CHECK_FALSE(r.stress_ok);
  CHECK_FALSE(r.split);
  const double P0 = r.P(0), g = 1.25, b = 0.6;
  CHECK(r.stress.component(1, 1) / P0 == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  const auto& row = r.rows.at(0);
  CHECK(row.direct(1) / P0 == doctest::Approx(4.0 / 3.0 * b * g).epsilon(1e-3));
  CHECK(row.direct(0) / P0 == doctest::Approx(g * (1.0 + b * b / 3.0)).epsilon(1e-3));
  CHECK(row.predicted_residual < 1e-12);
  // dropping beta^2 on the stress term misses by gamma (1 - beta^2) S^11 / P0
  CHECK(row.printed_residual == doctest::Approx(g * (1.0 - b * b) / 3.0).epsilon(1e-3));
}

TEST_CASE("uniform field box fails both sides") {
  const auto r = classical("uniform_field_box", 16, {0.3});
  CHECK_FALSE(r.transform_ok);
  CHECK_FALSE(r.stress_ok);
  CHECK(r.stress.component(1, 2) != 0.0);
}

TEST_CASE("classical report refuses non-stationary fields") {
  CHECK_THROWS_AS(classical("moving_dust", 16, {0.3}), DomainError);
}

TEST_CASE("fake covariance holds even for Laue violators") {
  for (const auto& n : scenarios::names()) {
    const auto s = scenarios::build(n);
    const auto f = checks::fake_covariance_check(s.T, quad::time_slice(4, 0, 1, 16),
                                                 poincare::compose(poincare::standard_boost(2, 0.7),
                                                                   poincare::rotation(1, 2, 0.4)));
    CHECK(f.residual < 1e-12);
  }
}

TEST_CASE("Gauss identity on a box cutting the smooth field") {
  const auto T = scenarios::smooth_conserved();
  const ScalarField phi{4, [](const Vec& x) { return x(2); }};
  const auto g = checks::gauss_residual(T, phi, quad::time_slice(4, 0, 1.2, 32));
  CHECK(g.interior.cwiseAbs().maxCoeff() > 1e-2);
  CHECK(g.max() / g.interior.cwiseAbs().maxCoeff() < 2e-3);
}

TEST_CASE("geometric residual routes agree on a coarse grid") {
  const auto T = scenarios::smooth_conserved();
  const auto K = poincare::fundamental_field(poincare::PoinLieElement::basis(4, 2), Vec::Zero(4));
  const auto J = fields::current_from_killing(T, K, eta()).J;
  const VectorField U{4, [](const Vec&) { return basis_vector(4, 0); }};
  const ScalarField phi{4, [](const Vec& x) { return std::cos(x(2)) * std::exp(-x.tail(3).squaredNorm() / 9.0); }};
  const auto r = checks::geometric_laue_residuals(J, U, phi, quad::time_slice(4, 0, 7, 24), eta());
  CHECK(std::abs(r.B - r.C) < 1e-12);
  CHECK(std::abs(r.A - r.B) < 1e-12);
  CHECK(r.lie_defect < 1e-12);
  CHECK(r.divergence_defect < 1e-6);
}

TEST_CASE("exact currents are divergence free") {
  const FormField lambda{4, 2, [](const Vec& x) {
                           return std::exp(-x.tail(3).squaredNorm()) * std::sin(x(1)) * ext::PForm::basis(4, {2, 3});
                         }};
  const auto c = checks::exact_current_factory(lambda, eta());
  const auto div = fields::divergence(c.J, eta());
  for (double s : {0.1, 0.4, -0.8}) CHECK(std::abs(div.eval(Vec::Constant(4, s))) < 1e-9);
}

TEST_CASE("equivariance on a coarse grid") {
  const auto gs = suites::random_elements(3, 2);
  Vec o(4);
  o << 0.0, 0.1, -0.2, 0.05;
  const auto full = checks::equivariance_report(scenarios::build("coulomb_shell").T, quad::time_slice(4, 0, 1, 16), o,
                                                gs, checks::EquivarianceMode::full);
  CHECK(full.max_residual() < 1e-12);
  scenarios::ScenarioParams p;
  p.R_out = 0.0;
  const auto res = checks::equivariance_report(scenarios::build("completed_shell", p).T, quad::time_slice(4, 0, 1, 16),
                                               o, gs, checks::EquivarianceMode::restricted);
  CHECK(res.max_residual() < 1e-2);
  CHECK(res.max_residual() > 1e-8);  // genuine discretisation error, not an exact map
}

TEST_CASE("conservation flags support on the side walls") {
  const VectorField centred{4, [](const Vec& x) -> Vec {
                              Vec j = Vec::Zero(4);
                              j(0) = std::exp(-4.0 * x.tail(3).squaredNorm());
                              return j;
                            }};
  const auto a = checks::conservation_check(centred, quad::time_slice(4, 0, 3, 24), quad::time_slice(4, 1, 3, 24), eta());
  CHECK_FALSE(a.void_check);
  CHECK(std::abs(a.difference) < 1e-14);

  const VectorField edge{4, [](const Vec& x) -> Vec {
                           Vec j = Vec::Zero(4);
                           const double rho = std::exp(-(x(1) - 3.0) * (x(1) - 3.0));
                           j(0) = rho;
                           j(1) = 0.5 * rho;
                           return j;
                         }};
  const auto b = checks::conservation_check(edge, quad::time_slice(4, 0, 3, 24), quad::time_slice(4, 1, 3, 24), eta());
  CHECK(b.void_check);
  CHECK_FALSE(b.warning.empty());
}
