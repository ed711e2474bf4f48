#include "doctest.h"

#include "laue/affine_poincare.hpp"
#include "laue/rng.hpp"

#include <cmath>

using namespace laue;
using namespace laue::poincare;

namespace {

const ext::Metric& eta() {
  static const ext::Metric m(ext::Signature::mostly_minus(4));
  return m;
}

// Homogeneous 5x5 picture: group element [[A, a], [0, 1]], algebra element [[B, P], [0, 0]].
Mat hom(const PoincareElement& g) {
  Mat G = Mat::Identity(5, 5);
  G.topLeftCorner(4, 4) = g.A;
  G.topRightCorner(4, 1) = g.a;
  return G;
}
Mat hom(const PoinLieElement& x) {
  Mat X = Mat::Zero(5, 5);
  X.topLeftCorner(4, 4) = x.M_endo(eta());
  X.topRightCorner(4, 1) = x.P;
  return X;
}

Mat taylor_exp(const Mat& X) {
  Mat term = Mat::Identity(X.rows(), X.cols()), sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * X / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

PoinLieElement random_alg(SplitMix64& rng, double scale) {
  Vec c(10);
  for (int i = 0; i < 10; ++i) c(i) = rng.uniform(-scale, scale);
  return PoinLieElement::from_flat(4, c);
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("frozen boost and rotation matrices") {
  const auto b = standard_boost(1, 0.6);
  CHECK(b.A(0, 0) == doctest::Approx(1.25));
  CHECK(b.A(0, 1) == doctest::Approx(0.75));
  CHECK(b.A(1, 0) == doctest::Approx(0.75));
  CHECK(b.A(1, 1) == doctest::Approx(1.25));
  CHECK(b.A(2, 2) == doctest::Approx(1.0));
  CHECK(b.a.norm() == 0.0);
  const auto r = rotation(1, 2, 0.3);
  CHECK(r.A(1, 1) == doctest::Approx(std::cos(0.3)));
  CHECK(std::abs(r.A(1, 2)) == doctest::Approx(std::sin(0.3)));
  CHECK(is_isometry(b, eta()));
  CHECK(is_isometry(r, eta()));
  CHECK_THROWS_AS(standard_boost(1, 1.0), DomainError);
  CHECK_THROWS_AS(standard_boost(0, 0.2), UsageError);
  CHECK_THROWS_AS(rotation(2, 1, 0.2), UsageError);
}

TEST_CASE("exp matches a Taylor series of the homogeneous matrix") {
  SplitMix64 rng(17);
  for (int t = 0; t < 30; ++t) {
    const auto x = random_alg(rng, 0.8);
    const Mat oracle = taylor_exp(hom(x));
    CHECK(max_abs(hom(exp(x, eta())) - oracle) < 1e-12);
  }
}

TEST_CASE("ad is matrix conjugation and the bracket is the matrix commutator") {
  SplitMix64 rng(18);
  for (int t = 0; t < 30; ++t) {
    const auto g = exp(random_alg(rng, 0.6), eta());
    const auto x = random_alg(rng, 1.0), y = random_alg(rng, 1.0);
    const Mat G = hom(g);
    CHECK(max_abs(hom(ad(g, x, eta())) - G * hom(x) * G.inverse()) < 1e-12);
    CHECK(max_abs(hom(lie_bracket(x, y, eta())) - (hom(x) * hom(y) - hom(y) * hom(x))) < 1e-13);
  }
}

TEST_CASE("frozen pairing values") {
  // eta(P, P') + 1/2 M_ab M'^ab with indices lowered by eta
  const Mat G = pairing_gram(4, eta());
  CHECK(G(0, 0) == doctest::Approx(1.0));
  CHECK(G(1, 1) == doctest::Approx(-1.0));
  CHECK(G(4, 4) == doctest::Approx(-1.0));  // e0 ^ e1
  CHECK(G(7, 7) == doctest::Approx(1.0));   // e1 ^ e2
  CHECK(G(0, 4) == doctest::Approx(0.0));
  CHECK(std::abs(G.determinant()) == doctest::Approx(1.0));
}

TEST_CASE("coad is the pairing transpose of ad at the inverse") {
  SplitMix64 rng(19);
  for (int t = 0; t < 50; ++t) {
    const auto g = exp(random_alg(rng, 0.6), eta());
    const auto x = random_alg(rng, 1.0), y = random_alg(rng, 1.0);
    CHECK(pairing(coad(g, x, eta()), ad(g, y, eta()), eta()) == doctest::Approx(pairing(x, y, eta())).epsilon(1e-10));
    CHECK((coad(g, x, eta()).flat() - ad_transpose(invert(g), x, eta()).flat()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("affine commutator matches the closed form") {
  SplitMix64 rng(20);
  Vec b(4), c(4);
  Mat B(4, 4), C(4, 4);
  for (int i = 0; i < 4; ++i) {
    b(i) = rng.uniform(-1, 1);
    c(i) = rng.uniform(-1, 1);
    for (int j = 0; j < 4; ++j) {
      B(i, j) = rng.uniform(-1, 1);
      C(i, j) = rng.uniform(-1, 1);
    }
  }
  const auto [k, K] = affine_commutator(b, B, c, C);
  CHECK(((C * b - B * c) - k).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(max_abs((C * B - B * C) - K) < 1e-14);
}

TEST_CASE("rebase moves the fixed point") {
  const PoincareElement g = compose(standard_boost(2, 0.4), compose(rotation(1, 3, 0.7), translation(Vec::Constant(4, 0.3))));
  Vec o(4), x(4);
  o << 0.1, -0.2, 0.5, 1.0;
  x << 2.0, 0.3, -1.0, 0.4;
  const auto h = rebase(g, o);
  CHECK(((h.A * (x - o) + h.a) - (active_in_chart(g, x) - o)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("chart transitions invert") {
  AffineChartMap B{Vec::Constant(4, 0.5), standard_boost(3, -0.3).A};
  Vec x(4);
  x << 1.0, 2.0, -0.5, 0.25;
  CHECK((chart_transition(inverse(B), chart_transition(B, x)) - x).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(inverse(AffineChartMap{Vec::Zero(4), Mat::Zero(4, 4)}), DomainError);
}

TEST_CASE("fundamental fields are affine and Killing-shaped") {
  Vec o(4);
  o << 0.0, 1.0, 0.0, 0.0;
  const auto boost_gen = PoinLieElement::basis(4, 4);
  const Mat B = boost_gen.M_endo(eta());
  // eta B is antisymmetric for every generator
  CHECK(max_abs(eta().g() * B + (eta().g() * B).transpose()) < 1e-15);
  CHECK((fundamental_value(boost_gen, o, o, eta())).norm() == 0.0);
  CHECK((fundamental_value(PoinLieElement::basis(4, 2), o, Vec::Zero(4), eta()) - basis_vector(4, 2)).norm() == 0.0);
  CHECK_THROWS_AS(PoinLieElement::basis(4, 10), UsageError);
}
