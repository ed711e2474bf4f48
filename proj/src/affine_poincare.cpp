#include "laue/affine_poincare.hpp"

#include <cmath>

namespace laue::poincare {

namespace {

ext::Metric minkowski(int n) { return ext::Metric(ext::Signature::mostly_minus(n)); }

void same_dim(int a, int b) {
  if (a != b) throw UsageError("Poincare operands of different dimension");
}

void require_isometry(const PoincareElement& g, const ext::Metric& eta) {
  const double scale = 1.0 + g.A.cwiseAbs().maxCoeff() * g.A.cwiseAbs().maxCoeff();
  if (!is_isometry(g, eta, 1e-10 * scale)) throw DomainError("group element is not an isometry of eta");
}

Mat wedge_contra(const Vec& u, const Vec& v) { return u * v.transpose() - v * u.transpose(); }

}  // namespace

PoincareElement PoincareElement::identity(int n) { return {Vec::Zero(n), Mat::Identity(n, n)}; }

PoincareElement compose(const PoincareElement& g, const PoincareElement& h) {
  same_dim(g.dim(), h.dim());
  return {g.a + g.A * h.a, g.A * h.A};
}

PoincareElement invert(const PoincareElement& g) {
  Eigen::FullPivLU<Mat> lu(g.A);
  if (!lu.isInvertible()) throw DomainError("singular linear part");
  Mat Ai = lu.inverse();
  return {-Ai * g.a, Ai};
}

Mat linear_part(const PoincareElement& g) { return g.A; }

bool is_isometry(const PoincareElement& g, const ext::Metric& eta, double tol) {
  same_dim(g.dim(), eta.dim());
  return (g.A.transpose() * eta.g() * g.A - eta.g()).cwiseAbs().maxCoeff() < tol;
}

bool is_isometry(const PoincareElement& g, double tol) { return is_isometry(g, minkowski(g.dim()), tol); }

PoincareElement standard_boost(int axis, double beta, int n) {
  if (axis < 1 || axis >= n) throw UsageError("boost axis must be spatial");
  if (!(std::abs(beta) < 1.0)) throw DomainError("boost speed must satisfy |beta| < 1");
  const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  PoincareElement g = PoincareElement::identity(n);
  g.A(0, 0) = gamma;
  g.A(axis, axis) = gamma;
  g.A(0, axis) = beta * gamma;
  g.A(axis, 0) = beta * gamma;
  return g;
}

PoincareElement rotation(int i, int j, double angle, int n) {
  if (i < 1 || j <= i || j >= n) throw UsageError("rotation plane must be spatial with i < j");
  PoincareElement g = PoincareElement::identity(n);
  const double c = std::cos(angle), s = std::sin(angle);
  g.A(i, i) = c;
  g.A(j, j) = c;
  g.A(j, i) = s;
  g.A(i, j) = -s;
  return g;
}

PoincareElement translation(const Vec& a) {
  PoincareElement g = PoincareElement::identity(static_cast<int>(a.size()));
  g.a = a;
  return g;
}

Vec chart_transition(const AffineChartMap& B, const Vec& coords) { return B.basis * coords + B.shift; }

AffineChartMap inverse(const AffineChartMap& B) {
  Eigen::FullPivLU<Mat> lu(B.basis);
  if (!lu.isInvertible()) throw DomainError("singular chart transition");
  Mat Bi = lu.inverse();
  return {-Bi * B.shift, Bi};
}

Vec active_in_chart(const PoincareElement& g, const Vec& coords) { return g.A * coords + g.a; }

PoincareElement rebase(const PoincareElement& g, const Vec& o) { return {g.A * o + g.a - o, g.A}; }

// ---------------------------------------------------------------------------

PoinLieElement PoinLieElement::zero(int n) { return {Vec::Zero(n), Vec::Zero(n * (n - 1) / 2)}; }

PoinLieElement PoinLieElement::translation(const Vec& P) {
  PoinLieElement x = zero(static_cast<int>(P.size()));
  x.P = P;
  return x;
}

PoinLieElement PoinLieElement::wedge(const Vec& u, const Vec& v) {
  same_dim(static_cast<int>(u.size()), static_cast<int>(v.size()));
  PoinLieElement x = zero(static_cast<int>(u.size()));
  x.M = M_from_contra(wedge_contra(u, v));
  return x;
}

PoinLieElement PoinLieElement::basis(int n, int k) {
  PoinLieElement x = zero(n);
  if (k < 0 || k >= basis_size(n)) throw UsageError("Lie-algebra basis index out of range");
  if (k < n)
    x.P(k) = 1.0;
  else
    x.M(k - n) = 1.0;
  return x;
}

Mat PoinLieElement::M_contra() const {
  const int n = dim();
  Mat m = Mat::Zero(n, n);
  const auto& idx = ext::multi_indices(n, 2);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    m(idx[r][0], idx[r][1]) = M(r);
    m(idx[r][1], idx[r][0]) = -M(r);
  }
  return m;
}

Mat PoinLieElement::M_endo(const ext::Metric& eta) const { return M_contra() * eta.g(); }

Vec PoinLieElement::M_from_contra(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  const auto& idx = ext::multi_indices(n, 2);
  Vec M(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) M(r) = 0.5 * (m(idx[r][0], idx[r][1]) - m(idx[r][1], idx[r][0]));
  return M;
}

Vec PoinLieElement::flat() const {
  Vec c(P.size() + M.size());
  c << P, M;
  return c;
}

PoinLieElement PoinLieElement::from_flat(int n, const Vec& c) {
  if (c.size() != basis_size(n)) throw UsageError("coefficient vector has wrong length");
  return {c.head(n), c.tail(n * (n - 1) / 2)};
}

PoinLieElement operator+(const PoinLieElement& x, const PoinLieElement& y) { return {x.P + y.P, x.M + y.M}; }
PoinLieElement operator-(const PoinLieElement& x, const PoinLieElement& y) { return {x.P - y.P, x.M - y.M}; }
PoinLieElement operator*(double s, const PoinLieElement& x) { return {s * x.P, s * x.M}; }

PoinLieElement lie_bracket(const PoinLieElement& x, const PoinLieElement& y, const ext::Metric& eta) {
  same_dim(x.dim(), y.dim());
  const Mat X = x.M_endo(eta), Y = y.M_endo(eta);
  const Mat C = (X * Y - Y * X) * eta.ginv();
  return {X * y.P - Y * x.P, PoinLieElement::M_from_contra(C)};
}

PoinLieElement lie_bracket(const PoinLieElement& x, const PoinLieElement& y) {
  return lie_bracket(x, y, minkowski(x.dim()));
}

double pairing(const PoinLieElement& x, const PoinLieElement& y, const ext::Metric& eta) {
  same_dim(x.dim(), y.dim());
  const Mat& g = eta.g();
  const double trans = x.P.dot(g * y.P);
  const double rot = 0.5 * (g * x.M_contra() * g).cwiseProduct(y.M_contra()).sum();
  return trans + rot;
}

double pairing(const PoinLieElement& x, const PoinLieElement& y) { return pairing(x, y, minkowski(x.dim())); }

Mat pairing_gram(int n, const ext::Metric& eta) {
  const int k = PoinLieElement::basis_size(n);
  Mat G(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) G(i, j) = pairing(PoinLieElement::basis(n, i), PoinLieElement::basis(n, j), eta);
  return G;
}

PoinLieElement ad(const PoincareElement& g, const PoinLieElement& x, const ext::Metric& eta) {
  same_dim(g.dim(), x.dim());
  require_isometry(g, eta);
  const Mat AM = g.A * x.M_contra() * g.A.transpose();
  return {g.A * x.P - AM * eta.g() * g.a, PoinLieElement::M_from_contra(AM)};
}

PoinLieElement ad(const PoincareElement& g, const PoinLieElement& x) { return ad(g, x, minkowski(x.dim())); }

PoinLieElement coad(const PoincareElement& g, const PoinLieElement& x, const ext::Metric& eta) {
  same_dim(g.dim(), x.dim());
  require_isometry(g, eta);
  const Vec AP = g.A * x.P;
  const Mat AM = g.A * x.M_contra() * g.A.transpose();
  return {AP, PoinLieElement::M_from_contra(AM - wedge_contra(g.a, AP))};
}

PoinLieElement coad(const PoincareElement& g, const PoinLieElement& x) { return coad(g, x, minkowski(x.dim())); }

PoinLieElement ad_transpose(const PoincareElement& g, const PoinLieElement& x, const ext::Metric& eta) {
  same_dim(g.dim(), x.dim());
  require_isometry(g, eta);
  const Mat Ai = g.A.inverse();
  const Vec AiP = Ai * x.P;
  const Mat AiM = Ai * x.M_contra() * Ai.transpose();
  return {AiP, PoinLieElement::M_from_contra(AiM + wedge_contra(Ai * g.a, AiP))};
}

PoinLieElement ad_transpose(const PoincareElement& g, const PoinLieElement& x) {
  return ad_transpose(g, x, minkowski(x.dim()));
}

PoincareElement exp(const PoinLieElement& x, const ext::Metric& eta) {
  const int n = x.dim();
  Mat H = Mat::Zero(n + 1, n + 1);
  H.topLeftCorner(n, n) = x.M_endo(eta);
  H.topRightCorner(n, 1) = x.P;

  const double norm = H.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat Hs = H / std::ldexp(1.0, squarings);

  Mat E = Mat::Identity(n + 1, n + 1);
  Mat term = Mat::Identity(n + 1, n + 1);
  for (int k = 1; k < 40; ++k) {
    term = term * Hs / static_cast<double>(k);
    E += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) E = E * E;
  return {E.topRightCorner(n, 1), E.topLeftCorner(n, n)};
}

PoincareElement exp(const PoinLieElement& x) { return exp(x, minkowski(x.dim())); }

Vec fundamental_value(const PoinLieElement& x, const Vec& o, const Vec& point, const ext::Metric& eta) {
  return x.P + x.M_endo(eta) * (point - o);
}

VectorField fundamental_field(const PoinLieElement& x, const Vec& o, const ext::Metric& eta) {
  const Vec P = x.P;
  const Mat B = x.M_endo(eta);
  const Vec origin = o;
  return {x.dim(), [P, B, origin](const Vec& p) -> Vec { return P + B * (p - origin); }};
}

VectorField fundamental_field(const PoinLieElement& x, const Vec& o) {
  return fundamental_field(x, o, minkowski(x.dim()));
}

std::pair<Vec, Mat> affine_commutator(const Vec& b, const Mat& B, const Vec& c, const Mat& C) {
  return {C * b - B * c, C * B - B * C};
}

}  // namespace laue::poincare
