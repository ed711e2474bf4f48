#include "doctest.h"

#include "laue/exterior_algebra.hpp"
#include "laue/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace laue;
using namespace laue::ext;

namespace {

// ---- dense oracle: full index arrays, permutation sums, nothing shared with the library

int perm_sign(std::vector<int> v) {
  int s = 1;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) return 0;
      if (v[i] > v[j]) s = -s;
    }
  return s;
}

struct Dense {
  int n, p;
  std::vector<double> d;  // n^p entries, row-major
  Dense(int n_, int p_) : n(n_), p(p_), d(static_cast<std::size_t>(std::pow(n_, p_)), 0.0) {}
  std::size_t off(const std::vector<int>& idx) const {
    std::size_t o = 0;
    for (int i : idx) o = o * n + i;
    return o;
  }
  double& operator()(const std::vector<int>& idx) { return d[off(idx)]; }
  double operator()(const std::vector<int>& idx) const { return d[off(idx)]; }
};

// all index tuples of length p over 0..n-1
std::vector<std::vector<int>> tuples(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(p, 0);
  const long total = static_cast<long>(std::pow(n, p));
  for (long t = 0; t < total; ++t) {
    long r = t;
    for (int k = p - 1; k >= 0; --k) {
      cur[k] = static_cast<int>(r % n);
      r /= n;
    }
    out.push_back(cur);
  }
  return out;
}

std::vector<std::vector<int>> increasing(int n, int p) {
  std::vector<std::vector<int>> out;
  for (const auto& t : tuples(n, p))
    if (std::is_sorted(t.begin(), t.end()) && std::adjacent_find(t.begin(), t.end()) == t.end()) out.push_back(t);
  return out;
}

Dense expand(const PForm& a) {
  Dense D(a.dim(), a.degree());
  for (const auto& t : tuples(a.dim(), a.degree())) {
    std::vector<int> s = t;
    std::sort(s.begin(), s.end());
    const int sg = perm_sign(t);
    if (sg != 0) D(t) = sg * a.at(s);
  }
  return D;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

// (a ^ b)_I = 1/(p! q!) sum_sigma sgn(sigma) a_{sigma(I)[0..p)} b_{sigma(I)[p..)}
Dense oracle_wedge(const PForm& a, const PForm& b) {
  const int n = a.dim(), p = a.degree(), q = b.degree();
  const Dense A = expand(a), B = expand(b);
  Dense W(n, p + q);
  for (const auto& I : increasing(n, p + q)) {
    std::vector<int> pos(p + q);
    std::iota(pos.begin(), pos.end(), 0);
    double sum = 0.0;
    do {
      std::vector<int> ia, ib;
      for (int k = 0; k < p; ++k) ia.push_back(I[pos[k]]);
      for (int k = p; k < p + q; ++k) ib.push_back(I[pos[k]]);
      sum += perm_sign(pos) * A(ia) * B(ib);
    } while (std::next_permutation(pos.begin(), pos.end()));
    W(I) = sum / (factorial(p) * factorial(q));
  }
  return W;
}

Dense raise(const Dense& A, const Mat& ginv) {
  Dense out = A;
  for (int slot = 0; slot < A.p; ++slot) {
    Dense next(A.n, A.p);
    for (const auto& t : tuples(A.n, A.p)) {
      double s = 0.0;
      std::vector<int> u = t;
      for (int k = 0; k < A.n; ++k) {
        u[slot] = k;
        s += ginv(t[slot], k) * out(u);
      }
      next(t) = s;
    }
    out = next;
  }
  return out;
}

// (*a)_J = 1/p! a^{I} eps_{I J},  eps_{0..n-1} = sqrt|det g|
Dense oracle_hodge(const PForm& a, const Mat& g) {
  const int n = a.dim(), p = a.degree();
  const double vol = std::sqrt(std::abs(g.determinant()));
  const Dense up = raise(expand(a), g.inverse());
  Dense S(n, n - p);
  for (const auto& J : increasing(n, n - p)) {
    double s = 0.0;
    for (const auto& I : tuples(n, p)) {
      std::vector<int> full = I;
      full.insert(full.end(), J.begin(), J.end());
      const int sg = perm_sign(full);
      if (sg != 0) s += up(I) * sg * vol;
    }
    S(J) = s / factorial(p);
  }
  return S;
}

double oracle_inner(const PForm& a, const PForm& b, const Mat& g) {
  const Dense A = expand(a), B = raise(expand(b), g.inverse());
  double s = 0.0;
  for (const auto& t : tuples(a.dim(), a.degree())) s += A(t) * B(t);
  return s / factorial(a.degree());
}

double diff_to_oracle(const PForm& f, const Dense& D) {
  double m = 0.0;
  for (const auto& I : increasing(f.dim(), f.degree())) m = std::max(m, std::abs(f.at(I) - D(I)));
  return m;
}

PForm random_form(SplitMix64& rng, int n, int p) {
  PForm f(n, p);
  for (std::size_t r = 0; r < f.size(); ++r) f[r] = rng.uniform(-1.0, 1.0);
  return f;
}

// Lorentzian or Euclidean signature plus a small symmetric perturbation.
Mat perturbed_metric(SplitMix64& rng, const Signature& sig) {
  Mat g = sig.matrix();
  for (int i = 0; i < sig.n; ++i)
    for (int j = i; j < sig.n; ++j) {
      const double e = rng.uniform(-0.15, 0.15);
      g(i, j) += e;
      if (i != j) g(j, i) += e;
    }
  return g;
}

}  // namespace

TEST_CASE("wedge agrees with the permutation-sum oracle") {
  SplitMix64 rng(101);
  for (int n = 2; n <= 5; ++n)
    for (int p = 0; p <= n; ++p)
      for (int q = 0; p + q <= n; ++q) {
        const PForm a = random_form(rng, n, p), b = random_form(rng, n, q);
        CHECK(diff_to_oracle(wedge(a, b), oracle_wedge(a, b)) < 1e-13);
      }
}

TEST_CASE("hodge star agrees with the Levi-Civita oracle") {
  SplitMix64 rng(202);
  for (int n = 2; n <= 5; ++n)
    for (const Signature& sig : {Signature::mostly_minus(n), Signature::mostly_plus(n)}) {
      const Metric diag(sig);
      const Metric bent(perturbed_metric(rng, sig));
      for (int p = 0; p <= n; ++p) {
        const PForm a = random_form(rng, n, p), b = random_form(rng, n, p);
        CHECK(diff_to_oracle(hodge(a, diag), oracle_hodge(a, diag.g())) < 1e-13);
        CHECK(diff_to_oracle(hodge(a, bent), oracle_hodge(a, bent.g())) < 1e-12);
        CHECK(inner_norm(a, b, bent) == doctest::Approx(oracle_inner(a, b, bent.g())).epsilon(1e-12));
      }
    }
}

TEST_CASE("frozen Minkowski duals") {
  const Metric eta(Signature::mostly_minus(4));
  // values from the oracle above
  CHECK(hodge(PForm::basis(4, {0}), eta).at({1, 2, 3}) == doctest::Approx(1.0));
  CHECK(hodge(PForm::basis(4, {1}), eta).at({0, 2, 3}) == doctest::Approx(1.0));
  CHECK(hodge(PForm::basis(4, {0, 1}), eta).at({2, 3}) == doctest::Approx(-1.0));
  CHECK(hodge(PForm::basis(4, {2, 3}), eta).at({0, 1}) == doctest::Approx(1.0));
  CHECK(hodge(volume_form(eta), eta)[0] == doctest::Approx(-1.0));
  CHECK(hodge(PForm::scalar(4, 1.0), eta).at({0, 1, 2, 3}) == doctest::Approx(1.0));
  CHECK(inner_norm(volume_form(eta), volume_form(eta), eta) == doctest::Approx(-1.0));
  CHECK(hodge_square_sign(4, 1, 3) == 1);
  CHECK(hodge_square_sign(4, 2, 3) == -1);
  CHECK(hodge_square_sign(3, 1, 0) == 1);
}

TEST_CASE("insertion fills the first slot") {
  const PForm f = PForm::basis(4, {0, 1});
  CHECK(insert(basis_vector(4, 0), f).at({1}) == doctest::Approx(1.0));
  CHECK(insert(basis_vector(4, 1), f).at({0}) == doctest::Approx(-1.0));
  CHECK(evaluate(f, {basis_vector(4, 0), basis_vector(4, 1)}) == doctest::Approx(1.0));
  CHECK(evaluate(f, {basis_vector(4, 1), basis_vector(4, 0)}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(insert(basis_vector(4, 0), PForm::scalar(4, 2.0)), UsageError);
}

TEST_CASE("graded algebra properties on seeded forms") {
  SplitMix64 rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + rng.below(5);
    const int p = rng.below(n + 1), q = rng.below(n + 1);
    const PForm a = random_form(rng, n, p), b = random_form(rng, n, q);
    const PForm ab = wedge(a, b), ba = wedge(b, a);
    if (p + q > n) {
      CHECK(ab.overflow());
      continue;
    }
    const double s = ((p * q) % 2 == 0) ? 1.0 : -1.0;
    CHECK((ab - s * ba).max_abs() < 1e-13);
    if (p % 2 == 1) CHECK(wedge(a, a).max_abs() < 1e-13);
  }
}

TEST_CASE("musical isomorphisms are mutually inverse") {
  SplitMix64 rng(404);
  const Metric g(perturbed_metric(rng, Signature::mostly_minus(4)));
  Vec v(4);
  v << 0.3, -1.2, 0.7, 2.0;
  CHECK((musical_inv(musical(v, g), g) - v).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("shape errors") {
  const Metric eta(Signature::mostly_minus(4));
  CHECK_THROWS_AS(PForm(4, 5), UsageError);
  CHECK_THROWS_AS(PForm::basis(4, {0, 7}), UsageError);
  CHECK_THROWS_AS(wedge(PForm(3, 1), PForm(4, 1)), UsageError);
  CHECK_THROWS_AS(hodge(PForm(3, 1), eta), UsageError);
  CHECK_THROWS_AS(PForm(4, 1) + PForm(4, 2), UsageError);
  CHECK_THROWS_AS(Metric(Mat::Zero(4, 4)), DomainError);
  CHECK(PForm::degree_overflow(4).overflow());
}
