#include "laue/exterior_algebra.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <fmt/format.h>

namespace laue::ext {

namespace {

struct IndexTables {
  // lists[n][p] = increasing tuples; rank[n][mask] = offset within degree popcount(mask)
  std::array<std::array<std::vector<std::vector<int>>, kMaxDim + 1>, kMaxDim + 1> lists;
  std::array<std::vector<std::size_t>, kMaxDim + 1> rank;

  IndexTables() {
    for (int n = 0; n <= kMaxDim; ++n) {
      rank[n].assign(std::size_t{1} << n, 0);
      for (int p = 0; p <= n; ++p) {
        std::vector<int> idx(p);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
          std::uint32_t mask = 0;
          for (int i : idx) mask |= 1u << i;
          rank[n][mask] = lists[n][p].size();
          lists[n][p].push_back(idx);
          int k = p - 1;
          while (k >= 0 && idx[k] == n - p + k) --k;
          if (k < 0) break;
          ++idx[k];
          for (int j = k + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
        }
      }
    }
  }
};

const IndexTables& tables() {
  static const IndexTables t;
  return t;
}

void check_dim(int n) {
  if (n < 1 || n > kMaxDim) throw UsageError("dimension must lie in [1, 8]");
}

std::uint32_t mask_of(const std::vector<int>& idx) {
  std::uint32_t m = 0;
  for (int i : idx) m |= 1u << i;
  return m;
}

// Sign of the shuffle that sorts the concatenation (I, J) of two disjoint
// increasing index sets: (-1)^{#{(i,j): i > j}}.
int shuffle_sign(std::uint32_t I, std::uint32_t J) {
  int inversions = 0;
  for (std::uint32_t rest = J; rest != 0; rest &= rest - 1) {
    int j = std::countr_zero(rest);
    inversions += std::popcount(I >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

// alpha^I = sum_K det(ginv[I,K]) alpha_K
std::vector<double> raise_all(const PForm& a, const Metric& g) {
  const int n = a.dim(), p = a.degree();
  const auto& idx = multi_indices(n, p);
  std::vector<double> up(a.size(), 0.0);
  if (g.diagonal()) {
    for (std::size_t r = 0; r < idx.size(); ++r) {
      double f = 1.0;
      for (int i : idx[r]) f *= g.ginv()(i, i);
      up[r] = f * a[r];
    }
    return up;
  }
  Mat minor(p, p);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (a[k] == 0.0) continue;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) minor(i, j) = g.ginv()(idx[r][i], idx[k][j]);
      s += (p == 0 ? 1.0 : minor.determinant()) * a[k];
    }
    up[r] = s;
  }
  return up;
}

}  // namespace

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

const std::vector<std::vector<int>>& multi_indices(int n, int p) {
  check_dim(n);
  if (p < 0 || p > n) throw UsageError("degree out of range");
  return tables().lists[n][p];
}

std::size_t rank_of(const std::vector<int>& increasing, int n) {
  return tables().rank[n][mask_of(increasing)];
}

std::size_t rank_of_mask(std::uint32_t mask, int n) { return tables().rank[n][mask]; }

int sort_sign(std::vector<int>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i - 1] == idx[i]) return 0;
  return sign;
}

// ---------------------------------------------------------------------------

Signature Signature::mostly_minus(int n) {
  check_dim(n);
  Signature s{n, std::vector<int>(n, -1)};
  s.diag[0] = 1;
  return s;
}

Signature Signature::mostly_plus(int n) {
  check_dim(n);
  Signature s{n, std::vector<int>(n, 1)};
  s.diag[0] = -1;
  return s;
}

int Signature::n_minus() const { return static_cast<int>(std::count(diag.begin(), diag.end(), -1)); }

Mat Signature::matrix() const {
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = diag[i];
  return m;
}

Metric::Metric(const Signature& sig)
    : n_(sig.n), g_(sig.matrix()), ginv_(sig.matrix()), vol_(1.0), n_minus_(sig.n_minus()), diagonal_(true) {
  check_dim(n_);
  if (static_cast<int>(sig.diag.size()) != n_) throw UsageError("signature length differs from n");
  for (int d : sig.diag)
    if (d != 1 && d != -1) throw UsageError("signature entries must be +-1");
}

Metric::Metric(const Mat& g) : n_(static_cast<int>(g.rows())), g_(g) {
  check_dim(n_);
  if (g.rows() != g.cols()) throw UsageError("metric must be square");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
    throw UsageError("metric must be symmetric");
  const double det = g.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-300) throw DomainError("degenerate metric");
  vol_ = std::sqrt(std::abs(det));
  diagonal_ = (g - Mat(g.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (diagonal_) {
    ginv_ = Mat::Zero(n_, n_);
    n_minus_ = 0;
    for (int i = 0; i < n_; ++i) {
      ginv_(i, i) = 1.0 / g(i, i);
      if (g(i, i) < 0) ++n_minus_;
    }
  } else {
    ginv_ = g.inverse();
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    n_minus_ = static_cast<int>((es.eigenvalues().array() < 0).count());
  }
}

// ---------------------------------------------------------------------------

PForm::PForm(int n, int p) : n_(n), p_(p) {
  check_dim(n);
  if (p < 0 || p > n) throw UsageError("degree out of range");
  c_.assign(binomial(n, p), 0.0);
}

PForm PForm::basis(int n, const std::vector<int>& idx) {
  PForm f(n, static_cast<int>(idx.size()));
  std::vector<int> s = idx;
  for (int i : s)
    if (i < 0 || i >= n) throw UsageError("basis index out of range");
  int sign = sort_sign(s);
  if (sign != 0) f.c_[rank_of(s, n)] = sign;
  return f;
}

PForm PForm::scalar(int n, double value) {
  PForm f(n, 0);
  f.c_[0] = value;
  return f;
}

PForm PForm::covector(const Vec& a) {
  PForm f(static_cast<int>(a.size()), 1);
  for (int i = 0; i < a.size(); ++i) f.c_[i] = a(i);
  return f;
}

PForm PForm::degree_overflow(int n) {
  PForm f(n, n);
  f.overflow_ = true;
  return f;
}

double PForm::at(std::vector<int> idx) const {
  if (static_cast<int>(idx.size()) != p_) throw UsageError("index tuple length differs from degree");
  int sign = sort_sign(idx);
  if (sign == 0) return 0.0;
  return sign * c_[rank_of(idx, n_)];
}

double PForm::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

PForm& PForm::operator+=(const PForm& o) {
  if (o.n_ != n_ || o.p_ != p_) throw UsageError("adding forms of different shape");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  overflow_ = overflow_ && o.overflow_;
  return *this;
}

PForm& PForm::operator-=(const PForm& o) {
  if (o.n_ != n_ || o.p_ != p_) throw UsageError("subtracting forms of different shape");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  overflow_ = overflow_ && o.overflow_;
  return *this;
}

PForm& PForm::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

PForm operator+(PForm a, const PForm& b) { return a += b; }
PForm operator-(PForm a, const PForm& b) { return a -= b; }
PForm operator*(double s, PForm a) { return a *= s; }

std::string PForm::render(int precision) const {
  if (overflow_) return "0 (degree overflow)";
  const auto& idx = multi_indices(n_, p_);
  std::string out;
  for (std::size_t r = 0; r < c_.size(); ++r) {
    if (c_[r] == 0.0) continue;
    if (!out.empty()) out += ' ';
    out += fmt::format("{:+.{}g}", c_[r], precision);
    for (std::size_t k = 0; k < idx[r].size(); ++k) out += fmt::format("{}{}", k == 0 ? " θ" : "^θ", idx[r][k]);
  }
  return out.empty() ? "0" : out;
}

PForm volume_form(const Metric& g) {
  PForm e(g.dim(), g.dim());
  e[0] = g.sqrt_abs_det();
  return e;
}

// ---------------------------------------------------------------------------

DenseTensor::DenseTensor(int n_, int p_) : n(n_), p(p_) {
  std::size_t sz = 1;
  for (int i = 0; i < p; ++i) sz *= static_cast<std::size_t>(n);
  data.assign(sz, 0.0);
}

std::size_t DenseTensor::offset(const std::vector<int>& idx) const {
  std::size_t o = 0;
  for (int i : idx) o = o * n + i;
  return o;
}

double& DenseTensor::at(const std::vector<int>& idx) { return data[offset(idx)]; }
double DenseTensor::at(const std::vector<int>& idx) const { return data[offset(idx)]; }

DenseTensor alt(const DenseTensor& t) {
  DenseTensor out(t.n, t.p);
  if (t.p > t.n) return out;
  std::vector<int> perm(t.p);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::pair<std::vector<int>, int>> perms;
  do {
    std::vector<int> q = perm;
    perms.emplace_back(perm, sort_sign(q));
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double inv = 1.0 / static_cast<double>(perms.size());

  std::vector<int> idx(t.p, 0), src(t.p);
  for (std::size_t lin = 0; lin < t.data.size(); ++lin) {
    std::size_t rem = lin;
    for (int k = t.p - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rem % t.n);
      rem /= t.n;
    }
    double s = 0.0;
    for (const auto& [pm, sg] : perms) {
      for (int k = 0; k < t.p; ++k) src[k] = idx[pm[k]];
      s += sg * t.at(src);
    }
    out.data[lin] = s * inv;
  }
  return out;
}

DenseTensor to_dense(const PForm& a) {
  DenseTensor t(a.dim(), a.degree());
  std::vector<int> idx(a.degree(), 0);
  for (std::size_t lin = 0; lin < t.data.size(); ++lin) {
    std::size_t rem = lin;
    for (int k = a.degree() - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rem % a.dim());
      rem /= a.dim();
    }
    t.data[lin] = a.at(idx);
  }
  return t;
}

PForm from_dense(const DenseTensor& t) {
  if (t.p > t.n) return PForm::degree_overflow(t.n);
  PForm a(t.n, t.p);
  const auto& idx = multi_indices(t.n, t.p);
  for (std::size_t r = 0; r < idx.size(); ++r) a[r] = t.at(idx[r]);
  return a;
}

PForm wedge(const PForm& a, const PForm& b) {
  if (a.dim() != b.dim()) throw UsageError("wedge of forms over different dimensions");
  const int n = a.dim(), p = a.degree(), q = b.degree();
  if (p + q > n || a.overflow() || b.overflow()) return PForm::degree_overflow(n);
  PForm out(n, p + q);
  const auto& I = multi_indices(n, p);
  const auto& J = multi_indices(n, q);
  for (std::size_t i = 0; i < I.size(); ++i) {
    if (a[i] == 0.0) continue;
    const std::uint32_t mi = mask_of(I[i]);
    for (std::size_t j = 0; j < J.size(); ++j) {
      if (b[j] == 0.0) continue;
      const std::uint32_t mj = mask_of(J[j]);
      if (mi & mj) continue;
      out[rank_of_mask(mi | mj, n)] += shuffle_sign(mi, mj) * a[i] * b[j];
    }
  }
  return out;
}

double inner_norm(const PForm& a, const PForm& b, const Metric& g) {
  if (a.dim() != b.dim() || a.dim() != g.dim()) throw UsageError("inner_norm dimension mismatch");
  if (a.degree() != b.degree()) throw UsageError("inner_norm of forms of different degree");
  const auto up = raise_all(b, g);
  double s = 0.0;
  for (std::size_t r = 0; r < up.size(); ++r) s += a[r] * up[r];
  return s;
}

Vec musical(const Vec& v, const Metric& g) {
  if (v.size() != g.dim()) throw UsageError("musical dimension mismatch");
  return g.g() * v;
}

Vec musical_inv(const Vec& a, const Metric& g) {
  if (a.size() != g.dim()) throw UsageError("musical_inv dimension mismatch");
  return g.ginv() * a;
}

PForm hodge(const PForm& a, const Metric& g) {
  if (a.dim() != g.dim()) throw UsageError("hodge dimension mismatch");
  const int n = a.dim(), p = a.degree();
  const auto up = raise_all(a, g);
  PForm out(n, n - p);
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  const auto& J = multi_indices(n, n - p);
  for (std::size_t j = 0; j < J.size(); ++j) {
    const std::uint32_t mj = mask_of(J[j]);
    const std::uint32_t mi = full & ~mj;
    out[j] = g.sqrt_abs_det() * shuffle_sign(mi, mj) * up[rank_of_mask(mi, n)];
  }
  return out;
}

PForm insert(const Vec& v, const PForm& a) {
  if (a.degree() == 0) throw UsageError("insertion into a 0-form");
  if (v.size() != a.dim()) throw UsageError("insert dimension mismatch");
  const int n = a.dim(), p = a.degree();
  PForm out(n, p - 1);
  const auto& J = multi_indices(n, p - 1);
  for (std::size_t j = 0; j < J.size(); ++j) {
    const std::uint32_t mj = mask_of(J[j]);
    double s = 0.0;
    for (int b = 0; b < n; ++b) {
      if (mj & (1u << b)) continue;
      const int before = std::popcount(mj & ((1u << b) - 1u));
      s += ((before & 1) ? -1.0 : 1.0) * v(b) * a[rank_of_mask(mj | (1u << b), n)];
    }
    out[j] = s;
  }
  return out;
}

double evaluate(const PForm& a, const std::vector<Vec>& vs) {
  const int p = a.degree();
  if (static_cast<int>(vs.size()) != p) throw UsageError("evaluate needs exactly p vectors");
  if (p == 0) return a[0];
  const auto& I = multi_indices(a.dim(), p);
  Mat m(p, p);
  double s = 0.0;
  for (std::size_t r = 0; r < I.size(); ++r) {
    if (a[r] == 0.0) continue;
    for (int i = 0; i < p; ++i)
      for (int k = 0; k < p; ++k) m(i, k) = vs[k](I[r][i]);
    s += a[r] * m.determinant();
  }
  return s;
}

int hodge_square_sign(int n, int p, int n_minus) {
  const int e = p * (n - p) + n_minus;
  return (e & 1) ? -1 : 1;
}

}  // namespace laue::ext
