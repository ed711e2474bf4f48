#pragma once

#include "laue/common.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace laue::ext {

constexpr int kMaxDim = 8;

int binomial(int n, int k);

// Strictly increasing multi-indices of length p over {0..n-1}, in
// lexicographic order.  rank/unrank is the flat storage offset.
const std::vector<std::vector<int>>& multi_indices(int n, int p);
std::size_t rank_of(const std::vector<int>& increasing, int n);
std::size_t rank_of_mask(std::uint32_t mask, int n);

// Sign of the permutation sorting `idx`; 0 when an index repeats.
int sort_sign(std::vector<int>& idx);

struct Signature {
  int n = 4;
  std::vector<int> diag;

  static Signature mostly_minus(int n);
  static Signature mostly_plus(int n);
  int n_minus() const;
  Mat matrix() const;
};

// Coordinate metric at a point.  Diagonal +-1 metrics (from a Signature)
// take a fast path; general symmetric matrices support curved charts.
class Metric {
 public:
  Metric(const Signature& sig);  // NOLINT(google-explicit-constructor)
  explicit Metric(const Mat& g);

  int dim() const { return n_; }
  const Mat& g() const { return g_; }
  const Mat& ginv() const { return ginv_; }
  double sqrt_abs_det() const { return vol_; }
  int n_minus() const { return n_minus_; }
  bool diagonal() const { return diagonal_; }

 private:
  int n_;
  Mat g_, ginv_;
  double vol_;
  int n_minus_;
  bool diagonal_;
};

class PForm {
 public:
  PForm() = default;
  PForm(int n, int p);

  static PForm zero(int n, int p) { return PForm(n, p); }
  // theta^{i1} ^ ... ^ theta^{ip}; indices need not be sorted.
  static PForm basis(int n, const std::vector<int>& idx);
  static PForm scalar(int n, double value);
  static PForm covector(const Vec& a);
  static PForm degree_overflow(int n);

  int dim() const { return n_; }
  int degree() const { return p_; }
  bool overflow() const { return overflow_; }
  std::size_t size() const { return c_.size(); }

  double& operator[](std::size_t r) { return c_[r]; }
  double operator[](std::size_t r) const { return c_[r]; }
  const std::vector<double>& comps() const { return c_; }

  // Fully antisymmetric component for an arbitrary index tuple.
  double at(std::vector<int> idx) const;
  double max_abs() const;

  PForm& operator+=(const PForm& o);
  PForm& operator-=(const PForm& o);
  PForm& operator*=(double s);

  std::string render(int precision = 6) const;

 private:
  int n_ = 0, p_ = 0;
  bool overflow_ = false;
  std::vector<double> c_;
};

PForm operator+(PForm a, const PForm& b);
PForm operator-(PForm a, const PForm& b);
PForm operator*(double s, PForm a);

// Top form with component sqrt|det g| (= 1 in an orthonormal chart).
PForm volume_form(const Metric& g);

// Dense rank-p covariant tensor, row-major over n^p entries.
struct DenseTensor {
  int n = 0, p = 0;
  std::vector<double> data;

  DenseTensor() = default;
  DenseTensor(int n_, int p_);
  double& at(const std::vector<int>& idx);
  double at(const std::vector<int>& idx) const;
  std::size_t offset(const std::vector<int>& idx) const;
};

DenseTensor alt(const DenseTensor& t);
DenseTensor to_dense(const PForm& a);
// Reads the increasing-index components; the caller asserts antisymmetry.
PForm from_dense(const DenseTensor& t);

PForm wedge(const PForm& a, const PForm& b);
double inner_norm(const PForm& a, const PForm& b, const Metric& g);
Vec musical(const Vec& v, const Metric& g);
Vec musical_inv(const Vec& a, const Metric& g);
PForm hodge(const PForm& a, const Metric& g);
PForm insert(const Vec& v, const PForm& a);
// a(v_1, ..., v_p)
double evaluate(const PForm& a, const std::vector<Vec>& vs);

// Sign s with hodge(hodge(a)) = s a for degree-p forms.
int hodge_square_sign(int n, int p, int n_minus);

}  // namespace laue::ext
