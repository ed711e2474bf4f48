#include "laue/quadrature.hpp"

#include "laue/fields.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace laue::quad {

namespace {

ext::Metric minkowski(int n) { return ext::Metric(ext::Signature::mostly_minus(n)); }

double pairwise_sum(const double* v, std::size_t count, std::size_t stride) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += v[i * stride];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(v, half, stride) + pairwise_sum(v + half * stride, count - half, stride);
}

// Parameter-space nodes (s, weight) of one tile.
struct ParamNodes {
  std::vector<Vec> s;
  std::vector<double> w;
};

struct RadialLayout {
  std::vector<double> r, wr;  // one entry per radial shell (tile)
};

RadialLayout radial_layout(const RadialRule& rule) {
  if (rule.breaks.empty()) throw UsageError("radial rule needs at least one break radius");
  RadialLayout L;
  double lo = 0.0;
  for (const double hi : rule.breaks) {
    const double dr = (hi - lo) / rule.n_radial;
    for (int k = 0; k < rule.n_radial; ++k) {
      const double r = lo + (k + 0.5) * dr;
      L.r.push_back(r);
      L.wr.push_back(r * r * dr);
    }
    lo = hi;
  }
  // outer panel in u = 1/r
  const double u_hi = 1.0 / rule.breaks.back();
  const double u_lo = rule.r_out > 0.0 ? 1.0 / rule.r_out : 0.0;
  if (!(u_hi > u_lo)) throw UsageError("r_out must exceed the last break radius");
  const double du = (u_hi - u_lo) / rule.n_radial;
  for (int k = 0; k < rule.n_radial; ++k) {
    const double u = u_hi - (k + 0.5) * du;
    L.r.push_back(1.0 / u);
    L.wr.push_back(du / (u * u * u * u));
  }
  return L;
}

std::size_t tile_count(const HyperplanePatch& p) {
  if (const auto* b = std::get_if<BoxRule>(&p.rule)) return b->grid.empty() ? 1 : static_cast<std::size_t>(b->grid[0]);
  const auto& r = std::get<RadialRule>(p.rule);
  return static_cast<std::size_t>(r.n_radial) * (r.breaks.size() + 1);
}

ParamNodes tile_nodes(const HyperplanePatch& p, std::size_t tile, const RadialLayout* layout) {
  ParamNodes out;
  const int m = p.dim() - 1;
  if (const auto* b = std::get_if<BoxRule>(&p.rule)) {
    std::vector<double> h(m);
    double w = 1.0;
    for (int i = 0; i < m; ++i) {
      h[i] = 2.0 * b->half_widths[i] / b->grid[i];
      w *= h[i];
    }
    std::size_t count = 1;
    for (int i = 1; i < m; ++i) count *= static_cast<std::size_t>(b->grid[i]);
    out.s.reserve(count);
    out.w.assign(count, w);
    std::vector<int> k(m, 0);
    k[0] = static_cast<int>(tile);
    for (std::size_t c = 0; c < count; ++c) {
      std::size_t rem = c;
      for (int i = m - 1; i >= 1; --i) {
        k[i] = static_cast<int>(rem % b->grid[i]);
        rem /= b->grid[i];
      }
      Vec s(m);
      for (int i = 0; i < m; ++i) s(i) = -b->half_widths[i] + (k[i] + 0.5) * h[i];
      out.s.push_back(std::move(s));
    }
    return out;
  }
  const auto& r = std::get<RadialRule>(p.rule);
  const double rad = layout->r[tile], wr = layout->wr[tile];
  const double dmu = 2.0 / r.n_polar, dphi = 2.0 * std::numbers::pi / r.n_azimuth;
  out.s.reserve(static_cast<std::size_t>(r.n_polar) * r.n_azimuth);
  for (int j = 0; j < r.n_polar; ++j) {
    const double mu = -1.0 + (j + 0.5) * dmu;
    const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int l = 0; l < r.n_azimuth; ++l) {
      const double phi = (l + 0.5) * dphi;
      Vec s(3);
      s << rad * st * std::cos(phi), rad * st * std::sin(phi), rad * mu;
      out.s.push_back(std::move(s));
      out.w.push_back(wr * dmu * dphi);
    }
  }
  return out;
}

// det[v, F] for v in R^n and the n x (n-1) frame F
double det_with_frame(const Vec& v, const Mat& F) {
  const int n = static_cast<int>(v.size());
  Mat m(n, n);
  m.col(0) = v;
  m.rightCols(n - 1) = F;
  return m.determinant();
}

// conormal nu_a = det[e_a, F] (flat-chart epsilon contracted with the frame)
Vec conormal(const Mat& F) {
  const int n = static_cast<int>(F.rows());
  Vec nu(n);
  for (int a = 0; a < n; ++a) nu(a) = det_with_frame(basis_vector(n, a), F);
  return nu;
}

// (n-1)-minors c_I = det(F[I, :]) so that w(F_1..F_{n-1}) = sum_I w_I c_I
std::vector<double> frame_minors(const Mat& F) {
  const int n = static_cast<int>(F.rows());
  const auto& idx = ext::multi_indices(n, n - 1);
  std::vector<double> c(idx.size());
  Mat m(n - 1, n - 1);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (int i = 0; i < n - 1; ++i) m.row(i) = F.row(idx[r][i]);
    c[r] = (n == 1) ? 1.0 : m.determinant();
  }
  return c;
}

std::string fmt_point(const Vec& x) {
  std::string s = "(";
  for (int i = 0; i < x.size(); ++i) s += fmt::format("{}{:.6g}", i ? ", " : "", x(i));
  return s + ")";
}

}  // namespace

// ---------------------------------------------------------------------------

int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  int n = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* env = std::getenv("LAUE_LAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<long>(n, cap);
  }
  return std::max(1, n);
}

int HyperplanePatch::grid_N() const {
  if (const auto* b = std::get_if<BoxRule>(&rule)) return b->grid.empty() ? 1 : b->grid[0];
  return std::get<RadialRule>(rule).n_radial;
}

std::size_t HyperplanePatch::node_count() const {
  if (const auto* b = std::get_if<BoxRule>(&rule)) {
    std::size_t c = 1;
    for (int g : b->grid) c *= static_cast<std::size_t>(g);
    return c;
  }
  const auto& r = std::get<RadialRule>(rule);
  return static_cast<std::size_t>(r.n_radial) * (r.breaks.size() + 1) * r.n_polar * r.n_azimuth;
}

HyperplanePatch make_patch(const Vec& origin, const Vec& normal, const Mat& frame, const std::vector<double>& half_widths,
                           const std::vector<int>& grid, int orientation) {
  HyperplanePatch p;
  p.origin = origin;
  p.normal = normal;
  p.frame = frame;
  p.orientation = orientation >= 0 ? 1 : -1;
  p.rule = BoxRule{half_widths, grid};
  validate(p, minkowski(p.dim()));
  return p;
}

HyperplanePatch time_slice_box(const Vec& center, const std::vector<double>& half_widths, const std::vector<int>& grid) {
  const int n = static_cast<int>(center.size());
  return make_patch(center, basis_vector(n, 0), Mat::Identity(n, n).rightCols(n - 1), half_widths, grid);
}

HyperplanePatch time_slice(int n, double t, double half_width, int N) {
  Vec c = Vec::Zero(n);
  c(0) = t;
  return time_slice_box(c, std::vector<double>(n - 1, half_width), std::vector<int>(n - 1, N));
}

HyperplanePatch radial_slice(const Vec& center, const std::vector<double>& breaks, double r_out, int N) {
  const int n = static_cast<int>(center.size());
  if (n != 4) throw UsageError("radial rule needs n = 4");
  HyperplanePatch p;
  p.origin = center;
  p.normal = basis_vector(n, 0);
  p.frame = Mat::Identity(n, n).rightCols(n - 1);
  p.rule = RadialRule{breaks, r_out, N, N, N};
  validate(p, minkowski(n));
  return p;
}

void validate(const HyperplanePatch& p, const ext::Metric& eta, bool require_orthonormal) {
  const int n = p.dim();
  if (p.normal.size() != n || p.frame.rows() != n || p.frame.cols() != n - 1)
    throw UsageError("patch origin, normal and frame dimensions disagree");
  const Mat& g = eta.g();
  const double nn = p.normal.dot(g * p.normal);
  if (std::abs(nn) < 1e-12) throw DomainError("null normal: lightlike patches are not supported");
  if (std::abs(std::abs(nn) - 1.0) > 1e-10) throw UsageError("patch normal must be a unit vector");
  for (int i = 0; i < n - 1; ++i)
    if (std::abs(p.normal.dot(g * p.frame.col(i))) > 1e-10 * (1.0 + p.frame.col(i).norm()))
      throw UsageError("tangent frame is not orthogonal to the normal");
  if (require_orthonormal) {
    const Mat G = p.frame.transpose() * g * p.frame;
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < n - 1; ++j) {
        const double want = (i == j) ? (std::abs(G(i, i)) > 0.5 ? (G(i, i) > 0 ? 1.0 : -1.0) : 99.0) : 0.0;
        if (std::abs(G(i, j) - want) > 1e-10) throw UsageError("tangent frame is not orthonormal");
      }
  }
  if (std::abs(det_with_frame(p.normal, p.frame)) < 1e-14) throw UsageError("tangent frame is degenerate");
  if (const auto* b = std::get_if<BoxRule>(&p.rule)) {
    if (static_cast<int>(b->half_widths.size()) != n - 1 || static_cast<int>(b->grid.size()) != n - 1)
      throw UsageError("box rule needs n-1 half widths and grid sizes");
    for (double L : b->half_widths)
      if (!(L > 0.0)) throw UsageError("half widths must be positive");
    for (int N : b->grid)
      if (N < 1) throw UsageError("grid sizes must be positive");
  } else {
    const auto& r = std::get<RadialRule>(p.rule);
    if (n != 4) throw UsageError("radial rule needs n = 4");
    if (r.n_radial < 1 || r.n_polar < 1 || r.n_azimuth < 1) throw UsageError("grid sizes must be positive");
    double prev = 0.0;
    for (double b : r.breaks) {
      if (!(b > prev)) throw UsageError("radial breaks must be positive and increasing");
      prev = b;
    }
  }
}

int param_sign(const HyperplanePatch& p, const ext::Metric& eta) {
  const double nn = p.normal.dot(eta.g() * p.normal);
  const double s = nn * det_with_frame(p.normal, p.frame);
  return p.orientation * (s > 0 ? 1 : -1);
}

ext::PForm induced_measure(const HyperplanePatch& p, const ext::Metric& eta) {
  validate(p, eta, false);
  const double nn = p.normal.dot(eta.g() * p.normal);
  ext::PForm m = ext::insert(p.normal, ext::volume_form(eta));
  m *= nn * p.orientation;
  return m;
}

std::vector<double> integrate(const HyperplanePatch& patch, int k,
                              const std::function<void(const Vec& x, double* out)>& f) {
  const std::size_t tiles = tile_count(patch);
  RadialLayout layout;
  if (std::holds_alternative<RadialRule>(patch.rule)) layout = radial_layout(std::get<RadialRule>(patch.rule));
  const int sign = param_sign(patch, minkowski(patch.dim()));

  std::vector<double> tile_sums(tiles * k, 0.0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    std::vector<double> buf;
    std::vector<double> vals(k);
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tiles) return;
      try {
        const ParamNodes nodes = tile_nodes(patch, t, layout.r.empty() ? nullptr : &layout);
        const std::size_t count = nodes.s.size();
        buf.assign(count * k, 0.0);
        for (std::size_t i = 0; i < count; ++i) {
          const Vec x = patch.origin + patch.frame * nodes.s[i];
          std::fill(vals.begin(), vals.end(), 0.0);
          f(x, vals.data());
          for (int c = 0; c < k; ++c) {
            if (!std::isfinite(vals[c]))
              throw NumericFault(fmt::format("non-finite integrand component {} at x = {}", c, fmt_point(x)));
            buf[i * k + c] = nodes.w[i] * vals[c];
          }
        }
        for (int c = 0; c < k; ++c) tile_sums[t * k + c] = pairwise_sum(buf.data() + c, count, k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tiles);
        return;
      }
    }
  };

  const int nthreads = static_cast<int>(std::min<std::size_t>(worker_count(), tiles));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> out(k);
  for (int c = 0; c < k; ++c) out[c] = sign * pairwise_sum(tile_sums.data() + c, tiles, k);
  return out;
}

double integrate_form(const FormField& w, const HyperplanePatch& patch, const ext::Metric& eta) {
  if (w.p != patch.dim() - 1) throw UsageError("integrate_form needs an (n-1)-form");
  validate(patch, eta, false);
  const std::vector<double> minors = frame_minors(patch.frame);
  return integrate(patch, 1, [&](const Vec& x, double* out) {
    const ext::PForm f = w.eval(x);
    double s = 0.0;
    for (std::size_t r = 0; r < minors.size(); ++r) s += f[r] * minors[r];
    out[0] = s;
  })[0];
}

double integrate_form(const FormField& w, const HyperplanePatch& patch) {
  return integrate_form(w, patch, minkowski(patch.dim()));
}

double flux_charge(const VectorField& J, const HyperplanePatch& patch, const MetricField& g) {
  return integrate_form(fields::dual_current(J, g), patch, minkowski(patch.dim()));
}

double flux_charge_normal(const VectorField& J, const HyperplanePatch& patch, const MetricField& g) {
  const int n = patch.dim();
  validate(patch, minkowski(n), false);
  const Vec nu = conormal(patch.frame);
  const double ref = det_with_frame(patch.normal, patch.frame);
  return integrate(patch, 1, [&](const Vec& x, double* out) {
    const Mat gx = g.eval(x);
    const Mat ginv = g.flat ? gx : Mat(gx.inverse());
    const double vol = g.flat ? 1.0 : std::sqrt(std::abs(gx.determinant()));
    Vec unit;
    if (g.flat) {
      unit = patch.normal;
    } else {
      const Vec up = ginv * nu;
      const double q = nu.dot(up);
      if (std::abs(q) < 1e-14) throw DomainError("normal is null in the supplied metric");
      const double s = ((ref > 0) == (q > 0)) ? 1.0 : -1.0;
      unit = s * up / std::sqrt(std::abs(q));
    }
    const double gnn = unit.dot(gx * unit);
    const double dmu = gnn * vol * det_with_frame(unit, patch.frame);
    out[0] = J.eval(x).dot(gx * unit) * dmu;
  })[0];
}

Mat emt_integral(const SymTensorField& T, const HyperplanePatch& patch) {
  const int n = patch.dim();
  const ext::Metric eta = minkowski(n);
  validate(patch, eta, false);
  const double dmu = patch.normal.dot(eta.g() * patch.normal) * det_with_frame(patch.normal, patch.frame);
  const auto v = integrate(patch, n * n, [&](const Vec& x, double* out) {
    const Mat t = T.eval(x);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out[a * n + b] = t(a, b) * dmu;
  });
  Mat S(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) S(a, b) = v[a * n + b];
  return S;
}

Vec four_momentum(const SymTensorField& T, const HyperplanePatch& patch) {
  const int n = patch.dim();
  validate(patch, minkowski(n), false);
  const Vec nu = conormal(patch.frame);
  const auto v = integrate(patch, n, [&](const Vec& x, double* out) {
    const Vec t = T.eval(x) * nu;
    for (int a = 0; a < n; ++a) out[a] = t(a);
  });
  return Eigen::Map<const Vec>(v.data(), n);
}

const std::array<std::string, 9>& LaueIntegrals::names() {
  static const std::array<std::string, 9> k{"01", "02", "03", "11", "12", "13", "22", "23", "33"};
  return k;
}

double LaueIntegrals::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double LaueIntegrals::component(int a, int b) const {
  if (a > b) std::swap(a, b);
  if (a == 0) {
    if (b == 0) throw UsageError("T^00 is not a Laue integral");
    return values[b - 1];
  }
  static const int offset[4] = {0, 3, 6, 8};
  return values[offset[a] + (b - a)];
}

LaueIntegrals laue_from_matrix(const Mat& S) {
  LaueIntegrals L;
  L.values = {S(0, 1), S(0, 2), S(0, 3), S(1, 1), S(1, 2), S(1, 3), S(2, 2), S(2, 3), S(3, 3)};
  return L;
}

LaueIntegrals laue_integrals(const SymTensorField& T, const HyperplanePatch& patch) {
  if (patch.dim() != 4) throw UsageError("laue_integrals needs n = 4");
  const double time_like = std::abs(std::abs(patch.normal(0)) - 1.0) + patch.normal.tail(3).cwiseAbs().maxCoeff();
  if (time_like > 1e-12) throw DomainError("laue_integrals needs a time slice");
  return laue_from_matrix(emt_integral(T, patch));
}

HyperplanePatch transform_patch(const poincare::PoincareElement& g, const HyperplanePatch& patch) {
  if (g.dim() != patch.dim()) throw UsageError("transform_patch dimension mismatch");
  if (!poincare::is_isometry(g, 1e-10 * (1.0 + g.A.squaredNorm()))) throw DomainError("transform_patch needs an isometry");
  HyperplanePatch out = patch;
  out.origin = g.A * patch.origin + g.a;
  out.frame = g.A * patch.frame;
  out.normal = g.A * patch.normal;
  return out;
}

HyperplanePatch adapt_to_field(const HyperplanePatch& sigma, const RestFrameHint& hint, int N) {
  const int n = sigma.dim();
  const ext::Metric eta = minkowski(n);
  const Vec nu = eta.g() * sigma.normal;
  const Mat& A = hint.linear;
  const double denom = nu.dot(A.col(0));
  if (std::abs(denom) < 1e-12) throw DomainError("field world lines run parallel to the patch");

  HyperplanePatch out;
  out.normal = sigma.normal;
  out.orientation = sigma.orientation;
  const Vec base = A * hint.center + hint.shift;
  out.origin = base - A.col(0) * (nu.dot(base - sigma.origin) / denom);
  out.frame.resize(n, n - 1);
  for (int i = 1; i < n; ++i) out.frame.col(i - 1) = A.col(i) - A.col(0) * (nu.dot(A.col(i)) / denom);

  if (hint.kind == RestFrameHint::Kind::radial) {
    out.rule = RadialRule{hint.radial_breaks, hint.r_out, N, N, N};
  } else {
    out.rule = BoxRule{hint.box_half_widths, std::vector<int>(n - 1, N)};
  }
  validate(out, eta, false);
  return out;
}

HyperplanePatch patch_for(const SymTensorField& T, const HyperplanePatch& sigma) {
  if (!T.hint) return sigma;
  return adapt_to_field(sigma, *T.hint, sigma.grid_N());
}

MomentumValue momentum_map(const SymTensorField& T, const HyperplanePatch& patch, const Vec& o) {
  const int n = patch.dim();
  const ext::Metric eta = minkowski(n);
  validate(patch, eta, false);
  const int k = poincare::PoinLieElement::basis_size(n);
  std::vector<Vec> P(k);
  std::vector<Mat> B(k);
  for (int i = 0; i < k; ++i) {
    const auto xi = poincare::PoinLieElement::basis(n, i);
    P[i] = xi.P;
    B[i] = xi.M_endo(eta);
  }
  const Vec nu = conormal(patch.frame);
  const Mat& g = eta.g();
  const auto flux = integrate(patch, k, [&](const Vec& x, double* out) {
    const Vec t = T.eval(x) * nu;  // J^b nu_b = K_a T^{ab} nu_b = eta(K, t)
    const Vec gt = g * t;
    const Vec y = x - o;
    for (int i = 0; i < k; ++i) out[i] = (P[i] + B[i] * y).dot(gt);
  });

  const Mat G = poincare::pairing_gram(n, eta);
  const Vec f = Eigen::Map<const Vec>(flux.data(), k);
  Eigen::FullPivLU<Mat> lu(G);
  if (!lu.isInvertible()) throw NumericFault("pairing Gram matrix is singular");
  const Vec c = lu.solve(f);
  if ((G * c - f).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + f.cwiseAbs().maxCoeff()))
    throw NumericFault("pairing Gram solve did not converge");
  return {poincare::PoinLieElement::from_flat(n, c), flux, o};
}

HyperplanePatch with_grid(const HyperplanePatch& patch, int N) {
  if (N < 1) throw UsageError("grid size must be positive");
  HyperplanePatch out = patch;
  if (auto* b = std::get_if<BoxRule>(&out.rule)) {
    std::fill(b->grid.begin(), b->grid.end(), N);
  } else {
    auto& r = std::get<RadialRule>(out.rule);
    r.n_radial = r.n_polar = r.n_azimuth = N;
  }
  return out;
}

std::vector<Vec> node_positions(const HyperplanePatch& patch) {
  RadialLayout layout;
  if (std::holds_alternative<RadialRule>(patch.rule)) layout = radial_layout(std::get<RadialRule>(patch.rule));
  std::vector<Vec> out;
  out.reserve(patch.node_count());
  for (std::size_t t = 0; t < tile_count(patch); ++t) {
    const ParamNodes nodes = tile_nodes(patch, t, layout.r.empty() ? nullptr : &layout);
    for (const Vec& s : nodes.s) out.push_back(patch.origin + patch.frame * s);
  }
  return out;
}

double cell_size(const HyperplanePatch& patch) {
  if (const auto* b = std::get_if<BoxRule>(&patch.rule)) {
    double h = 0.0;
    for (std::size_t i = 0; i < b->grid.size(); ++i) h = std::max(h, 2.0 * b->half_widths[i] / b->grid[i]);
    return h;
  }
  const auto& r = std::get<RadialRule>(patch.rule);
  return r.breaks.front() / r.n_radial;
}

}  // namespace laue::quad
