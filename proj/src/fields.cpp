#include "laue/fields.hpp"

#include <cmath>
#include <limits>

namespace laue {

MetricField MetricField::constant(const ext::Signature& sig) {
  const Mat g = sig.matrix();
  return {sig.n, [g](const Vec&) { return g; }, true};
}

MetricField MetricField::constant(const Mat& g) {
  return {static_cast<int>(g.rows()), [g](const Vec&) { return g; }, true};
}

}  // namespace laue

namespace laue::fields {

namespace {

void check_step(double h) {
  if (!(h > 0.0)) throw UsageError("finite-difference step must be positive");
}

Vec shifted(const Vec& x, int dir, double d) {
  Vec y = x;
  y(dir) += d;
  return y;
}

// (L^* w)_I = sum_K w_K det(L[K, I]) for a linear map L.
ext::PForm pullback_linear(const ext::PForm& w, const Mat& L) {
  const int n = w.dim(), p = w.degree();
  ext::PForm out(n, p);
  if (p == 0) {
    out[0] = w[0];
    return out;
  }
  const auto& idx = ext::multi_indices(n, p);
  Mat m(p, p);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (w[k] == 0.0) continue;
      for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) m(r, c) = L(idx[k][r], idx[i][c]);
      s += w[k] * m.determinant();
    }
    out[i] = s;
  }
  return out;
}

std::vector<ext::PForm> fd_form_partials(const FormField& w, const Vec& x, double h) {
  std::vector<ext::PForm> d;
  d.reserve(w.n);
  for (int b = 0; b < w.n; ++b) {
    ext::PForm f = w.eval(shifted(x, b, h));
    f -= w.eval(shifted(x, b, -h));
    f *= 1.0 / (2.0 * h);
    d.push_back(std::move(f));
  }
  return d;
}

// (d w)_J = sum_k (-1)^k d_{j_k} w_{J \ j_k} from precomputed partials.
ext::PForm assemble_d(const std::vector<ext::PForm>& partials, int n, int p) {
  ext::PForm out(n, p + 1);
  const auto& J = ext::multi_indices(n, p + 1);
  std::vector<int> rest(p);
  for (std::size_t r = 0; r < J.size(); ++r) {
    double s = 0.0;
    for (int k = 0; k <= p; ++k) {
      int m = 0;
      for (int t = 0; t <= p; ++t)
        if (t != k) rest[m++] = J[r][t];
      const double v = partials[J[r][k]][ext::rank_of(rest, n)];
      s += (k & 1) ? -v : v;
    }
    out[r] = s;
  }
  return out;
}

bool preserves_time_axis(const Mat& A) {
  const int n = static_cast<int>(A.rows());
  return (A.col(0) - basis_vector(n, 0)).cwiseAbs().maxCoeff() < 1e-14;
}

SymTensorField with_transformed_metadata(const poincare::PoincareElement& g, const SymTensorField& T,
                                         std::function<Mat(const Vec&)> eval) {
  SymTensorField out;
  out.n = T.n;
  out.eval = std::move(eval);
  out.stationary = T.stationary && preserves_time_axis(g.A);
  const bool is_identity = g.a.cwiseAbs().maxCoeff() == 0.0 && (g.A - Mat::Identity(T.n, T.n)).cwiseAbs().maxCoeff() == 0.0;
  if (is_identity) out.support_radius = T.support_radius;
  if (T.analytic_divergence) {
    const auto gi = poincare::invert(g);
    const auto div = T.analytic_divergence;
    const Mat A = g.A;
    out.analytic_divergence = [gi, div, A](const Vec& x) -> Vec { return A * div(gi.A * x + gi.a); };
  }
  if (T.hint) {
    RestFrameHint h = *T.hint;
    h.shift = g.A * h.shift + g.a;
    h.linear = g.A * h.linear;
    out.hint = h;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ScalarField fd_partial(const ScalarField& f, int dir, double h) {
  check_step(h);
  return {f.n, [f, dir, h](const Vec& x) { return (f.eval(shifted(x, dir, h)) - f.eval(shifted(x, dir, -h))) / (2 * h); }};
}

VectorField fd_partial(const VectorField& f, int dir, double h) {
  check_step(h);
  return {f.n, [f, dir, h](const Vec& x) -> Vec {
            return (f.eval(shifted(x, dir, h)) - f.eval(shifted(x, dir, -h))) / (2 * h);
          }};
}

FormField fd_partial(const FormField& f, int dir, double h) {
  check_step(h);
  return {f.n, f.p, [f, dir, h](const Vec& x) {
            ext::PForm a = f.eval(shifted(x, dir, h));
            a -= f.eval(shifted(x, dir, -h));
            a *= 1.0 / (2 * h);
            return a;
          }};
}

SymTensorField fd_partial(const SymTensorField& f, int dir, double h) {
  check_step(h);
  SymTensorField out;
  out.n = f.n;
  out.eval = [f, dir, h](const Vec& x) -> Mat {
    return (f.eval(shifted(x, dir, h)) - f.eval(shifted(x, dir, -h))) / (2 * h);
  };
  out.stationary = f.stationary;
  return out;
}

MetricField fd_partial(const MetricField& f, int dir, double h) {
  check_step(h);
  if (f.flat) {
    const int n = f.n;
    return {n, [n](const Vec&) -> Mat { return Mat::Zero(n, n); }, true};
  }
  return {f.n, [f, dir, h](const Vec& x) -> Mat {
            return (f.eval(shifted(x, dir, h)) - f.eval(shifted(x, dir, -h))) / (2 * h);
          }, false};
}

Vec fd_gradient(const ScalarField& f, const Vec& x, double h) {
  check_step(h);
  Vec g(f.n);
  for (int b = 0; b < f.n; ++b) g(b) = (f.eval(shifted(x, b, h)) - f.eval(shifted(x, b, -h))) / (2 * h);
  return g;
}

Mat fd_jacobian(const VectorField& v, const Vec& x, double h) {
  check_step(h);
  Mat J(v.n, v.n);
  for (int b = 0; b < v.n; ++b) J.col(b) = (v.eval(shifted(x, b, h)) - v.eval(shifted(x, b, -h))) / (2 * h);
  return J;
}

double fd_directional(const ScalarField& f, const Vec& x, const Vec& dir, double h) {
  check_step(h);
  return (f.eval(x + h * dir) - f.eval(x - h * dir)) / (2 * h);
}

std::vector<Mat> christoffel(const MetricField& g, const Vec& x, double h) {
  const int n = g.n;
  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  if (g.flat) return gamma;
  check_step(h);
  std::vector<Mat> dg(n);  // dg[k](a,b) = d_k g_ab
  for (int k = 0; k < n; ++k) dg[k] = (g.eval(shifted(x, k, h)) - g.eval(shifted(x, k, -h))) / (2 * h);
  const Mat ginv = g.eval(x).inverse();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += ginv(a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        gamma[a](b, c) = 0.5 * s;
      }
  return gamma;
}

VectorField divergence(const SymTensorField& T, const MetricField& g, double h) {
  if (g.flat && T.analytic_divergence) return {T.n, T.analytic_divergence};
  check_step(h);
  return {T.n, [T, g, h](const Vec& x) -> Vec {
            const int n = T.n;
            Vec div = Vec::Zero(n);
            for (int b = 0; b < n; ++b) {
              const Mat d = (T.eval(shifted(x, b, h)) - T.eval(shifted(x, b, -h))) / (2 * h);
              div += d.col(b);
            }
            if (!g.flat) {
              const auto gamma = christoffel(g, x, h);
              const Mat Tx = T.eval(x);
              for (int a = 0; a < n; ++a) {
                double s = 0.0;
                for (int b = 0; b < n; ++b)
                  for (int c = 0; c < n; ++c) s += gamma[a](b, c) * Tx(c, b) + gamma[b](b, c) * Tx(a, c);
                div(a) += s;
              }
            }
            return div;
          }};
}

ScalarField divergence(const VectorField& J, const MetricField& g, double h) {
  check_step(h);
  return {J.n, [J, g, h](const Vec& x) {
            double s = 0.0;
            for (int b = 0; b < J.n; ++b) {
              const Vec xp = shifted(x, b, h), xm = shifted(x, b, -h);
              const double vp = g.flat ? 1.0 : std::sqrt(std::abs(g.eval(xp).determinant()));
              const double vm = g.flat ? 1.0 : std::sqrt(std::abs(g.eval(xm).determinant()));
              s += (vp * J.eval(xp)(b) - vm * J.eval(xm)(b)) / (2 * h);
            }
            const double v0 = g.flat ? 1.0 : std::sqrt(std::abs(g.eval(x).determinant()));
            return s / v0;
          }};
}

FormField exterior_derivative(const FormField& w, double h) {
  check_step(h);
  if (w.p >= w.n) {
    const int n = w.n;
    return {n, n, [n](const Vec&) { return ext::PForm::degree_overflow(n); }};
  }
  return {w.n, w.p + 1, [w, h](const Vec& x) { return assemble_d(fd_form_partials(w, x, h), w.n, w.p); }};
}

FormField interior(const VectorField& v, const FormField& w) {
  if (w.p == 0) throw UsageError("interior product of a 0-form");
  return {w.n, w.p - 1, [v, w](const Vec& x) { return ext::insert(v.eval(x), w.eval(x)); }};
}

FormField wedge(const FormField& a, const FormField& b) {
  return {a.n, std::min(a.p + b.p, a.n), [a, b](const Vec& x) { return ext::wedge(a.eval(x), b.eval(x)); }};
}

FormField hodge(const FormField& w, const MetricField& g) {
  return {w.n, w.n - w.p, [w, g](const Vec& x) { return ext::hodge(w.eval(x), g.at(x)); }};
}

FormField dual_current(const VectorField& J, const MetricField& g) {
  return {J.n, J.n - 1, [J, g](const Vec& x) {
            const ext::Metric m = g.at(x);
            return ext::hodge(ext::PForm::covector(ext::musical(J.eval(x), m)), m);
          }};
}

VectorField undual_current(const FormField& w, const MetricField& g) {
  if (w.p != w.n - 1) throw UsageError("undual_current expects an (n-1)-form");
  return {w.n, [w, g](const Vec& x) -> Vec {
            const ext::Metric m = g.at(x);
            const ext::PForm s = ext::hodge(w.eval(x), m);
            const int sign = ext::hodge_square_sign(w.n, 1, m.n_minus());
            Vec flat(w.n);
            for (int a = 0; a < w.n; ++a) flat(a) = sign * s[a];
            return ext::musical_inv(flat, m);
          }};
}

FormField lie_derivative(const FormField& w, const VectorField& V, double h) {
  check_step(h);
  // Cartan: L_V = d i_V + i_V d
  std::vector<FormField> parts;
  const int n = w.n, p = w.p;
  std::function<ext::PForm(const Vec&)> first;
  if (p > 0) {
    FormField ivw = interior(V, w);
    FormField d_ivw = exterior_derivative(ivw, h);
    first = d_ivw.eval;
  }
  std::function<ext::PForm(const Vec&)> second;
  if (p < n) {
    FormField dw = exterior_derivative(w, h);
    FormField iv_dw = interior(V, dw);
    second = iv_dw.eval;
  }
  return {n, p, [first, second, n, p](const Vec& x) {
            ext::PForm out(n, p);
            if (first) out += first(x);
            if (second) out += second(x);
            return out;
          }};
}

CovTensorField lie_derivative(const MetricField& g, const VectorField& V, double h) {
  check_step(h);
  return {g.n, [g, V, h](const Vec& x) -> Mat {
            const int n = g.n;
            const Vec K = V.eval(x);
            const Mat dK = fd_jacobian(V, x, h);  // dK(c, a) = d_a K^c
            const Mat gx = g.eval(x);
            Mat out = gx * dK + dK.transpose() * gx;  // g_cb d_a K^c + g_ac d_b K^c
            if (!g.flat) {
              for (int c = 0; c < n; ++c) out += K(c) * (g.eval(shifted(x, c, h)) - g.eval(shifted(x, c, -h))) / (2 * h);
            }
            return out;
          }};
}

VectorField lie_derivative(const VectorField& W, const VectorField& V, double h) {
  check_step(h);
  return {W.n, [W, V, h](const Vec& x) -> Vec {
            return fd_jacobian(W, x, h) * V.eval(x) - fd_jacobian(V, x, h) * W.eval(x);
          }};
}

SymTensorField lie_derivative(const SymTensorField& T, const VectorField& V, double h) {
  check_step(h);
  SymTensorField out;
  out.n = T.n;
  out.eval = [T, V, h](const Vec& x) -> Mat {
    const int n = T.n;
    const Vec K = V.eval(x);
    Mat dT = Mat::Zero(n, n);
    for (int c = 0; c < n; ++c) dT += K(c) * (T.eval(shifted(x, c, h)) - T.eval(shifted(x, c, -h))) / (2 * h);
    const Mat dK = fd_jacobian(V, x, h);
    const Mat Tx = T.eval(x);
    return dT - dK * Tx - Tx * dK.transpose();
  };
  return out;
}

CovTensorField covariant_derivative_flat(const VectorField& K, const MetricField& g, double h) {
  check_step(h);
  return {K.n, [K, g, h](const Vec& x) -> Mat {
            const int n = K.n;
            Mat out(n, n);  // out(a, b) = d_a K_b - Gamma^c_{ab} K_c
            for (int a = 0; a < n; ++a) {
              const Vec xp = shifted(x, a, h), xm = shifted(x, a, -h);
              out.row(a) = ((g.eval(xp) * K.eval(xp) - g.eval(xm) * K.eval(xm)) / (2 * h)).transpose();
            }
            if (!g.flat) {
              const Vec Kl = g.eval(x) * K.eval(x);
              const auto gamma = christoffel(g, x, h);
              for (int c = 0; c < n; ++c) out -= Kl(c) * gamma[c];
            }
            return out;
          }};
}

KillingResidual killing_residual(const VectorField& K, const MetricField& g, const std::vector<Vec>& samples,
                                 double h) {
  const CovTensorField lie = lie_derivative(g, K, h);
  const CovTensorField nab = covariant_derivative_flat(K, g, h);
  KillingResidual r;
  for (const Vec& x : samples) {
    const Mat L = lie.eval(x);
    const Mat D = nab.eval(x);
    r.identity = std::max(r.identity, (D + D.transpose() - L).cwiseAbs().maxCoeff());
    r.lie_norm = std::max(r.lie_norm, L.cwiseAbs().maxCoeff());
  }
  return r;
}

// ---------------------------------------------------------------------------

ScalarField active_transform(const poincare::PoincareElement& g, const ScalarField& f) {
  const auto gi = poincare::invert(g);
  return {f.n, [gi, f](const Vec& x) { return f.eval(gi.A * x + gi.a); }};
}

VectorField active_transform(const poincare::PoincareElement& g, const VectorField& v) {
  const auto gi = poincare::invert(g);
  const Mat A = g.A;
  return {v.n, [gi, v, A](const Vec& x) -> Vec { return A * v.eval(gi.A * x + gi.a); }};
}

CovectorField active_transform(const poincare::PoincareElement& g, const CovectorField& a) {
  const auto gi = poincare::invert(g);
  const Mat AiT = gi.A.transpose();
  return {a.n, [gi, a, AiT](const Vec& x) -> Vec { return AiT * a.eval(gi.A * x + gi.a); }};
}

SymTensorField active_transform(const poincare::PoincareElement& g, const SymTensorField& T) {
  const auto gi = poincare::invert(g);
  const Mat A = g.A;
  auto f = T.eval;
  return with_transformed_metadata(g, T, [gi, f, A](const Vec& x) -> Mat { return A * f(gi.A * x + gi.a) * A.transpose(); });
}

FormField active_transform(const poincare::PoincareElement& g, const FormField& w) {
  const auto gi = poincare::invert(g);
  return {w.n, w.p, [gi, w](const Vec& x) { return pullback_linear(w.eval(gi.A * x + gi.a), gi.A); }};
}

SymTensorField boost_emt_analytic(const SymTensorField& T, double beta) {
  if (T.n != 4) throw UsageError("boost_emt_analytic needs n = 4");
  const auto B = poincare::standard_boost(1, beta, 4);
  const double gamma = B.A(0, 0);
  auto f = T.eval;
  return with_transformed_metadata(B, T, [f, beta, gamma](const Vec& x) -> Mat {
    Vec xu(4);
    xu << gamma * (x(0) - beta * x(1)), gamma * (x(1) - beta * x(0)), x(2), x(3);
    const Mat t = f(xu);
    const double g2 = gamma * gamma, b2 = beta * beta;
    Mat o = t;
    o(0, 0) = g2 * (t(0, 0) + b2 * t(1, 1) + 2 * beta * t(0, 1));
    o(1, 1) = g2 * (t(1, 1) + b2 * t(0, 0) + 2 * beta * t(0, 1));
    o(0, 1) = o(1, 0) = g2 * ((1 + b2) * t(0, 1) + beta * (t(0, 0) + t(1, 1)));
    for (int m = 2; m < 4; ++m) {
      o(0, m) = o(m, 0) = gamma * (t(0, m) + beta * t(1, m));
      o(1, m) = o(m, 1) = gamma * (t(1, m) + beta * t(0, m));
    }
    return o;
  });
}

Mat axis_rotation(int axis, int n) {
  if (axis < 1 || axis >= n) throw UsageError("axis must be spatial");
  Mat R = Mat::Identity(n, n);
  if (axis == 1) return R;
  // quarter turn in the (1, axis) plane: e_1 -> e_axis, e_axis -> -e_1
  R(1, 1) = 0.0;
  R(axis, axis) = 0.0;
  R(axis, 1) = 1.0;
  R(1, axis) = -1.0;
  return R;
}

SymTensorField boost_emt_along(const SymTensorField& T, int axis, double beta) {
  if (axis == 1) return boost_emt_analytic(T, beta);
  const poincare::PoincareElement R{Vec::Zero(T.n), axis_rotation(axis, T.n)};
  return active_transform(R, boost_emt_analytic(active_transform(poincare::invert(R), T), beta));
}

CovectorValuedForm emt_to_form(const SymTensorField& T, const MetricField& g) {
  return {T.n, [T, g](const Vec& x) {
            const ext::Metric m = g.at(x);
            const Mat low = m.g() * T.eval(x) * m.g();
            std::vector<ext::PForm> out;
            out.reserve(T.n);
            for (int a = 0; a < T.n; ++a) out.push_back(ext::hodge(ext::PForm::covector(low.row(a).transpose()), m));
            return out;
          }};
}

SymTensorField form_to_emt(const CovectorValuedForm& F, const MetricField& g) {
  SymTensorField T;
  T.n = F.n;
  T.eval = [F, g](const Vec& x) -> Mat {
    const ext::Metric m = g.at(x);
    const int n = F.n;
    const int sign = ext::hodge_square_sign(n, 1, m.n_minus());
    const auto forms = F.eval(x);
    Mat low(n, n);
    for (int a = 0; a < n; ++a) {
      const ext::PForm s = ext::hodge(forms[a], m);
      for (int b = 0; b < n; ++b) low(a, b) = sign * s[b];
    }
    return m.ginv() * low * m.ginv();
  };
  return T;
}

FormField contract(const CovectorValuedForm& F, const VectorField& K) {
  return {F.n, F.n - 1, [F, K](const Vec& x) {
            const auto forms = F.eval(x);
            const Vec k = K.eval(x);
            ext::PForm out(F.n, F.n - 1);
            for (int a = 0; a < F.n; ++a) out += k(a) * forms[a];
            return out;
          }};
}

Current current_from_killing(const SymTensorField& T, const VectorField& K, const MetricField& g) {
  VectorField J{T.n, [T, K, g](const Vec& x) -> Vec { return T.eval(x) * (g.eval(x) * K.eval(x)); }};
  return {J, dual_current(J, g)};
}

IdentityResiduals identity_residuals(const SymTensorField& T, const VectorField& K, const MetricField& g, double h,
                                     const std::vector<Vec>& samples, bool include_killing_term) {
  check_step(h);
  const int n = T.n;
  const CovectorValuedForm calT = emt_to_form(T, g);
  const VectorField div = divergence(T, g, h);
  const Current cur = current_from_killing(T, K, g);
  const FormField dTK = exterior_derivative(cur.form, h);
  const CovTensorField nabK = covariant_derivative_flat(K, g, h);

  IdentityResiduals r;
  for (const Vec& x : samples) {
    const ext::Metric m = g.at(x);
    const double vol = m.sqrt_abs_det();
    // D calT_a = d(calT_a) - Gamma^c_{ba} theta^b ^ calT_c
    std::vector<std::vector<ext::PForm>> partials(n);  // partials[b][a]
    for (int b = 0; b < n; ++b) {
      auto fp = calT.eval(shifted(x, b, h));
      auto fm = calT.eval(shifted(x, b, -h));
      for (int a = 0; a < n; ++a) {
        fp[a] -= fm[a];
        fp[a] *= 1.0 / (2 * h);
      }
      partials[b] = std::move(fp);
    }
    const auto gamma = christoffel(g, x, h);
    const auto here = calT.eval(x);
    Vec DT(n);
    for (int a = 0; a < n; ++a) {
      std::vector<ext::PForm> pa;
      pa.reserve(n);
      for (int b = 0; b < n; ++b) pa.push_back(partials[b][a]);
      ext::PForm top = assemble_d(pa, n, n - 1);
      if (!g.flat) {
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            if (gamma[c](b, a) == 0.0) continue;
            top -= gamma[c](b, a) * ext::wedge(ext::PForm::basis(n, {b}), here[c]);
          }
      }
      DT(a) = top[0];
    }
    const Vec rhs1 = (m.g() * div.eval(x)) * vol;
    r.r1 = std::max(r.r1, (DT - rhs1).cwiseAbs().maxCoeff());

    const double lhs2 = dTK.eval(x)[0];
    const Vec k = K.eval(x);
    double rhs2 = k.dot(DT);
    if (include_killing_term) rhs2 += T.eval(x).cwiseProduct(nabK.eval(x)).sum() * vol;
    r.r2 = std::max(r.r2, std::abs(lhs2 - rhs2));
  }
  return r;
}

double stationarity_defect(const SymTensorField& T, const std::vector<Vec>& samples, double h) {
  const SymTensorField d0 = fd_partial(T, 0, h);
  double m = 0.0;
  for (const Vec& x : samples) m = std::max(m, d0.eval(x).cwiseAbs().maxCoeff());
  return m;
}

double symmetry_defect(const SymTensorField& T, const std::vector<Vec>& samples) {
  double m = 0.0;
  for (const Vec& x : samples) {
    const Mat t = T.eval(x);
    m = std::max(m, (t - t.transpose()).cwiseAbs().maxCoeff());
  }
  return m;
}

double Refinement::ratio() const {
  if (fine == 0.0) return coarse == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return coarse / fine;
}

}  // namespace laue::fields
