#include "slantgeo/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "slantgeo/errors.hpp"

namespace slantgeo {

namespace {

void require_dim(std::span<const double> p, int dim) {
  if (static_cast<int>(p.size()) != dim) throw GeometryError("point dimension does not match chart dimension");
}

}  // namespace

ChartManifold::ChartManifold(int dim, const std::vector<MetricEntry>& upper_entries,
                             std::optional<std::vector<ScalarExpr>> complex_structure)
    : dim_(dim), metric_(static_cast<std::size_t>(dim * dim)), complex_(std::move(complex_structure)) {
  if (dim <= 0) throw GeometryError("chart dimension must be positive");
  std::set<std::pair<int, int>> seen;
  for (const auto& e : upper_entries) {
    if (e.i < 0 || e.j < 0 || e.i >= dim || e.j >= dim) throw GeometryError("metric entry index out of range");
    if (e.i > e.j) throw GeometryError("lower-triangle metric entry; declare i <= j");
    if (!seen.insert({e.i, e.j}).second) throw GeometryError("duplicate metric entry");
    if (e.expr.dim() != dim) throw GeometryError("metric entry expression is in the wrong chart");
    metric_[static_cast<std::size_t>(e.i * dim + e.j)] = e.expr;
    metric_[static_cast<std::size_t>(e.j * dim + e.i)] = e.expr;
  }
  for (auto& e : metric_) {
    if (e.empty()) e = ScalarExpr::constant(0.0, dim);
  }
  if (complex_) {
    if (dim % 2 != 0) throw GeometryError("a complex structure needs an even-dimensional chart");
    if (static_cast<int>(complex_->size()) != dim * dim) throw GeometryError("complex structure must be dim x dim");
    for (auto& e : *complex_) {
      if (e.empty()) e = ScalarExpr::constant(0.0, dim);
      if (e.dim() != dim) throw GeometryError("complex structure expression is in the wrong chart");
    }
  }
}

ChartManifold ChartManifold::euclidean(int dim, std::optional<std::vector<ScalarExpr>> complex_structure) {
  std::vector<MetricEntry> entries;
  for (int i = 0; i < dim; ++i) entries.push_back({i, i, ScalarExpr::constant(1.0, dim)});
  return ChartManifold(dim, entries, std::move(complex_structure));
}

const ScalarExpr& ChartManifold::j_expr(int a, int b) const { return j_exprs()[static_cast<std::size_t>(a * dim_ + b)]; }

const std::vector<ScalarExpr>& ChartManifold::j_exprs() const {
  if (!complex_) throw GeometryError("chart has no complex structure");
  return *complex_;
}

void check_metric(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw GeometryError("metric is not positive definite at point");
  Eigen::PartialPivLU<Mat> lu(g);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) throw GeometryError("metric is singular at point (condition number > 1e12)");
}

Mat ChartManifold::metric_at(std::span<const double> p) const {
  require_dim(p, dim_);
  Mat g(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      g(i, j) = g(j, i) = metric_expr(i, j).eval(p);
    }
  }
  check_metric(g);
  return g;
}

MetricJets ChartManifold::metric_jets(std::span<const double> p) const {
  require_dim(p, dim_);
  const int n = dim_;
  MetricJets m;
  m.g = Mat::Zero(n, n);
  m.dg.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  m.d2g.assign(static_cast<std::size_t>(n), std::vector<Mat>(static_cast<std::size_t>(n), Mat::Zero(n, n)));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const Jet2 e = metric_expr(i, j).eval_jet2(p);
      m.g(i, j) = m.g(j, i) = e.value;
      for (int k = 0; k < n; ++k) {
        m.dg[k](i, j) = m.dg[k](j, i) = e.gradient(k);
        for (int l = 0; l < n; ++l) m.d2g[k][l](i, j) = m.d2g[k][l](j, i) = e.hessian(k, l);
      }
    }
  }
  check_metric(m.g);
  m.g_inv = Eigen::PartialPivLU<Mat>(m.g).inverse();
  return m;
}

Mat ChartManifold::j_at(std::span<const double> p) const {
  require_dim(p, dim_);
  const auto& js = j_exprs();
  Mat j(dim_, dim_);
  for (int a = 0; a < dim_; ++a) {
    for (int b = 0; b < dim_; ++b) j(a, b) = js[static_cast<std::size_t>(a * dim_ + b)].eval(p);
  }
  return j;
}

std::vector<Mat> ChartManifold::j_derivatives(std::span<const double> p) const {
  require_dim(p, dim_);
  const auto& js = j_exprs();
  std::vector<Mat> d(static_cast<std::size_t>(dim_), Mat::Zero(dim_, dim_));
  for (int a = 0; a < dim_; ++a) {
    for (int b = 0; b < dim_; ++b) {
      const auto& e = js[static_cast<std::size_t>(a * dim_ + b)];
      if (e.is_constant()) continue;
      const Jet2 jet = e.eval_jet2(p);
      for (int k = 0; k < dim_; ++k) d[k](a, b) = jet.gradient(k);
    }
  }
  return d;
}

VectorField VectorField::coordinate(int index, int dim) {
  VectorField f;
  for (int k = 0; k < dim; ++k) f.components.push_back(ScalarExpr::constant(k == index ? 1.0 : 0.0, dim));
  return f;
}

VectorField VectorField::constant(const Vec& v) {
  VectorField f;
  const int dim = static_cast<int>(v.size());
  for (int k = 0; k < dim; ++k) f.components.push_back(ScalarExpr::constant(v(k), dim));
  return f;
}

Vec VectorField::at(std::span<const double> p) const {
  Vec v(dim());
  for (int k = 0; k < dim(); ++k) v(k) = components[static_cast<std::size_t>(k)].eval(p);
  return v;
}

Mat VectorField::jacobian(std::span<const double> p) const {
  const int n = dim();
  Mat d = Mat::Zero(n, static_cast<int>(p.size()));
  for (int k = 0; k < n; ++k) {
    const auto& e = components[static_cast<std::size_t>(k)];
    if (e.is_constant()) continue;
    d.row(k) = e.eval_jet2(p).gradient.transpose();
  }
  return d;
}

VectorField apply(const std::vector<ScalarExpr>& matrix, const VectorField& x) {
  const int n = x.dim();
  if (static_cast<int>(matrix.size()) != n * n) throw GeometryError("matrix/field dimension mismatch");
  VectorField r;
  for (int a = 0; a < n; ++a) {
    ScalarExpr sum;
    for (int b = 0; b < n; ++b) {
      ScalarExpr term = matrix[static_cast<std::size_t>(a * n + b)] * x.components[static_cast<std::size_t>(b)];
      sum = sum.empty() ? term : sum + term;
    }
    r.components.push_back(sum);
  }
  return r;
}

Tensor3 christoffel(const MetricJets& jets) {
  const int n = static_cast<int>(jets.g.rows());
  Tensor3 gamma(n, n, n);
  // First kind: Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Vec first(n);
      for (int l = 0; l < n; ++l) {
        first(l) = 0.5 * (jets.dg[i](j, l) + jets.dg[j](i, l) - jets.dg[l](i, j));
      }
      const Vec second = jets.g_inv * first;
      for (int k = 0; k < n; ++k) gamma(k, i, j) = gamma(k, j, i) = second(k);
    }
  }
  return gamma;
}

Tensor3 christoffel_at(const ChartManifold& m, std::span<const double> p) { return christoffel(m.metric_jets(p)); }

double CurvatureAtPoint::evaluate(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const {
  const int n = riemann.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (y(j) == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) s += riemann(i, j, k, l) * x(i) * y(j) * z(k) * w(l);
      }
    }
  }
  return s;
}

double CurvatureAtPoint::symmetry_residual() const {
  const int n = riemann.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          const double r = riemann(i, j, k, l);
          worst = std::max({worst, std::fabs(r + riemann(j, i, k, l)), std::fabs(r + riemann(i, j, l, k)),
                            std::fabs(r - riemann(k, l, i, j))});
        }
      }
    }
  }
  return worst;
}

double CurvatureAtPoint::bianchi_residual() const {
  const int n = riemann.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          worst = std::max(worst, std::fabs(riemann(i, j, k, l) + riemann(j, k, i, l) + riemann(k, i, j, l)));
        }
      }
    }
  }
  return worst;
}

CurvatureAtPoint riemann_at(const ChartManifold& m, std::span<const double> p) {
  const MetricJets jets = m.metric_jets(p);
  const int n = m.dim();
  const Tensor3 gamma = christoffel(jets);

  // dgamma[mm](k,i,j) = d_mm Gamma^k_ij from the metric second jets.
  std::vector<Tensor3> dgamma(static_cast<std::size_t>(n), Tensor3(n, n, n));
  for (int mm = 0; mm < n; ++mm) {
    const Mat dginv = -jets.g_inv * jets.dg[mm] * jets.g_inv;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Vec first(n);
        Vec dfirst(n);
        for (int l = 0; l < n; ++l) {
          first(l) = 0.5 * (jets.dg[i](j, l) + jets.dg[j](i, l) - jets.dg[l](i, j));
          dfirst(l) = 0.5 * (jets.d2g[mm][i](j, l) + jets.d2g[mm][j](i, l) - jets.d2g[mm][l](i, j));
        }
        const Vec d = dginv * first + jets.g_inv * dfirst;
        for (int k = 0; k < n; ++k) dgamma[mm](k, i, j) = dgamma[mm](k, j, i) = d(k);
      }
    }
  }

  CurvatureAtPoint out;
  out.point.assign(p.begin(), p.end());
  out.riemann = Tensor4(n);
  Vec up(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        // (R(d_i, d_j) d_k)^l
        for (int l = 0; l < n; ++l) {
          double s = dgamma[i](l, j, k) - dgamma[j](l, i, k);
          for (int q = 0; q < n; ++q) s += gamma(l, i, q) * gamma(q, j, k) - gamma(l, j, q) * gamma(q, i, k);
          up(l) = s;
        }
        const Vec low = jets.g * up;
        for (int l = 0; l < n; ++l) out.riemann(i, j, k, l) = low(l);
      }
    }
  }
  return out;
}

Vec lie_bracket_at(const VectorField& x, const VectorField& y, std::span<const double> p) {
  if (x.dim() != y.dim() || x.dim() != static_cast<int>(p.size())) {
    throw GeometryError("vector fields and point have mismatched dimensions");
  }
  return y.jacobian(p) * x.at(p) - x.jacobian(p) * y.at(p);
}

Vec nijenhuis_at(const ChartManifold& m, const VectorField& x, const VectorField& y, std::span<const double> p) {
  const auto& js = m.j_exprs();
  const VectorField jx = apply(js, x);
  const VectorField jy = apply(js, y);
  const Mat j = m.j_at(p);
  return lie_bracket_at(jx, jy, p) - lie_bracket_at(x, y, p) - j * lie_bracket_at(x, jy, p) -
         j * lie_bracket_at(jx, y, p);
}

std::vector<Mat> covariant_derivative_of_j(const Mat& j, const std::vector<Mat>& dj, const Tensor3& gamma) {
  const int n = static_cast<int>(j.rows());
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Mat gi(n, n);  // (Gamma_i)^k_l = Gamma^k_il
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) gi(k, l) = gamma(k, i, l);
    }
    out.push_back(dj[static_cast<std::size_t>(i)] + gi * j - j * gi);
  }
  return out;
}

HermitianResiduals hermitian_kahler_residuals(const ChartManifold& m, std::span<const double> p) {
  const int n = m.dim();
  const MetricJets jets = m.metric_jets(p);
  const Mat j = m.j_at(p);
  HermitianResiduals r;
  r.jsq = (j * j + Mat::Identity(n, n)).cwiseAbs().maxCoeff();

  const Mat frame = metric_orthonormalize(Mat::Identity(n, n), jets.g);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double lhs = inner(jets.g, j * frame.col(a), j * frame.col(b));
      const double rhs = inner(jets.g, frame.col(a), frame.col(b));
      r.compat = std::max(r.compat, std::fabs(lhs - rhs));
    }
  }

  const auto nabla_j = covariant_derivative_of_j(j, m.j_derivatives(p), christoffel(jets));
  for (int a = 0; a < n; ++a) {
    Mat along = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) along += frame(i, a) * nabla_j[static_cast<std::size_t>(i)];
    for (int b = 0; b < n; ++b) r.kahler = std::max(r.kahler, norm(jets.g, along * frame.col(b)));
  }
  return r;
}

double space_form_curvature(double v, const Mat& g, const Mat& j, const Vec& y1, const Vec& y2, const Vec& y3,
                            const Vec& y4) {
  auto gg = [&](const Vec& a, const Vec& b) { return inner(g, a, b); };
  const Vec jy1 = j * y1;
  const Vec jy2 = j * y2;
  const Vec jy3 = j * y3;
  return 0.25 * v *
         (gg(y1, y4) * gg(y2, y3) - gg(y1, y3) * gg(y2, y4) + gg(y1, jy3) * gg(jy2, y4) -
          gg(y2, jy3) * gg(jy1, y4) + 2.0 * gg(y1, jy2) * gg(jy3, y4));
}

double space_form_curvature(double v, const ChartManifold& m, const Vec& y1, const Vec& y2, const Vec& y3,
                            const Vec& y4, std::span<const double> p) {
  return space_form_curvature(v, m.metric_at(p), m.j_at(p), y1, y2, y3, y4);
}

}  // namespace slantgeo
