#include "slantgeo/connection.hpp"

#include <algorithm>
#include <cmath>

#include "slantgeo/errors.hpp"

namespace slantgeo {

MatJet MatJet::constant(const Mat& v, int m) {
  return {v, std::vector<Mat>(static_cast<std::size_t>(m), Mat::Zero(v.rows(), v.cols()))};
}

MatJet MatJet::transpose() const {
  MatJet t{value.transpose(), {}};
  for (const Mat& di : d) t.d.push_back(di.transpose());
  return t;
}

MatJet MatJet::inverse() const {
  MatJet t{Eigen::PartialPivLU<Mat>(value).inverse(), {}};
  for (const Mat& di : d) t.d.push_back(-t.value * di * t.value);
  return t;
}

Mat MatJet::along(const Vec& e) const {
  Mat s = Mat::Zero(value.rows(), value.cols());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (e(static_cast<Eigen::Index>(i)) != 0.0) s += e(static_cast<Eigen::Index>(i)) * d[i];
  }
  return s;
}

MatJet operator*(const MatJet& a, const MatJet& b) {
  MatJet r{a.value * b.value, {}};
  r.d.reserve(a.d.size());
  for (std::size_t i = 0; i < a.d.size(); ++i) r.d.push_back(a.d[i] * b.value + a.value * b.d[i]);
  return r;
}

MatJet operator+(const MatJet& a, const MatJet& b) {
  MatJet r{a.value + b.value, {}};
  for (std::size_t i = 0; i < a.d.size(); ++i) r.d.push_back(a.d[i] + b.d[i]);
  return r;
}

MatJet operator-(const MatJet& a, const MatJet& b) {
  MatJet r{a.value - b.value, {}};
  for (std::size_t i = 0; i < a.d.size(); ++i) r.d.push_back(a.d[i] - b.d[i]);
  return r;
}

FieldJet operator*(const MatJet& a, const Vec& v) {
  FieldJet f{a.value * v, Mat(a.value.rows(), static_cast<Eigen::Index>(a.d.size()))};
  for (std::size_t i = 0; i < a.d.size(); ++i) f.d.col(static_cast<Eigen::Index>(i)) = a.d[i] * v;
  return f;
}

FieldJet operator*(const MatJet& a, const FieldJet& x) {
  FieldJet f{a.value * x.value, a.value * x.d};
  for (std::size_t i = 0; i < a.d.size(); ++i) f.d.col(static_cast<Eigen::Index>(i)) += a.d[i] * x.value;
  return f;
}

FieldJet operator+(const FieldJet& a, const FieldJet& b) { return {a.value + b.value, a.d + b.d}; }
FieldJet operator-(const FieldJet& a, const FieldJet& b) { return {a.value - b.value, a.d - b.d}; }
FieldJet operator*(double s, const FieldJet& f) { return {s * f.value, s * f.d}; }

MapGeometry::MapGeometry(const SmoothMap& f, std::span<const double> p, const SplitOptions& options)
    : map_(&f), split_(split_at(f, p, options)), jets_(map_jets_at(f, p)) {
  const int m = f.m();
  const int n = f.n();
  source_metric_ = f.source().metric_jets(p);
  gamma_m_ = christoffel(source_metric_);
  const MetricJets tm = f.target().metric_jets(as_span(split_.image));
  gamma_n_ = christoffel(tm);
  const Mat& a = jets_.differential;

  g_ = {source_metric_.g, source_metric_.dg};
  gn_ = {tm.g, {}};
  a_ = {a, {}};
  for (int i = 0; i < m; ++i) {
    Mat dgn = Mat::Zero(n, n);
    for (int b = 0; b < n; ++b) dgn += a(b, i) * tm.dg[static_cast<std::size_t>(b)];
    gn_.d.push_back(dgn);
    Mat da(n, m);
    for (int c = 0; c < n; ++c) da.row(c) = jets_.hess[static_cast<std::size_t>(c)].row(i);
    a_.d.push_back(da);
  }

  const Mat& gm = g_.value;
  const Mat& gt = gn_.value;
  const Mat& vb = split_.vertical_basis;
  const Mat& hb = split_.horizontal_basis;
  const Mat& rb = split_.range_basis;
  const Mat& qb = split_.range_perp_basis;
  const Mat eye_m = Mat::Identity(m, m);
  const Mat eye_n = Mat::Identity(n, n);
  const Mat p0 = projector(gm, vb);
  const Mat r0 = projector(gt, rb);

  // For vertical w: H dP w = -lift(dA w). For horizontal x: g(w, P dP x) =
  // g(H dP w, x) + dg(w, x). Likewise dR (A y) = Q dA y on the range and
  // g(u, R dR q) = g(Q dR u, q) + dg_N(u, q) on the perp space.
  p_ = {p0, {}};
  r_ = {r0, {}};
  for (int i = 0; i < m; ++i) {
    const Mat& dai = a_.d[static_cast<std::size_t>(i)];
    const Mat& dgi = g_.d[static_cast<std::size_t>(i)];
    const Mat& dgni = gn_.d[static_cast<std::size_t>(i)];

    Mat mh(m, vb.cols());
    for (int j = 0; j < vb.cols(); ++j) mh.col(j) = -split_.horizontal_lift(dai * vb.col(j));
    const Mat nn = mh.transpose() * gm * hb + vb.transpose() * dgi * hb;
    p_.d.push_back(mh * vb.transpose() * gm + vb * nn * hb.transpose() * gm);

    Mat mr(n, rb.cols());
    for (int j = 0; j < rb.cols(); ++j) mr.col(j) = (eye_n - r0) * (dai * split_.horizontal_lift(rb.col(j)));
    const Mat n2 = mr.transpose() * gt * qb + rb.transpose() * dgni * qb;
    r_.d.push_back(mr * rb.transpose() * gt + rb * n2 * qb.transpose() * gt);
  }
  h_ = MatJet::constant(eye_m, m) - p_;
  q_ = MatJet::constant(eye_n, m) - r_;
  adj_ = g_.inverse() * a_.transpose() * gn_;

  if (f.source().has_complex_structure()) {
    j_m_ = MatJet{f.source().j_at(p), f.source().j_derivatives(p)};
  }
  if (f.target().has_complex_structure()) {
    const auto dj = f.target().j_derivatives(as_span(split_.image));
    MatJet jn{f.target().j_at(as_span(split_.image)), {}};
    for (int i = 0; i < m; ++i) {
      Mat s = Mat::Zero(n, n);
      for (int b = 0; b < n; ++b) s += a(b, i) * dj[static_cast<std::size_t>(b)];
      jn.d.push_back(s);
    }
    j_n_ = std::move(jn);
  }
}

const MatJet& MapGeometry::j_source() const {
  if (!j_m_) throw GeometryError("source chart has no complex structure");
  return *j_m_;
}

const MatJet& MapGeometry::j_target() const {
  if (!j_n_) throw GeometryError("target chart has no complex structure");
  return *j_n_;
}

Vec MapGeometry::cov_source(const FieldJet& f, const Vec& e) const {
  return f.d * e + gamma_m_.contract(e, f.value);
}

Vec MapGeometry::cov_pullback(const FieldJet& f, const Vec& e) const {
  return f.d * e + gamma_n_.contract(a_.value * e, f.value);
}

Vec MapGeometry::cov_target(const FieldJet& f, const Vec& u) const {
  return f.d * horizontal_lift(r_.value * u) + gamma_n_.contract(u, f.value);
}

Vec MapGeometry::bracket_target(const FieldJet& a, const FieldJet& b) const {
  return cov_target(b, a.value) - cov_target(a, b.value);
}

Vec MapGeometry::sff(const Vec& x, const Vec& y) const {
  Vec hess_term(n());
  for (int c = 0; c < n(); ++c) hess_term(c) = x.dot(jets_.hess[static_cast<std::size_t>(c)] * y);
  return hess_term - a_.value * gamma_m_.contract(x, y) + gamma_n_.contract(a_.value * x, a_.value * y);
}

Vec MapGeometry::oneill_t(const Vec& e, const Vec& f) const {
  const Mat& p0 = p_.value;
  const Mat& h0 = h_.value;
  const Vec ve = p0 * e;
  const Mat dp = p_.along(ve);
  return h0 * (dp * f + gamma_m_.contract(ve, p0 * f)) + p0 * (-dp * f + gamma_m_.contract(ve, h0 * f));
}

Vec MapGeometry::oneill_a(const Vec& e, const Vec& f) const {
  const Mat& p0 = p_.value;
  const Mat& h0 = h_.value;
  const Vec he = h0 * e;
  const Mat dp = p_.along(he);
  return p0 * (-dp * f + gamma_m_.contract(he, h0 * f)) + h0 * (dp * f + gamma_m_.contract(he, p0 * f));
}

Vec MapGeometry::vertical_bracket(const Vec& x, const Vec& y) const {
  return p_.value * (-p_.along(x) * y + p_.along(y) * x);
}

SFFValue split_sff(const MapGeometry& geo, const Vec& total) {
  SFFValue v;
  v.total = total;
  v.range_part = geo.range().value * total;
  v.perp_part = total - v.range_part;
  return v;
}

SFFValue sff_at(const SmoothMap& f, const VectorField& x, const VectorField& y, std::span<const double> p,
                const SplitOptions& options) {
  if (x.dim() != f.m() || y.dim() != f.m()) throw GeometryError("vector fields are not on the source chart");
  const MapGeometry geo(f, p, options);
  const Vec xv = x.at(p);
  const Vec yv = y.at(p);
  const Mat dy = y.jacobian(p);
  const MapJets& j = geo.jets();
  // X^i d_i (F*Y)^a with (F*Y)^a = d_j F^a Y^j.
  Vec along(f.n());
  for (int c = 0; c < f.n(); ++c) {
    along(c) = xv.dot(j.hess[static_cast<std::size_t>(c)] * yv) + j.differential.row(c).dot(dy * xv);
  }
  const Vec pushed_cov = j.differential * (dy * xv + geo.gamma_source().contract(xv, yv));
  const Vec total =
      along + geo.gamma_target().contract(j.differential * xv, j.differential * yv) - pushed_cov;
  return split_sff(geo, total);
}

DilationField::DilationField(const SmoothMap& f, std::optional<ScalarExpr> declared, SplitOptions options)
    : map_(&f), declared_(std::move(declared)), options_(options) {
  if (declared_ && declared_->dim() != f.m()) throw GeometryError("declared dilation is not in source coordinates");
}

double DilationField::estimate(const Vec& x) const { return split_at(*map_, as_span(x), options_).lambda(); }

double DilationField::lambda(std::span<const double> p) const {
  if (declared_) return declared_->eval(p);
  return estimate(Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size())));
}

ScalarJet DilationField::jet(std::span<const double> p) const {
  if (declared_) {
    const Jet2 j = declared_->eval_jet2(p);
    return {j.value, j.gradient, j.hessian};
  }
  return numeric_jet(p);
}

ScalarJet DilationField::numeric_jet(std::span<const double> p, bool with_hessian) const {
  const Vec x0 = Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size()));
  const int m = static_cast<int>(x0.size());
  ScalarJet s;
  s.value = estimate(x0);
  s.gradient = Vec(m);
  s.hessian = Mat::Zero(m, m);
  auto at = [&](int i, double hi, int j, double hj) {
    Vec x = x0;
    if (i >= 0) x(i) += hi;
    if (j >= 0) x(j) += hj;
    return estimate(x);
  };
  const double h1 = 1e-5;
  for (int i = 0; i < m; ++i) {
    auto d = [&](double h) { return (at(i, h, -1, 0) - at(i, -h, -1, 0)) / (2 * h); };
    s.gradient(i) = (4 * d(h1 / 2) - d(h1)) / 3;
  }
  if (!with_hessian) return s;
  const double h2 = 1e-4;
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      auto d2 = [&](double h) {
        if (i == j) return (at(i, h, -1, 0) - 2 * s.value + at(i, -h, -1, 0)) / (h * h);
        return (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4 * h * h);
      };
      s.hessian(i, j) = s.hessian(j, i) = (4 * d2(h2 / 2) - d2(h2)) / 3;
    }
  }
  return s;
}

ScalarJet DilationField::log_of(const ScalarJet& lam) {
  const double l = lam.value;
  return {std::log(l), lam.gradient / l, lam.hessian / l - lam.gradient * lam.gradient.transpose() / (l * l)};
}

ScalarJet DilationField::inverse_square_of(const ScalarJet& lam) {
  const double l = lam.value;
  return {1.0 / (l * l), -2.0 * lam.gradient / (l * l * l),
          6.0 * lam.gradient * lam.gradient.transpose() / std::pow(l, 4) - 2.0 * lam.hessian / (l * l * l)};
}

double sff_conformal_identity_at(const MapGeometry& geo, const Vec& x, const Vec& y, const ScalarJet& log_lambda) {
  const PointSplit& s = geo.split();
  if (s.conformal_residual > 1e-8 * std::max(1.0, s.lambda_sq)) {
    throw GeometryError("map is not conformal at this point (residual " + std::to_string(s.conformal_residual) + ")");
  }
  const Mat& a = geo.differential().value;
  const Vec grad = Eigen::PartialPivLU<Mat>(geo.g()).solve(log_lambda.gradient);
  const Vec rhs = x.dot(log_lambda.gradient) * (a * y) + y.dot(log_lambda.gradient) * (a * x) -
                  geo.gs(x, y) * (a * grad);
  const Vec lhs = geo.range().value * geo.sff(x, y);
  return norm(geo.gn(), lhs - rhs);
}

ONeillAtPoint oneill_at(const MapGeometry& geo) {
  ONeillAtPoint o;
  const PointSplit& s = geo.split();
  o.vertical_frame = s.vertical_basis;
  o.horizontal_frame = s.horizontal_basis;
  const int k = static_cast<int>(s.vertical_basis.cols());
  const int r = static_cast<int>(s.horizontal_basis.cols());
  Mat frame(geo.m(), k + r);
  frame << s.vertical_basis, s.horizontal_basis;
  const Mat& p0 = geo.vertical().value;
  const Mat& h0 = geo.horizontal().value;
  const Mat& g = geo.g();
  const Tensor3& gam = geo.gamma_source();
  const MatJet& dA = geo.differential();

  o.t.assign(static_cast<std::size_t>(k + r), {});
  o.a.assign(static_cast<std::size_t>(k + r), {});
  for (int i = 0; i < k + r; ++i) {
    for (int j = 0; j < k + r; ++j) {
      o.t[static_cast<std::size_t>(i)].push_back(geo.oneill_t(frame.col(i), frame.col(j)));
      o.a[static_cast<std::size_t>(i)].push_back(geo.oneill_a(frame.col(i), frame.col(j)));
    }
  }

  // Independent forms of T and A from the differential's second jets.
  auto t_vw = [&](const Vec& v, const Vec& w) {
    return Vec(-geo.horizontal_lift(dA.along(v) * w) + h0 * gam.contract(v, w));
  };
  auto a_xy = [&](const Vec& x, const Vec& y) {
    Vec out = Vec::Zero(geo.m());
    for (int j = 0; j < k; ++j) {
      const Vec vj = s.vertical_basis.col(j);
      out += (inner(g, y, geo.horizontal_lift(dA.along(x) * vj)) - inner(g, y, gam.contract(x, vj))) * vj;
    }
    return out;
  };
  auto t_vx = [&](const Vec& v, const Vec& x) {
    Vec out = Vec::Zero(geo.m());
    for (int j = 0; j < k; ++j) out -= inner(g, x, t_vw(v, s.vertical_basis.col(j))) * s.vertical_basis.col(j);
    return out;
  };
  auto a_xv = [&](const Vec& x, const Vec& v) {
    Vec out = Vec::Zero(geo.m());
    for (int l = 0; l < r; ++l) out -= inner(g, v, a_xy(x, s.horizontal_basis.col(l))) * s.horizontal_basis.col(l);
    return out;
  };

  double worst = 0.0;
  auto track = [&](const Vec& d) { worst = std::max(worst, norm(g, d)); };
  for (int i = 0; i < k; ++i) {
    const Vec v = s.vertical_basis.col(i);
    for (int j = 0; j < k; ++j) {
      const Vec w = s.vertical_basis.col(j);
      const Vec nab = geo.cov_source(geo.vertical() * w, v);
      track(nab - (t_vw(v, w) + p0 * nab));
      track(o.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - t_vw(v, w));
      o.t_symmetry_residual = std::max(o.t_symmetry_residual, norm(g, t_vw(v, w) - t_vw(w, v)));
    }
    for (int l = 0; l < r; ++l) {
      const Vec x = s.horizontal_basis.col(l);
      const Vec nab = geo.cov_source(geo.horizontal() * x, v);
      track(nab - (h0 * nab + t_vx(v, x)));
      track(o.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(k + l)] - t_vx(v, x));
      const Vec nab2 = geo.cov_source(geo.vertical() * v, x);
      track(nab2 - (a_xv(x, v) + p0 * nab2));
      track(o.a[static_cast<std::size_t>(k + l)][static_cast<std::size_t>(i)] - a_xv(x, v));
    }
  }
  for (int l = 0; l < r; ++l) {
    const Vec x = s.horizontal_basis.col(l);
    for (int q = 0; q < r; ++q) {
      const Vec y = s.horizontal_basis.col(q);
      const Vec nab = geo.cov_source(geo.horizontal() * y, x);
      track(nab - (h0 * nab + a_xy(x, y)));
      track(o.a[static_cast<std::size_t>(k + l)][static_cast<std::size_t>(k + q)] - a_xy(x, y));
    }
  }
  o.decomposition_residual = worst;
  return o;
}

SOperatorValue s_operator_at(const MapGeometry& geo, const FieldJet& v, const Vec& x) {
  const Mat& r0 = geo.range().value;
  const double vn = norm(geo.gn(), v.value);
  if (norm(geo.gn(), r0 * v.value) > 1e-8 * std::max(1.0, vn)) {
    throw GeometryError("S operator needs a vector orthogonal to the range of the differential");
  }
  SOperatorValue out;
  const Vec nab = geo.cov_pullback(v, x);
  out.s = -(r0 * nab);
  out.normal = nab + out.s;
  const Mat& hb = geo.split().horizontal_basis;
  const Mat& a = geo.differential().value;
  for (int l = 0; l < hb.cols(); ++l) {
    const Vec y = hb.col(l);
    out.duality_residual =
        std::max(out.duality_residual, std::fabs(geo.gt(out.s, a * y) - geo.gt(v.value, geo.sff(x, y))));
  }
  return out;
}

SOperatorValue s_operator_at(const MapGeometry& geo, const Vec& v, const Vec& x) {
  return s_operator_at(geo, geo.range_perp() * v, x);
}

OmegaPhiDerivatives omega_phi_covderiv_at(const MapGeometry& geo, const Vec& v, const Vec& w) {
  const MatJet& j = geo.j_source();
  const MatJet& p = geo.vertical();
  const MatJet& h = geo.horizontal();
  const Mat& j0 = j.value;
  const Mat& p0 = p.value;
  const Mat& h0 = h.value;
  const Mat& g = geo.g();

  const Vec hat = p0 * geo.cov_source(p * w, v);
  OmegaPhiDerivatives out;
  out.nabla_omega = h0 * geo.cov_source(h * j * p * w, v) - h0 * j0 * hat;
  out.nabla_phi = p0 * geo.cov_source(p * j * p * w, v) - p0 * j0 * hat;

  const Vec t_vw = geo.oneill_t(v, w);
  const Vec rhs17 = h0 * j0 * t_vw - geo.oneill_t(v, p0 * j0 * w);
  const Vec rhs18 = p0 * j0 * t_vw - geo.oneill_t(v, h0 * j0 * w);
  out.omega_residual = norm(g, out.nabla_omega - rhs17);
  out.phi_residual = norm(g, out.nabla_phi - rhs18);
  out.omega_parallel_residual = norm(g, out.nabla_omega);
  return out;
}

TensionValue tension_at(const MapGeometry& geo) {
  const PointSplit& s = geo.split();
  TensionValue t;
  t.tension = Vec::Zero(geo.n());
  for (int i = 0; i < s.vertical_basis.cols(); ++i) t.tension += geo.sff(s.vertical_basis.col(i), s.vertical_basis.col(i));
  for (int i = 0; i < s.horizontal_basis.cols(); ++i) {
    t.tension += geo.sff(s.horizontal_basis.col(i), s.horizontal_basis.col(i));
  }
  t.harmonic = norm(geo.gn(), t.tension) <= kHarmonicTolerance;
  return t;
}

}  // namespace slantgeo
