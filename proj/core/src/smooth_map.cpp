#include "slantgeo/smooth_map.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "slantgeo/errors.hpp"

namespace slantgeo {

SmoothMap::SmoothMap(std::shared_ptr<const ChartManifold> source, std::shared_ptr<const ChartManifold> target,
                     std::vector<ScalarExpr> components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
  if (!source_ || !target_) throw GeometryError("map needs a source and a target chart");
  if (static_cast<int>(components_.size()) != target_->dim()) {
    throw GeometryError("map component count must equal the target dimension");
  }
  for (const auto& c : components_) {
    if (c.dim() != source_->dim()) throw GeometryError("map component is not an expression in source coordinates");
  }
}

Vec SmoothMap::value_at(std::span<const double> p) const {
  Vec v(n());
  for (int a = 0; a < n(); ++a) v(a) = components_[static_cast<std::size_t>(a)].eval(p);
  return v;
}

MapJets map_jets_at(const SmoothMap& f, std::span<const double> p) {
  if (static_cast<int>(p.size()) != f.m()) throw GeometryError("point dimension does not match source dimension");
  MapJets j;
  j.value = Vec(f.n());
  j.differential = Mat(f.n(), f.m());
  j.hess.reserve(static_cast<std::size_t>(f.n()));
  for (int a = 0; a < f.n(); ++a) {
    const Jet2 c = f.components()[static_cast<std::size_t>(a)].eval_jet2(p);
    j.value(a) = c.value;
    j.differential.row(a) = c.gradient.transpose();
    j.hess.push_back(c.hessian);
  }
  return j;
}

Mat differential_at(const SmoothMap& f, std::span<const double> p) {
  if (static_cast<int>(p.size()) != f.m()) throw GeometryError("point dimension does not match source dimension");
  Mat d(f.n(), f.m());
  for (int a = 0; a < f.n(); ++a) {
    d.row(a) = f.components()[static_cast<std::size_t>(a)].eval_jet2(p).gradient.transpose();
  }
  return d;
}

double PointSplit::lambda() const { return std::sqrt(lambda_sq); }

Vec PointSplit::horizontal_lift(const Vec& w) const {
  if (horizontal_basis.cols() == 0) return Vec::Zero(m());
  const Vec c = pushed_basis.colPivHouseholderQr().solve(w);
  return horizontal_basis * c;
}

PointSplit split_at(const SmoothMap& f, std::span<const double> p, const SplitOptions& options) {
  PointSplit s;
  s.point = Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size()));
  s.image = f.value_at(p);
  s.g_source = f.source().metric_at(p);
  s.g_target = f.target().metric_at(as_span(s.image));
  s.differential = differential_at(f, p);

  const SvdSplit svd = svd_split(s.differential, options.rank_threshold);
  s.rank = svd.rank;
  const int full = std::min(f.m(), f.n());
  if (s.rank == 0) throw DegenerateMapError("not a proper Riemannian-map candidate: differential has rank 0");
  if (s.rank == full && !options.allow_full_rank) {
    throw DegenerateMapError("not a proper Riemannian-map candidate: differential has full rank " +
                             std::to_string(s.rank));
  }

  // ker A is Euclidean-orthogonal to the row space, so g^{-1} row space is its
  // g-orthogonal complement; likewise g_N^{-1} (left null space) is the
  // g_N-orthogonal complement of the range.
  const Eigen::PartialPivLU<Mat> lu_m(s.g_source);
  const Eigen::PartialPivLU<Mat> lu_n(s.g_target);
  s.vertical_basis = metric_orthonormalize(svd.null_space, s.g_source);
  s.horizontal_basis = metric_orthonormalize(lu_m.solve(svd.row_space), s.g_source, 1e-8, s.vertical_basis);
  s.pushed_basis = s.differential * s.horizontal_basis;
  s.range_basis = metric_orthonormalize(s.pushed_basis, s.g_target);
  s.range_perp_basis =
      svd.left_null.cols() > 0 ? metric_orthonormalize(lu_n.solve(svd.left_null), s.g_target, 1e-8, s.range_basis)
                               : Mat(f.n(), 0);

  const Mat gram = s.pushed_basis.transpose() * s.g_target * s.pushed_basis;
  s.lambda_sq = gram.diagonal().mean();
  s.conformal_residual =
      (gram - s.lambda_sq * Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  s.riemannian_residual = std::fabs(s.lambda_sq - 1.0) + s.conformal_residual;
  return s;
}

double wirtinger_angle(const Mat& g, const Mat& subspace_projector, const Vec& jv) {
  const Vec inside = subspace_projector * jv;
  const Vec outside = jv - inside;
  return std::atan2(norm(g, outside), norm(g, inside));
}

SlantReport slant_at(const SmoothMap& f, const PointSplit& split, Side side, int probes, std::uint64_t seed) {
  SlantReport r;
  r.side = side;
  Mat basis;
  Mat g;
  Mat proj;
  Mat j;
  Mat push;
  if (side == Side::domain) {
    if (!f.source().has_complex_structure()) throw GeometryError("domain slant angle needs J on the source");
    basis = split.vertical_basis;
    g = split.g_source;
    proj = split.vertical_projector();
    j = f.source().j_at(as_span(split.point));
    push = Mat::Identity(split.m(), split.m());
  } else {
    if (!f.target().has_complex_structure()) throw GeometryError("range slant angle needs J on the target");
    basis = split.horizontal_basis;
    g = split.g_target;
    proj = split.range_projector();
    j = f.target().j_at(as_span(split.image));
    push = split.differential;
  }
  const int k = static_cast<int>(basis.cols());
  if (k == 0) throw GeometryError("slant angle undefined: probe space is zero-dimensional");

  std::vector<Vec> vs;
  for (int c = 0; c < k; ++c) vs.push_back(basis.col(c));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int q = 0; q < probes; ++q) {
    Vec c(k);
    for (int t = 0; t < k; ++t) c(t) = normal(rng);
    vs.push_back(basis * (c / c.norm()));
  }

  double lo = M_PI;
  double hi = 0.0;
  double sum = 0.0;
  for (const Vec& v : vs) {
    const double th = wirtinger_angle(g, proj, j * (push * v));
    r.samples.push_back(th);
    lo = std::min(lo, th);
    hi = std::max(hi, th);
    sum += th;
  }
  r.theta = sum / static_cast<double>(vs.size());
  r.spread = hi - lo;
  return r;
}

namespace {

void require_in(const Mat& g, const Mat& proj, const Vec& x, const char* what) {
  const double total = norm(g, x);
  if (norm(g, x - proj * x) > 1e-8 * std::max(1.0, total)) throw GeometryError(what);
}

}  // namespace

DomainDecomposition decompose_domain(const SmoothMap& f, const PointSplit& split, const Vec& v, const Vec& x) {
  if (!f.source().has_complex_structure()) throw GeometryError("domain decomposition needs J on the source");
  const Mat& g = split.g_source;
  const Mat pv = split.vertical_projector();
  const Mat ph = split.horizontal_projector();
  require_in(g, pv, v, "vector is not vertical");
  require_in(g, ph, x, "vector is not horizontal");
  const Mat j = f.source().j_at(as_span(split.point));
  DomainDecomposition d;
  const Vec jv = j * v;
  const Vec jx = j * x;
  d.phi_v = pv * jv;
  d.omega_v = ph * jv;
  d.b_x = pv * jx;
  d.c_x = ph * jx;
  d.omega_ker_basis = metric_orthonormalize(ph * j * split.vertical_basis, g);
  d.mu_basis = metric_orthonormalize(split.horizontal_basis, g, 1e-8, d.omega_ker_basis);
  return d;
}

RangeDecomposition decompose_range(const SmoothMap& f, const PointSplit& split, const Vec& w, const Vec& perp) {
  if (!f.target().has_complex_structure()) throw GeometryError("range decomposition needs J on the target");
  const Mat& g = split.g_target;
  const Mat pr = split.range_projector();
  const Mat pq = split.range_perp_projector();
  require_in(g, pr, w, "vector is not in the range of the differential");
  require_in(g, pq, perp, "vector is not orthogonal to the range of the differential");
  const Mat j = f.target().j_at(as_span(split.image));
  RangeDecomposition d;
  const Vec jw = j * w;
  const Vec jp = j * perp;
  d.rho_w = pr * jw;
  d.varpi_w = pq * jw;
  d.d_p = pr * jp;
  d.e_p = pq * jp;
  d.varpi_range_basis = metric_orthonormalize(pq * j * split.range_basis, g);
  d.eta_basis = split.range_perp_basis.cols() > 0
                    ? metric_orthonormalize(split.range_perp_basis, g, 1e-8, d.varpi_range_basis)
                    : Mat(split.n(), 0);
  return d;
}

Mat adjoint_matrix(const PointSplit& split) {
  return Eigen::PartialPivLU<Mat>(split.g_source).solve(split.differential.transpose() * split.g_target);
}

Vec adjoint_at(const PointSplit& split, const Vec& w) { return adjoint_matrix(split) * w; }

}  // namespace slantgeo
