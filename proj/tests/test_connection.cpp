#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "slantgeo/connection.hpp"
#include "support/oracles.hpp"

using namespace slantgeo;

namespace {

std::shared_ptr<const ChartManifold> flat(int n) { return std::make_shared<ChartManifold>(ChartManifold::euclidean(n)); }

std::shared_ptr<const ChartManifold> warped(double c) {
  const ParamMap p{{"c", c}};
  return std::make_shared<ChartManifold>(
      4, std::vector<ChartManifold::MetricEntry>{{0, 0, parse("1", 4)},
                                                 {1, 1, parse("1", 4)},
                                                 {2, 2, parse("exp(2*c*x1)", 4, p)},
                                                 {3, 3, parse("exp(2*c*x1)", 4, p)}});
}

SmoothMap make_map(std::shared_ptr<const ChartManifold> s, std::shared_ptr<const ChartManifold> t,
                   const std::vector<std::string>& comps) {
  std::vector<ScalarExpr> e;
  for (const auto& c : comps) e.push_back(parse(c, s->dim()));
  return SmoothMap(std::move(s), std::move(t), std::move(e));
}

// Rank-2 map R^3 -> R^3 whose kernel and range both rotate.
SmoothMap twisted() {
  return make_map(flat(3), flat(3),
                  {"x1 + x2*x3", "x2 + sin(x3)", "(x1 + x2*x3)^2 + (x2 + sin(x3))^2"});
}

oracle::Vec vec(std::initializer_list<double> v) {
  oracle::Vec r(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

}  // namespace

TEST(ProjectorJets, MatchFiniteDifferences) {
  const SmoothMap f = twisted();
  const oracle::Vec p = vec({0.3, -0.4, 0.6});
  const MapGeometry geo(f, as_span(p));
  using Getter = Mat (PointSplit::*)() const;
  const std::vector<std::pair<const MatJet*, Getter>> cases{
      {&geo.vertical(), &PointSplit::vertical_projector},
      {&geo.horizontal(), &PointSplit::horizontal_projector},
      {&geo.range(), &PointSplit::range_projector},
      {&geo.range_perp(), &PointSplit::range_perp_projector}};
  for (const auto& [jet, getter] : cases) {
    EXPECT_LE((jet->value - (split_at(f, as_span(p)).*getter)()).norm(), 1e-13);
    for (int k = 0; k < 3; ++k) {
      auto field = [&, getter = getter](const oracle::Vec& y) { return (split_at(f, as_span(y)).*getter)(); };
      EXPECT_LE(oracle::rel_error(jet->d[static_cast<std::size_t>(k)], oracle::fd_matrix(field, p, k)), 1e-8);
    }
  }
  for (int k = 0; k < 3; ++k) {
    auto diff = [&](const oracle::Vec& y) { return differential_at(f, as_span(y)); };
    EXPECT_LE(oracle::rel_error(geo.differential().d[static_cast<std::size_t>(k)], oracle::fd_matrix(diff, p, k)), 1e-8);
  }
}

TEST(SecondFundamentalForm, MatchesHessianOracle) {
  const SmoothMap f = make_map(warped(0.4), flat(3), {"x1*cos(x3)", "x2 + x4^2", "exp(x1)*sin(x3)"});
  const oracle::Vec p = vec({0.2, -0.1, 0.5, 0.3});
  SplitOptions opt;
  opt.allow_full_rank = true;
  const MapGeometry geo(f, as_span(p), opt);
  const Tensor3 gamma = christoffel_at(f.source(), as_span(p));
  for (int a = 0; a < 3; ++a) {
    auto comp = [&](const oracle::Vec& y) { return f.components()[static_cast<std::size_t>(a)].eval(as_span(y)); };
    const Mat hess = oracle::fd_hessian(comp, p);
    const Mat jac = differential_at(f, as_span(p));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double expected = hess(i, j);
        for (int k = 0; k < 4; ++k) expected -= gamma(k, i, j) * jac(a, k);
        const Vec ei = Mat::Identity(4, 4).col(i), ej = Mat::Identity(4, 4).col(j);
        EXPECT_NEAR(geo.sff(ei, ej)(a), expected, 1e-7);
      }
  }
}

TEST(SecondFundamentalForm, FieldFormAgreesWithTensor) {
  const SmoothMap f = twisted();
  const oracle::Vec p = vec({0.3, -0.4, 0.6});
  const MapGeometry geo(f, as_span(p));
  const VectorField x{{parse("1 + x2", 3), parse("x3^2", 3), parse("sin(x1)", 3)}};
  const VectorField y{{parse("x1*x3", 3), parse("1", 3), parse("cos(x2)", 3)}};
  const SFFValue v = sff_at(f, x, y, as_span(p));
  EXPECT_LE((v.total - geo.sff(x.at(as_span(p)), y.at(as_span(p)))).norm(), 1e-12);
  EXPECT_LE((v.range_part + v.perp_part - v.total).norm(), 1e-12);
}

TEST(ONeill, WarpedFibersAreUmbilic) {
  const double c = 0.4;
  const SmoothMap f = make_map(warped(c), flat(2), {"x1", "x2"});
  const oracle::Vec p = vec({0.5, 0.1, -0.2, 0.3});
  SplitOptions opt;
  opt.allow_full_rank = true;
  const MapGeometry geo(f, as_span(p), opt);
  const Vec u = vec({0, 0, 1, 0});
  const Vec t = geo.oneill_t(u, u);
  EXPECT_NEAR(t(0), -c * std::exp(2 * c * 0.5), 1e-12);
  EXPECT_NEAR(t.tail(3).norm(), 0.0, 1e-12);
  const ONeillAtPoint o = oneill_at(geo);
  EXPECT_LE(o.decomposition_residual, 1e-12);
  EXPECT_LE(o.t_symmetry_residual, 1e-12);
  // Horizontal distribution of a product projection is integrable.
  EXPECT_LE(geo.vertical_bracket(vec({1, 0, 0, 0}), vec({0, 1, 0, 0})).norm(), 1e-12);
  EXPECT_NEAR(norm(geo.gn(), tension_at(geo).tension), 2 * c, 1e-12);
}

TEST(ConformalIdentity, HoldsOnCurvedFibers) {
  const SmoothMap f = make_map(flat(4), flat(2),
                               {"exp(x4)*cos(sqrt(x1^2 + x2^2 + x3^2))", "exp(x4)*sin(sqrt(x1^2 + x2^2 + x3^2))"});
  SplitOptions opt;
  opt.allow_full_rank = true;
  const oracle::Vec p = vec({0.4, 0.5, 0.6, -0.3});
  const MapGeometry geo(f, as_span(p), opt);
  const DilationField lam(f, parse("exp(x4)", 4), opt);
  const ScalarJet log_lam = DilationField::log_of(lam.jet(as_span(p)));
  const Mat& hb = geo.split().horizontal_basis;
  for (int a = 0; a < hb.cols(); ++a)
    for (int b = 0; b < hb.cols(); ++b)
      EXPECT_LE(sff_conformal_identity_at(geo, hb.col(a), hb.col(b), log_lam), 1e-10);
  const ScalarJet numeric = lam.numeric_jet(as_span(p));
  EXPECT_LE((numeric.gradient - lam.jet(as_span(p)).gradient).norm(), 1e-7);
}

TEST(ShapeOperator, DualToPerpendicularSff) {
  const SmoothMap f = make_map(flat(3), flat(4),
                               {"exp(x1)*cos(x2)", "exp(x1)*sin(x2)", "exp(2*x1)*cos(2*x2)/2", "exp(2*x1)*sin(2*x2)/2"});
  const oracle::Vec p = vec({0.1, 0.7, -0.5});
  const MapGeometry geo(f, as_span(p));
  const Mat& perp = geo.split().range_perp_basis;
  const Mat& hb = geo.split().horizontal_basis;
  ASSERT_EQ(perp.cols(), 2);
  for (int q = 0; q < perp.cols(); ++q)
    for (int a = 0; a < hb.cols(); ++a) EXPECT_LE(s_operator_at(geo, perp.col(q), hb.col(a)).duality_residual, 1e-12);
}
