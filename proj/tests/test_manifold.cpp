#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slantgeo/errors.hpp"
#include "slantgeo/manifold.hpp"
#include "support/oracles.hpp"

using namespace slantgeo;

namespace {

ChartManifold diagonal(const std::vector<std::string>& entries, ParamMap params = {}) {
  const int n = static_cast<int>(entries.size());
  std::vector<ChartManifold::MetricEntry> m;
  for (int i = 0; i < n; ++i) m.push_back({i, i, parse(entries[static_cast<std::size_t>(i)], n, params)});
  return ChartManifold(n, m);
}

std::vector<ScalarExpr> j_t(double t) {
  const ParamMap p{{"t", t}};
  std::vector<ScalarExpr> j(16, ScalarExpr::constant(0.0, 4));
  auto set = [&](int a, int b, const char* e) { j[static_cast<std::size_t>((a - 1) * 4 + (b - 1))] = parse(e, 4, p); };
  set(1, 2, "sin(t)");
  set(1, 3, "cos(t)");
  set(2, 1, "-sin(t)");
  set(2, 4, "cos(t)");
  set(3, 1, "-cos(t)");
  set(3, 4, "-sin(t)");
  set(4, 2, "-cos(t)");
  set(4, 3, "sin(t)");
  return j;
}

}  // namespace

TEST(Christoffel, FlatChartVanishes) {
  const ChartManifold m = ChartManifold::euclidean(3);
  const std::vector<double> p{0.1, 0.2, 0.3};
  const Tensor3 g = christoffel_at(m, p);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_EQ(g(a, i, j), 0.0);
}

TEST(Christoffel, PolarCoordinates) {
  const ChartManifold m = diagonal({"1", "x1^2"});
  const std::vector<double> p{1.7, 0.4};
  const Tensor3 g = christoffel_at(m, p);
  EXPECT_NEAR(g(0, 1, 1), -1.7, 1e-14);
  EXPECT_NEAR(g(1, 0, 1), 1 / 1.7, 1e-14);
  EXPECT_NEAR(g(1, 1, 0), 1 / 1.7, 1e-14);
  EXPECT_NEAR(g(0, 0, 0), 0.0, 1e-14);
}

TEST(Christoffel, MatchesFiniteDifferenceOfTheMetric) {
  const ChartManifold m = diagonal({"1 + x2^2", "exp(x1)", "2 + sin(x1*x2)"});
  const std::vector<double> pv{0.3, -0.4, 0.2};
  const oracle::Vec x = Eigen::Map<const oracle::Vec>(pv.data(), 3);
  auto metric = [&](const oracle::Vec& y) { return m.metric_at(std::span<const double>(y.data(), 3)); };
  std::vector<Mat> dg;
  for (int k = 0; k < 3; ++k) dg.push_back(oracle::fd_matrix(metric, x, k));
  const Mat ginv = metric(x).inverse();
  const Tensor3 gamma = christoffel_at(m, pv);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int l = 0; l < 3; ++l) s += 0.5 * ginv(a, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        EXPECT_NEAR(gamma(a, i, j), s, 1e-9);
      }
}

TEST(Riemann, FlatChartsVanish) {
  const ChartManifold e = ChartManifold::euclidean(4);
  const ChartManifold polar = diagonal({"1", "x1^2"});
  for (const auto& [m, p] : {std::pair{&e, std::vector<double>{0.1, 0.2, 0.3, 0.4}},
                             std::pair{&polar, std::vector<double>{1.3, 0.2}}}) {
    const CurvatureAtPoint c = riemann_at(*m, p);
    const int n = m->dim();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) EXPECT_LE(std::fabs(c(a, b, i, j)), 1e-10);
  }
}

TEST(Riemann, RoundSphere) {
  const ChartManifold s2 = diagonal({"1", "sin(x1)^2"});
  for (double th : {0.3, 0.9, 1.4, 2.5}) {
    const std::vector<double> p{th, 0.7};
    const CurvatureAtPoint c = riemann_at(s2, p);
    EXPECT_NEAR(c(0, 1, 1, 0), std::sin(th) * std::sin(th), 1e-6);
    EXPECT_NEAR(c.classical(0, 1, 0, 1), std::sin(th) * std::sin(th), 1e-6);
    EXPECT_NEAR(c(0, 1, 0, 1), -std::sin(th) * std::sin(th), 1e-6);
    EXPECT_LE(c.symmetry_residual(), 1e-10);
    EXPECT_LE(c.bianchi_residual(), 1e-10);
  }
}

TEST(SpaceForm, AlgebraicSymmetries) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  auto rv = [&]() {
    Vec v(4);
    for (int i = 0; i < 4; ++i) v(i) = nd(rng);
    return v;
  };
  for (int draw = 0; draw < 500; ++draw) {
    const auto hp = oracle::random_hermitian(rng, 4);
    const double v = 4.0 * nd(rng);
    const Vec a = rv(), b = rv(), c = rv(), d = rv();
    auto r = [&](const Vec& y1, const Vec& y2, const Vec& y3, const Vec& y4) {
      return space_form_curvature(v, hp.g, hp.j, y1, y2, y3, y4);
    };
    const double base = r(a, b, c, d);
    EXPECT_LE(std::fabs(base + r(b, a, c, d)), 1e-10);
    EXPECT_LE(std::fabs(base + r(a, b, d, c)), 1e-10);
    EXPECT_LE(std::fabs(base - r(c, d, a, b)), 1e-10);
    EXPECT_LE(std::fabs(base + r(b, c, a, d) + r(c, a, b, d)), 1e-10);
    const double hol = r(a, Vec(hp.j * a), Vec(hp.j * a), a) / std::pow(inner(hp.g, a, a), 2);
    EXPECT_NEAR(hol, v, 1e-10 * std::max(1.0, std::fabs(v)));
  }
}

TEST(SpaceForm, FlatChartMatchesZeroCurvatureForm) {
  const ChartManifold m = ChartManifold::euclidean(4, j_t(0.7));
  const std::vector<double> p{0.2, 0.1, -0.3, 0.5};
  const CurvatureAtPoint c = riemann_at(m, p);
  const Mat eye = Mat::Identity(4, 4);
  EXPECT_EQ(space_form_curvature(0.0, m, eye.col(0), eye.col(1), eye.col(1), eye.col(0), p), 0.0);
  EXPECT_LE(std::fabs(c(0, 1, 1, 0)), 1e-10);
}

TEST(LieBracket, MatchesFiniteDifferences) {
  const VectorField x{{parse("x2*x3", 3), parse("sin(x1)", 3), parse("1", 3)}};
  const VectorField y{{parse("x1^2", 3), parse("exp(x3)", 3), parse("x1*x2", 3)}};
  const std::vector<double> pv{0.4, -0.3, 0.8};
  const oracle::Vec p = Eigen::Map<const oracle::Vec>(pv.data(), 3);
  auto field = [](const VectorField& f) {
    return [&f](const oracle::Vec& q) { return Mat(f.at(std::span<const double>(q.data(), 3))); };
  };
  oracle::Vec expected = oracle::Vec::Zero(3);
  const Vec xv = x.at(pv), yv = y.at(pv);
  for (int i = 0; i < 3; ++i) {
    expected += xv(i) * oracle::fd_matrix(field(y), p, i).col(0) - yv(i) * oracle::fd_matrix(field(x), p, i).col(0);
  }
  EXPECT_LE((lie_bracket_at(x, y, pv) - expected).norm(), 1e-9);
}

TEST(ComplexStructure, ConstantJtIsKahler) {
  const ChartManifold m = ChartManifold::euclidean(4, j_t(0.7));
  const std::vector<double> p{0.2, 0.1, -0.3, 0.5};
  const HermitianResiduals h = hermitian_kahler_residuals(m, p);
  EXPECT_LE(h.jsq, 1e-14);
  EXPECT_LE(h.compat, 1e-14);
  EXPECT_LE(h.kahler, 1e-14);
  const VectorField x{{parse("x2", 4), parse("x1*x3", 4), parse("0", 4), parse("1", 4)}};
  const VectorField y{{parse("sin(x4)", 4), parse("0", 4), parse("x1", 4), parse("x2^2", 4)}};
  EXPECT_LE(nijenhuis_at(m, x, y, p).norm(), 1e-12);
}

TEST(ComplexStructure, VariableSlantParameterIsNotParallel) {
  std::vector<ScalarExpr> j(16, ScalarExpr::constant(0.0, 4));
  const BindingMap b{{"t", "x1"}};
  auto set = [&](int a, int c, const char* e) { j[static_cast<std::size_t>((a - 1) * 4 + (c - 1))] = parse(e, 4, {}, b); };
  set(1, 2, "sin(t)");
  set(1, 3, "cos(t)");
  set(2, 1, "-sin(t)");
  set(2, 4, "cos(t)");
  set(3, 1, "-cos(t)");
  set(3, 4, "-sin(t)");
  set(4, 2, "-cos(t)");
  set(4, 3, "sin(t)");
  const ChartManifold m = ChartManifold::euclidean(4, j);
  const HermitianResiduals h = hermitian_kahler_residuals(m, std::vector<double>{0.3, 0, 0, 0});
  EXPECT_LE(h.jsq, 1e-14);
  EXPECT_GT(h.kahler, 0.1);
}

TEST(Metric, RejectsIndefiniteAndLowerTriangle) {
  EXPECT_THROW(diagonal({"1", "-1"}).metric_at(std::vector<double>{0, 0}), GeometryError);
  EXPECT_THROW(ChartManifold(2, {{1, 0, parse("0.1", 2)}}), GeometryError);
}
