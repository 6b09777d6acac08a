#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "slantgeo/errors.hpp"
#include "slantgeo/run.hpp"
#include "slantgeo/smooth_map.hpp"

using namespace slantgeo;

TEST(Split, BuiltinDomainExample) {
  const Scenario sc = load_builtin("ex3_1");
  const std::vector<double> p{0.3, -0.2, 0.5, 0.1};
  const PointSplit s = split_at(*sc.map, p);
  EXPECT_EQ(s.rank, 2);
  Mat expected = Mat::Zero(4, 2);
  expected(1, 0) = 1;
  expected(3, 1) = 1;
  EXPECT_LE(max_principal_angle(s.g_source, s.vertical_basis, expected), 1e-12);
  EXPECT_NEAR(s.lambda(), std::exp(0.3), 1e-12);
  const SlantReport sr = slant_at(*sc.map, s, Side::domain, 8);
  EXPECT_NEAR(sr.theta, 0.7, 1e-12);
  EXPECT_LE(sr.spread, 1e-12);
}

TEST(Split, BuiltinRangeExample) {
  const Scenario sc = load_builtin("ex4_1");
  const std::vector<double> p{0.3, -0.2, 0.5, 0.1, 0.9, -0.7};
  const PointSplit s = split_at(*sc.map, p);
  EXPECT_EQ(s.rank, 2);
  EXPECT_EQ(s.vertical_basis.cols(), 4);
  EXPECT_EQ(s.range_perp_basis.cols(), 2);
  const SlantReport sr = slant_at(*sc.map, s, Side::range, 8);
  EXPECT_NEAR(sr.theta, 0.7, 1e-12);
}

TEST(Split, FullRankIsDegenerateUnlessAllowed) {
  auto m = std::make_shared<ChartManifold>(ChartManifold::euclidean(2));
  const SmoothMap id(m, m, {ScalarExpr::coordinate(0, 2), ScalarExpr::coordinate(1, 2)});
  const std::vector<double> p{0.1, 0.2};
  EXPECT_THROW(split_at(id, p), DegenerateMapError);
  SplitOptions opt;
  opt.allow_full_rank = true;
  EXPECT_EQ(split_at(id, p, opt).rank, 2);
  const SmoothMap zero(m, m, {ScalarExpr::constant(1, 2), ScalarExpr::constant(2, 2)});
  EXPECT_THROW(split_at(zero, p, opt), DegenerateMapError);
}

TEST(Split, AdjointIsHorizontalPreimage) {
  const Scenario sc = load_builtin("ex3_1");
  const std::vector<double> p{0.3, -0.2, 0.5, 0.1};
  const PointSplit s = split_at(*sc.map, p);
  for (int a = 0; a < s.horizontal_basis.cols(); ++a) {
    const Vec x = s.horizontal_basis.col(a);
    const Vec fx = s.differential * x;
    EXPECT_LE((s.horizontal_lift(fx) - x).norm(), 1e-12);
    // *F* F* X = lambda^2 X for a conformal map.
    EXPECT_LE((adjoint_at(s, fx) - s.lambda_sq * x).norm(), 1e-12);
  }
}

TEST(Decomposition, RejectsNonVerticalInput) {
  const Scenario sc = load_builtin("ex3_1");
  const std::vector<double> p{0.3, -0.2, 0.5, 0.1};
  const PointSplit s = split_at(*sc.map, p);
  const Vec x = s.horizontal_basis.col(0);
  EXPECT_THROW(decompose_domain(*sc.map, s, x, x), GeometryError);
}
