#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slantgeo/linalg.hpp"
#include "support/oracles.hpp"

using namespace slantgeo;

TEST(SvdSplit, RankAndSubspaces) {
  Mat a(2, 4);
  a << 1, 0, 2, 0, 0, 0, 0, 3;
  const SvdSplit s = svd_split(a);
  EXPECT_EQ(s.rank, 2);
  EXPECT_EQ(s.null_space.cols(), 2);
  EXPECT_LE((a * s.null_space).norm(), 1e-14);
  EXPECT_LE((s.row_space.transpose() * s.null_space).norm(), 1e-14);
}

TEST(SvdSplit, ThresholdIsRelative) {
  Mat a = Mat::Identity(3, 3) * 1e6;
  a(2, 2) = 1e-4;
  EXPECT_EQ(svd_split(a).rank, 2);
  EXPECT_EQ(svd_split(a, 1e-12).rank, 3);
}

TEST(Orthonormalize, ProducesMetricOrthonormalColumns) {
  std::mt19937_64 rng(3);
  const auto hp = oracle::random_hermitian(rng, 4);
  Mat cand = Mat::Random(4, 3);
  cand.col(2) = cand.col(0) + 2 * cand.col(1);
  const Mat q = metric_orthonormalize(cand, hp.g);
  ASSERT_EQ(q.cols(), 2);
  EXPECT_LE((q.transpose() * hp.g * q - Mat::Identity(2, 2)).norm(), 1e-13);
}

TEST(Orthonormalize, RespectsTheAgainstSpace) {
  const Mat g = Mat::Identity(3, 3);
  Mat against(3, 1);
  against << 1, 0, 0;
  Mat cand(3, 2);
  cand << 1, 1, 1, 0, 0, 1;
  const Mat q = metric_orthonormalize(cand, g, 1e-8, against);
  ASSERT_EQ(q.cols(), 2);
  EXPECT_LE((against.transpose() * q).norm(), 1e-14);
}

TEST(Projector, IsIdempotentAndSelfAdjoint) {
  std::mt19937_64 rng(5);
  const auto hp = oracle::random_hermitian(rng, 4);
  const Mat basis = metric_orthonormalize(Mat::Random(4, 2), hp.g);
  const Mat p = projector(hp.g, basis);
  EXPECT_LE((p * p - p).norm(), 1e-13);
  EXPECT_LE((hp.g * p - (hp.g * p).transpose()).norm(), 1e-13);
}

TEST(PrincipalAngle, KnownAngle) {
  const Mat g = Mat::Identity(3, 3);
  Mat a(3, 1), b(3, 1);
  a << 1, 0, 0;
  b << std::cos(0.3), std::sin(0.3), 0;
  EXPECT_NEAR(max_principal_angle(g, a, b), 0.3, 1e-14);
  EXPECT_NEAR(max_principal_angle(g, a, a * 5.0), 0.0, 1e-7);
}
