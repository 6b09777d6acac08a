#include "slantgeo/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace slantgeo {

Mat metric_orthonormalize(const Mat& candidates, const Mat& g, double rel_tol, const Mat& against) {
  const int n = static_cast<int>(candidates.rows());
  std::vector<Vec> accepted;
  auto remove = [&](Vec& v, const Mat& basis) {
    for (int k = 0; k < basis.cols(); ++k) v -= inner(g, basis.col(k), v) * basis.col(k);
  };
  for (int c = 0; c < candidates.cols(); ++c) {
    Vec v = candidates.col(c);
    const double original = norm(g, v);
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (against.cols() > 0) remove(v, against);
      for (const Vec& q : accepted) v -= inner(g, q, v) * q;
    }
    const double remaining = norm(g, v);
    if (remaining <= rel_tol * original) continue;
    accepted.push_back(v / remaining);
  }
  Mat out(n, static_cast<int>(accepted.size()));
  for (std::size_t k = 0; k < accepted.size(); ++k) out.col(static_cast<int>(k)) = accepted[k];
  return out;
}

SvdSplit svd_split(const Mat& a, double rel_threshold) {
  SvdSplit s;
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  s.singular_values = svd.singularValues();
  const double smax = s.singular_values.size() > 0 ? s.singular_values(0) : 0.0;
  int rank = 0;
  if (smax > 0.0) {
    for (int k = 0; k < s.singular_values.size(); ++k) {
      if (s.singular_values(k) > rel_threshold * smax) ++rank;
    }
  }
  s.rank = rank;
  s.row_space = svd.matrixV().leftCols(rank);
  s.null_space = svd.matrixV().rightCols(cols - rank);
  s.column_space = svd.matrixU().leftCols(rank);
  s.left_null = svd.matrixU().rightCols(rows - rank);
  return s;
}

double max_principal_angle(const Mat& g, const Mat& a, const Mat& b) {
  if (a.cols() == 0 && b.cols() == 0) return 0.0;
  const Mat qa = metric_orthonormalize(a, g, 1e-12);
  const Mat qb = metric_orthonormalize(b, g, 1e-12);
  if (qa.cols() != qb.cols()) return M_PI / 2;
  // Largest angle: residual of projecting each basis vector of a onto b,
  // measured through the smallest singular value of the cross-Gram matrix.
  // asin of the residual norm is better conditioned than acos near zero.
  double worst = 0.0;
  Eigen::JacobiSVD<Mat> svd(qa.transpose() * g * qb, Eigen::ComputeFullU);
  const Mat u = svd.matrixU();
  for (int k = 0; k < u.cols(); ++k) {
    const Vec x = qa * u.col(k);
    const Vec r = x - project(g, qb, x);
    worst = std::max(worst, std::asin(std::min(1.0, norm(g, r))));
  }
  return worst;
}

}  // namespace slantgeo
