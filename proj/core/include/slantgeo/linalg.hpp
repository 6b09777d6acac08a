#pragma once

#include <vector>

#include <Eigen/Dense>

namespace slantgeo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense rank-3 array, indexed (a, i, j). Used for Christoffel symbols
// Gamma^a_ij and second fundamental form tables.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2) : d0_(d0), d1_(d1), d2_(d2), data_(static_cast<std::size_t>(d0 * d1 * d2), 0.0) {}

  double& operator()(int a, int i, int j) { return data_[idx(a, i, j)]; }
  double operator()(int a, int i, int j) const { return data_[idx(a, i, j)]; }
  int dim(int k) const { return k == 0 ? d0_ : (k == 1 ? d1_ : d2_); }

  // Vector with components T(a, x, y) = sum_ij T(a,i,j) x^i y^j.
  Vec contract(const Vec& x, const Vec& y) const {
    Vec r = Vec::Zero(d0_);
    for (int a = 0; a < d0_; ++a) {
      double s = 0.0;
      for (int i = 0; i < d1_; ++i) {
        for (int j = 0; j < d2_; ++j) s += (*this)(a, i, j) * x(i) * y(j);
      }
      r(a) = s;
    }
    return r;
  }

 private:
  std::size_t idx(int a, int i, int j) const { return static_cast<std::size_t>((a * d1_ + i) * d2_ + j); }
  int d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<double> data_;
};

// Dense rank-4 array with equal extents.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), 0.0) {}

  double& operator()(int a, int b, int c, int d) { return data_[idx(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return data_[idx(a, b, c, d)]; }
  int dim() const { return n_; }

 private:
  std::size_t idx(int a, int b, int c, int d) const {
    return static_cast<std::size_t>(((a * n_ + b) * n_ + c) * n_ + d);
  }
  int n_ = 0;
  std::vector<double> data_;
};

inline double inner(const Mat& g, const Vec& x, const Vec& y) { return x.dot(g * y); }
inline double norm(const Mat& g, const Vec& x) { return std::sqrt(std::max(0.0, inner(g, x, x))); }

// Modified Gram-Schmidt with one re-orthogonalization pass in the inner
// product `g`. Candidates whose remaining norm falls below `rel_tol` times
// their original norm are dropped. Returns orthonormal columns.
Mat metric_orthonormalize(const Mat& candidates, const Mat& g, double rel_tol = 1e-8,
                          const Mat& against = Mat());

// g-orthogonal projection of x onto span of g-orthonormal columns `basis`.
inline Vec project(const Mat& g, const Mat& basis, const Vec& x) {
  if (basis.cols() == 0) return Vec::Zero(x.size());
  return basis * (basis.transpose() * (g * x));
}

// g-orthogonal projector matrix onto span of g-orthonormal `basis`.
inline Mat projector(const Mat& g, const Mat& basis) {
  if (basis.cols() == 0) return Mat::Zero(g.rows(), g.rows());
  return basis * basis.transpose() * g;
}

struct SvdSplit {
  int rank = 0;
  Vec singular_values;
  Mat row_space;     // right singular vectors with sigma above threshold (Euclidean orthonormal)
  Mat null_space;    // right singular vectors with sigma below threshold
  Mat column_space;  // left singular vectors with sigma above threshold
  Mat left_null;     // left singular vectors with sigma below threshold
};

// Full SVD of `a`; singular values below rel_threshold * sigma_max count as zero.
SvdSplit svd_split(const Mat& a, double rel_threshold = 1e-8);

// Largest principal angle (radians) between the subspaces spanned by the
// columns of a and b in inner product g. Both must have equal column count.
double max_principal_angle(const Mat& g, const Mat& a, const Mat& b);

}  // namespace slantgeo
