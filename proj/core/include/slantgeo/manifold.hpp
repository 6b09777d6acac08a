#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slantgeo/expr.hpp"
#include "slantgeo/linalg.hpp"

namespace slantgeo {

// Metric and its first and second coordinate derivatives at a point.
struct MetricJets {
  Mat g;
  Mat g_inv;
  std::vector<Mat> dg;                // dg[k] = d_k g
  std::vector<std::vector<Mat>> d2g;  // d2g[k][l] = d_k d_l g
};

/// Coordinate chart carrying a Riemannian metric g_ij and optionally a (1,1)
/// tensor J given by components J(a, b), column b = input index, so
/// (JX)^a = J(a,b) X^b.
class ChartManifold {
 public:
  // Metric entry g_{i j} with 0-based i <= j; the lower triangle is mirrored.
  struct MetricEntry {
    int i = 0;
    int j = 0;
    ScalarExpr expr;
  };

  // Entries not listed are zero. Throws GeometryError on a lower-triangle or
  // duplicate entry, or an odd dimension when J is given.
  ChartManifold(int dim, const std::vector<MetricEntry>& upper_entries,
                std::optional<std::vector<ScalarExpr>> complex_structure = std::nullopt);

  static ChartManifold euclidean(int dim, std::optional<std::vector<ScalarExpr>> complex_structure = std::nullopt);

  int dim() const { return dim_; }
  bool has_complex_structure() const { return complex_.has_value(); }

  const ScalarExpr& metric_expr(int i, int j) const { return metric_[static_cast<std::size_t>(i * dim_ + j)]; }
  const ScalarExpr& j_expr(int a, int b) const;
  const std::vector<ScalarExpr>& j_exprs() const;

  // Positive-definite, well-conditioned metric at p or GeometryError.
  Mat metric_at(std::span<const double> p) const;
  MetricJets metric_jets(std::span<const double> p) const;

  Mat j_at(std::span<const double> p) const;
  // d_k J for each coordinate k.
  std::vector<Mat> j_derivatives(std::span<const double> p) const;

 private:
  int dim_;
  std::vector<ScalarExpr> metric_;
  std::optional<std::vector<ScalarExpr>> complex_;
};

// Throws GeometryError unless g is positive definite with condition number <= 1e12.
void check_metric(const Mat& g);

// Vector field whose components are expressions in the chart coordinates.
struct VectorField {
  std::vector<ScalarExpr> components;
  int dim() const { return static_cast<int>(components.size()); }

  static VectorField coordinate(int index, int dim);
  static VectorField constant(const Vec& v);
  Vec at(std::span<const double> p) const;
  // Jacobian d_i X^k as a matrix (row k, column i).
  Mat jacobian(std::span<const double> p) const;
};

// Expression-level application of a matrix of expressions (column = input index).
VectorField apply(const std::vector<ScalarExpr>& matrix, const VectorField& x);

// Gamma(k, i, j) = Gamma^k_ij.
Tensor3 christoffel(const MetricJets& jets);
Tensor3 christoffel_at(const ChartManifold& m, std::span<const double> p);

/// Riemann tensor at a point with convention R(X,Y)Z = nabla_X nabla_Y Z -
/// nabla_Y nabla_X Z - nabla_[X,Y] Z, stored fully lowered as
/// R(X,Y,Z,W) = g(R(X,Y)Z, W). With this convention the sectional
/// curvature of the plane {X,Y} is R(X,Y,Y,X) / (|X|^2|Y|^2 - g(X,Y)^2), and
/// the complex-space-form formula of `space_form_curvature` has the same
/// slot order. The classical index form R_abcd = g_ae R^e_bcd is
/// `classical(a,b,c,d)` = R(d_c, d_d, d_b, d_a).
struct CurvatureAtPoint {
  std::vector<double> point;
  Tensor4 riemann;

  double operator()(int i, int j, int k, int l) const { return riemann(i, j, k, l); }
  double classical(int a, int b, int c, int d) const { return riemann(c, d, b, a); }
  double evaluate(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const;

  // Max violation of antisymmetry in (1,2), (3,4) and pair exchange.
  double symmetry_residual() const;
  // Max |R(X,Y,Z,W) + R(Y,Z,X,W) + R(Z,X,Y,W)| over coordinate indices.
  double bianchi_residual() const;
};

CurvatureAtPoint riemann_at(const ChartManifold& m, std::span<const double> p);

// [X,Y]^k = X^i d_i Y^k - Y^i d_i X^k.
Vec lie_bracket_at(const VectorField& x, const VectorField& y, std::span<const double> p);

// N_J(X,Y) = [JX,JY] - [X,Y] - J[X,JY] - J[JX,Y].
Vec nijenhuis_at(const ChartManifold& m, const VectorField& x, const VectorField& y, std::span<const double> p);

struct HermitianResiduals {
  double jsq = 0.0;     // max |(J^2 + I)_ab|
  double compat = 0.0;  // max |g(JE_a, JE_b) - g(E_a, E_b)| over a g-orthonormal frame
  double kahler = 0.0;  // max |(nabla_{E_a} J) E_b|_g over the same frame
};

HermitianResiduals hermitian_kahler_residuals(const ChartManifold& m, std::span<const double> p);

// (nabla_k J) as matrices, k = coordinate direction.
std::vector<Mat> covariant_derivative_of_j(const Mat& j, const std::vector<Mat>& dj, const Tensor3& gamma);

/// Curvature of a complex space form of constant holomorphic sectional curvature v:
/// (v/4){g(Y1,Y4)g(Y2,Y3) - g(Y1,Y3)g(Y2,Y4) + g(Y1,JY3)g(JY2,Y4)
///       - g(Y2,JY3)g(JY1,Y4) + 2g(Y1,JY2)g(JY3,Y4)}.
double space_form_curvature(double v, const Mat& g, const Mat& j, const Vec& y1, const Vec& y2, const Vec& y3,
                            const Vec& y4);
double space_form_curvature(double v, const ChartManifold& m, const Vec& y1, const Vec& y2, const Vec& y3,
                            const Vec& y4, std::span<const double> p);

inline std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace slantgeo
