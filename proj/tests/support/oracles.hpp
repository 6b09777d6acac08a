#pragma once
// Independent finite-difference oracles and random inputs shared by the
// unit tests and the acceptance runner.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <string>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Scalar = std::function<double(const Vec&)>;

// Random smooth expression in x1..x{dim}, finite and well-conditioned on [-1, 1]^dim.
inline std::string random_expression(std::mt19937_64& rng, int dim, int depth) {
  std::uniform_int_distribution<int> pick(0, 99);
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  auto leaf = [&]() -> std::string {
    if (pick(rng) < 70) return "x" + std::to_string(1 + pick(rng) % dim);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", coef(rng));
    return buf;
  };
  if (depth == 0) return leaf();
  const std::string a = random_expression(rng, dim, depth - 1);
  const std::string b = random_expression(rng, dim, depth - 1);
  switch (pick(rng) % 12) {
    case 0: return "(" + a + " + " + b + ")";
    case 1: return "(" + a + " - " + b + ")";
    case 2: return "(" + a + ")*(" + b + ")";
    case 3: return "(" + a + ")/(2 + cos(" + b + "))";
    case 4: return "sin(" + a + ")";
    case 5: return "cos(" + a + ")";
    case 6: return "exp(sin(" + a + "))";
    case 7: return "ln(1.5 + sin(" + a + "))";
    case 8: return "sqrt(2 + cos(" + a + "))";
    case 9: return "(" + a + ")^2";
    case 10: return "sinh(sin(" + a + "))*cosh(cos(" + b + "))";
    default: return "(1.2 + sin(" + a + "))^(0.5 + 0.25*cos(" + b + "))";
  }
}

// Central differences with one Richardson step.
inline Vec fd_gradient(const Scalar& f, const Vec& x, double h = 1e-3) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    auto d = [&](double s) {
      Vec p = x, m = x;
      p(i) += s;
      m(i) -= s;
      return (f(p) - f(m)) / (2 * s);
    };
    g(i) = (4 * d(h / 2) - d(h)) / 3;
  }
  return g;
}

inline Mat fd_hessian(const Scalar& f, const Vec& x, double h = 1e-3) {
  const int n = static_cast<int>(x.size());
  Mat hess(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto d = [&](double s) {
        auto at = [&](double a, double b) {
          Vec p = x;
          p(i) += a;
          p(j) += b;
          return f(p);
        };
        return (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4 * s * s);
      };
      hess(i, j) = (4 * d(h / 2) - d(h)) / 3;
    }
  }
  return hess;
}

// Partial derivative of a matrix-valued function along coordinate k.
inline Mat fd_matrix(const std::function<Mat(const Vec&)>& f, const Vec& x, int k, double h = 1e-4) {
  auto d = [&](double s) {
    Vec p = x, m = x;
    p(k) += s;
    m(k) -= s;
    return Mat((f(p) - f(m)) / (2 * s));
  };
  return (4 * d(h / 2) - d(h)) / 3;
}

inline double rel_error(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

// Metric g = B^T B (B = A^{-1}) with compatible J = A J0 A^{-1}, J0 the standard structure.
struct HermitianPair {
  Mat g;
  Mat j;
};

inline HermitianPair random_hermitian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  Mat gauss(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) gauss(i, k) = nd(rng);
  // Random rotation times a bounded stretch keeps cond(g) <= 16.
  const Mat q = Eigen::HouseholderQR<Mat>(gauss).householderQ();
  Vec d(n);
  for (int i = 0; i < n; ++i) d(i) = scale(rng);
  const Mat a = q * d.asDiagonal();
  Mat j0 = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; i += 2) {
    j0(i + 1, i) = 1.0;
    j0(i, i + 1) = -1.0;
  }
  const Mat ainv = a.inverse();
  return {ainv.transpose() * ainv, a * j0 * ainv};
}

}  // namespace oracle
