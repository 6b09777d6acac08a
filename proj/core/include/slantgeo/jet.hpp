#pragma once

#include <Eigen/Dense>

namespace slantgeo {

/// Second-order jet of a scalar function of n variables: value, gradient and
/// Hessian propagated together in one forward pass.
///
/// Every operation below builds the Hessian from symmetric pieces
/// (u v^T + v u^T, u u^T, sums of symmetric matrices), so `hessian` is exactly
/// symmetric in floating point without any symmetrization step.
struct Jet2 {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;

  Jet2() = default;
  Jet2(double v, Eigen::VectorXd g, Eigen::MatrixXd h)
      : value(v), gradient(std::move(g)), hessian(std::move(h)) {}

  static Jet2 constant(double v, int n) {
    return {v, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  }
  // The coordinate function x_{index} (0-based) evaluated at `v`.
  static Jet2 variable(double v, int index, int n) {
    Jet2 j = constant(v, n);
    j.gradient(index) = 1.0;
    return j;
  }

  int size() const { return static_cast<int>(gradient.size()); }
};

// Composition f(u) given f(u), f'(u), f''(u).
inline Jet2 chain(const Jet2& u, double f, double df, double d2f) {
  Jet2 r;
  r.value = f;
  r.gradient = df * u.gradient;
  r.hessian = df * u.hessian + d2f * (u.gradient * u.gradient.transpose());
  return r;
}

inline Jet2 operator-(const Jet2& a) { return {-a.value, -a.gradient, -a.hessian}; }

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.value + b.value, a.gradient + b.gradient, a.hessian + b.hessian};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.value - b.value, a.gradient - b.gradient, a.hessian - b.hessian};
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Eigen::MatrixXd cross = a.gradient * b.gradient.transpose();
  return {a.value * b.value, a.value * b.gradient + b.value * a.gradient,
          a.value * b.hessian + b.value * a.hessian + cross + cross.transpose()};
}

inline Jet2 operator*(double s, const Jet2& a) { return {s * a.value, s * a.gradient, s * a.hessian}; }

inline Jet2 operator+(double s, const Jet2& a) { return {s + a.value, a.gradient, a.hessian}; }

// 1/b; caller guarantees b.value != 0.
inline Jet2 reciprocal(const Jet2& b) {
  const double inv = 1.0 / b.value;
  return chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

}  // namespace slantgeo
