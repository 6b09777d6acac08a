#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slantgeo/errors.hpp"
#include "slantgeo/expr.hpp"
#include "support/oracles.hpp"

using namespace slantgeo;

namespace {

double at(const std::string& text, std::vector<double> p, const ParamMap& params = {}, const BindingMap& b = {}) {
  return parse(text, static_cast<int>(p.size()), params, b).eval(p);
}

}  // namespace

TEST(Parser, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(at("1 + 2*3", {0}), 7.0);
  EXPECT_DOUBLE_EQ(at("2^3^2", {0}), 512.0);
  EXPECT_DOUBLE_EQ(at("-x1^2", {3}), -9.0);
  EXPECT_DOUBLE_EQ(at("(x1 - 1)/(x1 + 1)", {3}), 0.5);
  EXPECT_DOUBLE_EQ(at("8/4/2", {0}), 1.0);
  EXPECT_DOUBLE_EQ(at("2*-x1", {3}), -6.0);
}

TEST(Parser, FunctionsConstantsAndParameters) {
  EXPECT_NEAR(at("sin(pi/2) + cos(0) + exp(0) + ln(1) + sqrt(4)", {0}), 5.0, 1e-15);
  EXPECT_NEAR(at("cosh(x1)^2 - sinh(x1)^2", {0.7}), 1.0, 1e-14);
  EXPECT_NEAR(at("tan(x1)", {0.3}), std::tan(0.3), 1e-15);
  EXPECT_DOUBLE_EQ(at("a*x2 + b", {1, 2}, {{"a", 3.0}, {"b", 0.5}}), 6.5);
  EXPECT_NEAR(at("pi^a", {0}, {{"a", 0.3}}), std::pow(std::numbers::pi, 0.3), 1e-15);
  EXPECT_DOUBLE_EQ(at("pi", {0}, {{"pi", 3.0}}), 3.0);
}

TEST(Parser, BindingsAreExpandedInTheChart) {
  EXPECT_NEAR(at("cos(t)", {0.4, 1.0}, {}, {{"t", "x1*x2"}}), std::cos(0.4), 1e-15);
  EXPECT_THROW(parse("t", 1, {}, {{"t", "t + 1"}}), ParseError);
}

TEST(Parser, ErrorsCarryOffsets) {
  try {
    parse("x1 + * 2", 1);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
  EXPECT_THROW(parse("x3", 2), ParseError);
  EXPECT_THROW(parse("x0", 2), ParseError);
  EXPECT_THROW(parse("foo(x1)", 1), ParseError);
  EXPECT_THROW(parse("y", 1), ParseError);
  EXPECT_THROW(parse("(x1", 1), ParseError);
  EXPECT_THROW(parse("", 1), ParseError);
  EXPECT_THROW(parse("1.2.3", 1), ParseError);
}

TEST(Evaluation, DomainErrorsNameTheSubexpression) {
  const ScalarExpr e = parse("1 + ln(x1 - 1)", 1);
  const std::vector<double> p{0.5};
  try {
    e.eval(p);
    FAIL();
  } catch (const DomainError& err) {
    EXPECT_NE(err.subexpression().find("ln"), std::string::npos);
  }
  EXPECT_THROW(parse("1/x1", 1).eval(std::vector<double>{0.0}), DomainError);
  EXPECT_THROW(parse("sqrt(x1)", 1).eval(std::vector<double>{-1.0}), DomainError);
}

TEST(Evaluation, ToStringRoundTrips) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const std::string text = oracle::random_expression(rng, 3, 3);
    const ScalarExpr e = parse(text, 3);
    const ScalarExpr back = parse(e.to_string(), 3);
    const std::vector<double> p{0.3, -0.2, 0.7};
    EXPECT_DOUBLE_EQ(e.eval(p), back.eval(p)) << text;
  }
}

TEST(Jet2, MatchesKnownDerivatives) {
  const ScalarExpr e = parse("x1^2*x2 + exp(x2)", 2);
  const std::vector<double> p{1.5, 0.5};
  const Jet2 j = e.eval_jet2(p);
  EXPECT_NEAR(j.value, 2.25 * 0.5 + std::exp(0.5), 1e-14);
  EXPECT_NEAR(j.gradient(0), 2 * 1.5 * 0.5, 1e-14);
  EXPECT_NEAR(j.gradient(1), 2.25 + std::exp(0.5), 1e-14);
  EXPECT_NEAR(j.hessian(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(j.hessian(0, 1), 3.0, 1e-14);
  EXPECT_NEAR(j.hessian(1, 1), std::exp(0.5), 1e-14);
}

TEST(Jet2, PowerWithVariableExponent) {
  const ScalarExpr e = parse("x1^x2", 2);
  const std::vector<double> p{1.7, 0.6};
  const Jet2 j = e.eval_jet2(p);
  const double v = std::pow(1.7, 0.6);
  EXPECT_NEAR(j.gradient(0), 0.6 * std::pow(1.7, -0.4), 1e-14);
  EXPECT_NEAR(j.gradient(1), v * std::log(1.7), 1e-14);
  EXPECT_NEAR(j.hessian(0, 1), std::pow(1.7, -0.4) * (1 + 0.6 * std::log(1.7)), 1e-13);
}

TEST(Jet2, AgreesWithFiniteDifferencesOnRandomExpressions) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int c = 0; c < 200; ++c) {
    const std::string text = oracle::random_expression(rng, 3, 3);
    const ScalarExpr e = parse(text, 3);
    oracle::Vec x(3);
    for (int i = 0; i < 3; ++i) x(i) = u(rng);
    const Jet2 j = e.eval_jet2(std::span<const double>(x.data(), 3));
    auto f = [&](const oracle::Vec& y) { return e.eval(std::span<const double>(y.data(), 3)); };
    EXPECT_NEAR(j.value, f(x), 1e-14 * std::max(1.0, std::fabs(j.value))) << text;
    EXPECT_LE(oracle::rel_error(j.gradient, oracle::fd_gradient(f, x)), 1e-6) << text;
    EXPECT_LE(oracle::rel_error(j.hessian, oracle::fd_hessian(f, x)), 1e-6) << text;
  }
}
