#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "skgibbs/numeric.hpp"
#include "skgibbs/quadrature.hpp"

using namespace skgibbs;

TEST(HermiteRule, OrderOneIsTheOrigin) {
    const auto r = hermite_rule(1);
    ASSERT_EQ(r.order(), 1);
    EXPECT_EQ(r.nodes()[0], 0.0);
    EXPECT_EQ(r.weights()[0], 1.0);
}

TEST(HermiteRule, OrderTwoIsPlusMinusOne) {
    const auto r = hermite_rule(2);
    EXPECT_NEAR(r.nodes()[0], -1.0, 1e-15);
    EXPECT_NEAR(r.nodes()[1], 1.0, 1e-15);
    EXPECT_NEAR(r.weights()[0], 0.5, 1e-15);
    EXPECT_NEAR(r.weights()[1], 0.5, 1e-15);
}

TEST(HermiteRule, Order61Moments) {
    const auto r = hermite_rule(61);
    double sum = 0.0;
    for (double w : r.weights()) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(gauss_expect([](double g) { return g * g * g * g; }, r), 3.0, 1e-10);
}

TEST(HermiteRule, ExactForPolynomialsUpToDegree2nMinus1) {
    // E g^(2k) = (2k-1)!!
    for (int order : {5, 20, 61, 121}) {
        const auto r = hermite_rule(order);
        double dfact = 1.0;
        for (int k = 1; 2 * k <= 2 * order - 1 && k <= 10; ++k) {
            dfact *= 2 * k - 1;
            const double got = gauss_expect([k](double g) { return std::pow(g, 2 * k); }, r);
            EXPECT_NEAR(got / dfact, 1.0, 1e-11) << "order " << order << " moment " << 2 * k;
        }
    }
}

TEST(HermiteRule, NodesSortedAndSymmetric) {
    const auto r = hermite_rule(60);
    const auto x = r.nodes();
    const auto w = r.weights();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) EXPECT_LT(x[i], x[i + 1]);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_EQ(x[i], -x[x.size() - 1 - i]);
        EXPECT_EQ(w[i], w[x.size() - 1 - i]);
        EXPECT_GT(w[i], 0.0);
    }
}

TEST(HermiteRule, LogWeightsMatch) {
    const auto r = hermite_rule(241);
    for (std::size_t i = 0; i < r.weights().size(); ++i) {
        if (r.weights()[i] > 1e-300) {
            EXPECT_NEAR(std::exp(r.log_weights()[i]), r.weights()[i], 1e-12 * r.weights()[i]);
        }
    }
}

TEST(HermiteRule, RejectsOrdersOutOfRange) {
    EXPECT_THROW(hermite_rule(0), std::invalid_argument);
    EXPECT_THROW(hermite_rule(-3), std::invalid_argument);
    EXPECT_THROW(hermite_rule(kMaxHermiteOrder + 1), std::invalid_argument);
    EXPECT_NO_THROW(hermite_rule(kMaxHermiteOrder));
}

TEST(GaussExpect, Examples) {
    const auto r = hermite_rule(61);
    EXPECT_NEAR(gauss_expect([](double) { return 1.0; }, r), 1.0, 1e-13);
    EXPECT_NEAR(gauss_expect([](double g) { return g * g; }, r), 1.0, 1e-12);
    EXPECT_NEAR(gauss_expect([](double g) { return g * g * g * g; }, r), 3.0, 1e-11);
}

TEST(GaussExpect, Linearity) {
    const auto r = hermite_rule(61);
    auto f = [](double g) { return std::log(std::cosh(0.3 + 1.1 * g)); };
    auto g2 = [](double g) { return std::tanh(0.2 + 0.7 * g) * std::tanh(0.2 + 0.7 * g); };
    const double a = 1.7, b = -0.4;
    const double lhs = gauss_expect([&](double x) { return a * f(x) + b * g2(x); }, r);
    const double rhs = a * gauss_expect(f, r) + b * gauss_expect(g2, r);
    EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(GaussExpect, OddFunctionsVanish) {
    const auto r = hermite_rule(61);
    EXPECT_LT(std::fabs(gauss_expect([](double g) { return std::tanh(1.3 * g); }, r)), 1e-12);
    EXPECT_LT(std::fabs(gauss_expect([](double g) { return g * g * g; }, r)), 1e-12);
    EXPECT_LT(std::fabs(gauss_expect([](double g) { return std::sinh(0.5 * g); }, r)), 1e-12);
}

TEST(GaussExpect, ConvergenceInOrder) {
    auto f = [](double g) { return std::log(std::cosh(0.2 + 0.9 * g)); };
    auto value = [&](int n) { return gauss_expect(f, hermite_rule(n)); };
    const double d31 = std::fabs(value(31) - value(62));
    const double d61 = std::fabs(value(61) - value(122));
    const double d121 = std::fabs(value(121) - value(242));
    EXPECT_GE(d31, d61);
    EXPECT_GE(d61, d121);
    EXPECT_LT(std::fabs(value(61) - value(121)), 1e-10);
}

TEST(GaussExpect, AgreesWithAdaptiveOracle) {
    auto f = [](double g) { return std::log(std::cosh(0.2 + 0.9 * g)); };
    EXPECT_NEAR(gauss_expect(f, hermite_rule(121)), oracle::gauss(f), 1e-11);
}

TEST(GaussExpect, NonFiniteIntegrandNamesTheNode) {
    const auto r = hermite_rule(7);
    try {
        gauss_expect([](double g) { return g > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0; }, r);
        FAIL() << "expected NumericDomainError";
    } catch (const NumericDomainError& e) {
        EXPECT_GT(r.nodes()[e.index()], 0.5);
        EXPECT_EQ(e.node(), r.nodes()[e.index()]);
    }
}

TEST(GaussExpect, LogSpaceExpectation) {
    const auto r = hermite_rule(61);
    // log E exp(c g) = c^2/2
    EXPECT_NEAR(log_gauss_expect_exp([](double g) { return 0.8 * g; }, r), 0.32, 1e-12);
    // Survives values that overflow in linear space.
    EXPECT_NEAR(log_gauss_expect_exp([](double g) { return 900.0 + 0.8 * g; }, r), 900.32, 1e-10);
}

TEST(GaussExpect, NestedMatchesProduct) {
    const auto r = hermite_rule(41);
    const double v = gauss_expect2([](double a, double b) { return a * a * b * b + a; }, r, r);
    EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Numeric, LogCoshIsStable) {
    for (double x : {0.0, 1e-8, 0.3, -2.5, 20.0, -40.0}) EXPECT_NEAR(log_cosh(x), oracle::log_cosh_naive(x), 1e-14);
    EXPECT_NEAR(log_cosh(1000.0), 1000.0 - kLog2, 1e-12);
    EXPECT_NEAR(log_cosh(-1000.0), 1000.0 - kLog2, 1e-12);
}

TEST(Numeric, LogSumExp) {
    const std::vector<double> v{1000.0, 1000.0, 1000.0};
    EXPECT_NEAR(log_sum_exp(v), 1000.0 + std::log(3.0), 1e-12);
    LogSumExp acc;
    for (double x : {-1.0, 0.0, 2.0}) acc.add(x);
    EXPECT_NEAR(acc.value(), std::log(std::exp(-1.0) + 1.0 + std::exp(2.0)), 1e-14);
}

TEST(DefaultQuadOrder, EnvironmentOverride) {
    ::setenv("SKGIBBS_QUAD_ORDER", "81", 1);
    EXPECT_EQ(default_quad_order(), 81);
    ::setenv("SKGIBBS_QUAD_ORDER", "garbage", 1);
    EXPECT_EQ(default_quad_order(), kDefaultQuadOrder);
    ::unsetenv("SKGIBBS_QUAD_ORDER");
    EXPECT_EQ(default_quad_order(), kDefaultQuadOrder);
}
