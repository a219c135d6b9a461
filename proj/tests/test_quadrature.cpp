#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "miscible/quadrature.hpp"

using namespace miscible;

namespace {

double factorial(int n)
{
    return n <= 1 ? 1.0 : n * factorial(n - 1);
}

// Integral of x^a y^b over the triangle (0,0), (1,0), (0,1).
double monomial_exact(int a, int b)
{
    return factorial(a) * factorial(b) / factorial(a + b + 2);
}

double monomial_rule(const TriangleRule& rule, int a, int b)
{
    const std::array<Vec2, 3> ref{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}};
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2 x = rule.point(q, ref);
        sum += rule.weights[q] * std::pow(x.x, a) * std::pow(x.y, b);
    }
    return 0.5 * sum;
}

}  // namespace

TEST(Quadrature, DegreeFiveSevenPointRuleIsExact)
{
    const auto& rule = triangle_rule(5);
    EXPECT_EQ(rule.size(), 7u);
    for (int a = 0; a <= 5; ++a) {
        for (int b = 0; a + b <= 5; ++b) {
            EXPECT_NEAR(monomial_rule(rule, a, b), monomial_exact(a, b), 1e-16) << a << "," << b;
        }
    }
}

TEST(Quadrature, WeightsSumToOneAndPointsInside)
{
    for (int d = 1; d <= 30; ++d) {
        const auto& rule = triangle_rule(d);
        EXPECT_GE(rule.degree, d);
        EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 1.0, 1e-14);
        for (const auto& b : rule.barycentric) {
            EXPECT_NEAR(b[0] + b[1] + b[2], 1.0, 1e-14);
            for (double l : b) {
                EXPECT_GE(l, -1e-15);
            }
        }
    }
}

TEST(Quadrature, EveryDegreeIntegratesItsMonomials)
{
    for (int d : {1, 2, 3, 4, 6, 8, 10, 14, 20}) {
        const auto& rule = triangle_rule(d);
        for (int a = 0; a <= d; ++a) {
            for (int b = 0; a + b <= d; ++b) {
                const double want = monomial_exact(a, b);
                EXPECT_NEAR(monomial_rule(rule, a, b), want, 1e-14 * std::max(1.0, want)) << d << ":" << a << "," << b;
            }
        }
    }
}

TEST(Quadrature, DegreeFiveRuleMissesDegreeSix)
{
    const auto& rule = triangle_rule(5);
    double worst = 0.0;
    for (int a = 0; a <= 6; ++a) {
        worst = std::max(worst, std::abs(monomial_rule(rule, a, 6 - a) - monomial_exact(a, 6 - a)));
    }
    EXPECT_GT(worst, 1e-8);
}

TEST(Quadrature, GaussLegendreOnUnitInterval)
{
    for (int n = 1; n <= 8; ++n) {
        const LineRule rule = gauss_legendre(n);
        ASSERT_EQ(rule.size(), static_cast<std::size_t>(n));
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double sum = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                EXPECT_GT(rule.points[q], 0.0);
                EXPECT_LT(rule.points[q], 1.0);
                sum += rule.weights[q] * std::pow(rule.points[q], k);
            }
            EXPECT_NEAR(sum, 1.0 / (k + 1), 1e-14) << n << " points, x^" << k;
        }
    }
    EXPECT_EQ(edge_rule().size(), 3u);
    EXPECT_THROW((void)gauss_legendre(0), std::invalid_argument);
}

TEST(Quadrature, RejectsDegreeOutOfRange)
{
    EXPECT_THROW((void)triangle_rule(-1), std::invalid_argument);
    EXPECT_THROW((void)triangle_rule(31), std::invalid_argument);
}
