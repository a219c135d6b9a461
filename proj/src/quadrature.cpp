#include "miscible/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace miscible {

namespace {

constexpr int kMaxDegree = 30;

TriangleRule centroid_rule()
{
    return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}, 1};
}

TriangleRule three_point_rule()
{
    return {{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}},
            {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
            2};
}

// Radon's 7-point rule, exact through degree 5.
TriangleRule seven_point_rule()
{
    const double s = std::sqrt(15.0);
    const double a1 = (6.0 - s) / 21.0;
    const double a2 = (6.0 + s) / 21.0;
    const double w1 = (155.0 - s) / 1200.0;
    const double w2 = (155.0 + s) / 1200.0;
    TriangleRule rule;
    rule.degree = 5;
    rule.barycentric = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                        {a1, a1, 1.0 - 2.0 * a1},
                        {a1, 1.0 - 2.0 * a1, a1},
                        {1.0 - 2.0 * a1, a1, a1},
                        {a2, a2, 1.0 - 2.0 * a2},
                        {a2, 1.0 - 2.0 * a2, a2},
                        {1.0 - 2.0 * a2, a2, a2}};
    rule.weights = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
    return rule;
}

// Duffy-collapsed tensor Gauss rule: xi = u, eta = (1 - u) v.
TriangleRule collapsed_rule(int degree)
{
    const int n = (degree + 3) / 2;
    const LineRule g = gauss_legendre(n);
    TriangleRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = g.points[i];
            const double v = g.points[j];
            const double xi = u;
            const double eta = (1.0 - u) * v;
            rule.barycentric.push_back({1.0 - xi - eta, xi, eta});
            rule.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - u));
        }
    }
    return rule;
}

std::vector<TriangleRule> build_rules()
{
    std::vector<TriangleRule> rules;
    rules.reserve(kMaxDegree + 1);
    for (int d = 0; d <= kMaxDegree; ++d) {
        if (d <= 1) {
            rules.push_back(centroid_rule());
        } else if (d == 2) {
            rules.push_back(three_point_rule());
        } else if (d <= 5) {
            rules.push_back(seven_point_rule());
        } else {
            rules.push_back(collapsed_rule(d));
        }
    }
    return rules;
}

}  // namespace

const TriangleRule& triangle_rule(int degree)
{
    static const std::vector<TriangleRule> rules = build_rules();
    if (degree < 0 || degree > kMaxDegree) {
        throw std::invalid_argument("quadrature degree must lie in [0, " + std::to_string(kMaxDegree) +
                                    "], got " + std::to_string(degree));
    }
    return rules[degree];
}

LineRule gauss_legendre(int n_points)
{
    if (n_points < 1) {
        throw std::invalid_argument("Gauss-Legendre rule needs at least one point");
    }
    LineRule rule;
    rule.degree = 2 * n_points - 1;
    rule.points.resize(n_points);
    rule.weights.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n_points + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n_points; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n_points == 1 ? x : p1;
            const double pm = n_points == 1 ? 1.0 : p0;
            dp = n_points * (x * pn - pm) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Map [-1, 1] to [0, 1]; ascending order.
        rule.points[n_points - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n_points - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const LineRule& edge_rule()
{
    static const LineRule rule = gauss_legendre(3);
    return rule;
}

}  // namespace miscible
