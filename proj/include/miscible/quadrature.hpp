#pragma once

#include <array>
#include <vector>

#include "miscible/geometry.hpp"

namespace miscible {

/// Quadrature rule on a triangle in barycentric form. Weights sum to one, so
/// a physical integral is area * sum(w_q f(x_q)).
struct TriangleRule {
    std::vector<std::array<double, 3>> barycentric;
    std::vector<double> weights;
    int degree = 0;

    [[nodiscard]] std::size_t size() const { return weights.size(); }

    [[nodiscard]] Vec2 point(std::size_t q, const std::array<Vec2, 3>& corners) const
    {
        const auto& b = barycentric[q];
        return b[0] * corners[0] + b[1] * corners[1] + b[2] * corners[2];
    }
};

/// Gauss rule on the unit interval [0, 1]; weights sum to one.
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
    int degree = 0;

    [[nodiscard]] std::size_t size() const { return weights.size(); }
};

/// Smallest available rule exact for polynomials of the requested degree.
/// Degrees 1, 2 and 5 use the classical 1-, 3- and 7-point rules; anything
/// above 5 falls back to a collapsed Gauss-Legendre product rule.
[[nodiscard]] const TriangleRule& triangle_rule(int degree);

/// Gauss-Legendre rule with the given number of points on [0, 1].
[[nodiscard]] LineRule gauss_legendre(int n_points);

/// Three-point Gauss rule used for all edge integrals.
[[nodiscard]] const LineRule& edge_rule();

/// Default quadrature degree for assembly, projection and error norms.
inline constexpr int kDefaultQuadratureDegree = 5;

}  // namespace miscible
