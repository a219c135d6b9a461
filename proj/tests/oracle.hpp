#pragma once

// Independent reference integration used to cross-check the library rules.

#include <array>
#include <algorithm>
#include <cmath>

#include "miscible/geometry.hpp"

namespace oracle {

// 4-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 4> kNodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                              0.8611363115940526};
inline constexpr std::array<double, 4> kWeights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                0.3478548451374538};

// 16-point collapsed (Duffy) rule over a triangle; exact to degree 6.
template <class F>
double integrate(const std::array<miscible::Vec2, 3>& v, F&& f)
{
    const double area = 0.5 * std::abs(miscible::orient(v[0], v[1], v[2]));
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double s = 0.5 * (kNodes[i] + 1.0);
        for (int j = 0; j < 4; ++j) {
            const double r = 0.5 * (kNodes[j] + 1.0);
            const double a = s;
            const double b = (1.0 - s) * r;
            const miscible::Vec2 x = v[0] + a * (v[1] - v[0]) + b * (v[2] - v[0]);
            sum += kWeights[i] * kWeights[j] * 0.25 * (1.0 - s) * f(x);
        }
    }
    return 2.0 * area * sum;
}

}  // namespace oracle

namespace oracle {

// Manufactured fields typed in afresh, differentiated only numerically.
inline double p(miscible::Vec2 x, double t)
{
    const double a = x.x * x.x * std::pow(1 - x.x, 3);
    const double b = x.y * x.y * std::pow(1 - x.y, 3);
    return 1.0 + 1000.0 * a * b * t * t * std::exp(t);
}

inline double c(miscible::Vec2 x, double t)
{
    const double a = x.x * x.x * (1 - x.x) * (1 - x.x);
    const double b = x.y * x.y * (1 - x.y) * (1 - x.y);
    return 0.1 + 50.0 * a * b * t * std::exp(t);
}

// Fourth-order central difference.
template <class F>
double d1(F&& f, double s, double h)
{
    return (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h);
}

template <class F>
miscible::Vec2 grad(F&& f, miscible::Vec2 x, double h)
{
    return {d1([&](double s) { return f(miscible::Vec2{s, x.y}); }, x.x, h),
            d1([&](double s) { return f(miscible::Vec2{x.x, s}); }, x.y, h)};
}

template <class F>
double div(F&& v, miscible::Vec2 x, double h)
{
    return d1([&](double s) { return v(miscible::Vec2{s, x.y}).x; }, x.x, h) +
           d1([&](double s) { return v(miscible::Vec2{x.x, s}).y; }, x.y, h);
}

inline miscible::Vec2 u(miscible::Vec2 x, double t, double h)
{
    const double cc = c(x, t);
    return -1.0 / (1.0 + cc * cc) * grad([&](miscible::Vec2 y) { return p(y, t); }, x, h);
}

inline double f(miscible::Vec2 x, double t, double h)
{
    return div([&](miscible::Vec2 y) { return u(y, t, h); }, x, h);
}

inline double g(miscible::Vec2 x, double t, double h)
{
    auto cg = [&](miscible::Vec2 y) { return grad([&](miscible::Vec2 z) { return c(z, t); }, y, h); };
    auto flux = [&](miscible::Vec2 y) {
        const miscible::Vec2 w = u(y, t, h);
        const double s = miscible::norm(w);
        return (1.0 + s * s / (1.0 + s)) * cg(y);
    };
    const double ct = d1([&](double s) { return c(x, s); }, t, h);
    return ct - div(flux, x, h) + miscible::dot(u(x, t, h), cg(x));
}

// Relative disagreement with the oracle, best over the step sweep.
template <class Closed, class Oracle>
double fd_mismatch(Closed&& closed, Oracle&& fd)
{
    double best = INFINITY;
    for (double h : {1e-3, 1e-4}) {
        const double want = fd(h);
        best = std::min(best, std::abs(closed - want) / std::max(std::abs(want), 1e-300));
    }
    return best;
}

}  // namespace oracle
