#pragma once

#include <cmath>
#include <functional>

namespace miscible {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }

/// Symmetric 2x2 tensor.
struct Tensor2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    static Tensor2 identity(double s = 1.0) { return {s, 0.0, s}; }

    Vec2 operator*(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }

    double min_eigenvalue() const
    {
        const double mean = 0.5 * (xx + yy);
        const double r = std::hypot(0.5 * (xx - yy), xy);
        return mean - r;
    }
};

/// Twice the signed area of (a, b, c); positive for counterclockwise order.
inline double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

using ScalarFunction = std::function<double(Vec2)>;
using VectorFunction = std::function<Vec2(Vec2)>;
using SpaceTimeScalar = std::function<double(Vec2, double)>;
using SpaceTimeVector = std::function<Vec2(Vec2, double)>;

}  // namespace miscible
