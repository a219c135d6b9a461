#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>

#include "miscible/mesh.hpp"

namespace miscible {

namespace detail {

namespace {

struct Circle {
    Vec2 center;
    double radius2 = 0.0;
};

Circle circumcircle(Vec2 a, Vec2 b, Vec2 c)
{
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = norm2(ab);
    const double ac2 = norm2(ac);
    const Vec2 rel{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
    return {a + rel, norm2(rel)};
}

struct WorkTriangle {
    std::array<int, 3> v;
    Circle circle;
    bool alive = true;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Vec2> points)
{
    const int n = static_cast<int>(points.size());
    if (n < 3) {
        throw MeshError("Delaunay triangulation needs at least three points");
    }
    Vec2 lo = points[0];
    Vec2 hi = points[0];
    for (const Vec2& p : points) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const Vec2 mid = 0.5 * (lo + hi);
    const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12}) * 1e3;

    std::vector<Vec2> pts(points.begin(), points.end());
    pts.push_back(mid + Vec2{-2.0 * span, -span});
    pts.push_back(mid + Vec2{2.0 * span, -span});
    pts.push_back(mid + Vec2{0.0, 2.0 * span});

    std::vector<WorkTriangle> tris;
    auto add = [&](int a, int b, int c) {
        if (orient(pts[a], pts[b], pts[c]) < 0.0) {
            std::swap(b, c);
        }
        tris.push_back({{a, b, c}, circumcircle(pts[a], pts[b], pts[c]), true});
    };
    add(n, n + 1, n + 2);

    std::vector<int> bad;
    std::unordered_map<std::int64_t, int> boundary_count;
    std::vector<std::array<int, 2>> cavity_edges;
    const std::int64_t total = n + 3;

    for (int p = 0; p < n; ++p) {
        const Vec2 x = pts[p];
        bad.clear();
        for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
            if (!tris[t].alive) {
                continue;
            }
            const auto& c = tris[t].circle;
            const double d2 = norm2(x - c.center);
            if (d2 < c.radius2 * (1.0 - 1e-12)) {
                bad.push_back(t);
            }
        }
        if (bad.empty()) {
            throw MeshError("Delaunay insertion failed: point " + std::to_string(p) +
                            " lies in no circumcircle (duplicate point?)");
        }
        boundary_count.clear();
        cavity_edges.clear();
        for (int t : bad) {
            const auto& v = tris[t].v;
            for (int i = 0; i < 3; ++i) {
                const int a = v[i];
                const int b = v[(i + 1) % 3];
                ++boundary_count[std::min<std::int64_t>(a, b) * total + std::max(a, b)];
            }
        }
        for (int t : bad) {
            const auto v = tris[t].v;
            tris[t].alive = false;
            for (int i = 0; i < 3; ++i) {
                const int a = v[i];
                const int b = v[(i + 1) % 3];
                if (boundary_count[std::min<std::int64_t>(a, b) * total + std::max(a, b)] == 1) {
                    cavity_edges.push_back({a, b});
                }
            }
        }
        for (const auto& e : cavity_edges) {
            add(e[0], e[1], p);
        }
        // Compact occasionally so the scan stays proportional to live triangles.
        if (tris.size() > 4 * static_cast<std::size_t>(p + 8)) {
            std::erase_if(tris, [](const WorkTriangle& w) { return !w.alive; });
        }
    }

    std::vector<std::array<int, 3>> result;
    for (const auto& t : tris) {
        if (t.alive && t.v[0] < n && t.v[1] < n && t.v[2] < n) {
            result.push_back(t.v);
        }
    }
    return result;
}

}  // namespace detail

namespace {

// Uniform double in [0, 1) from the top 53 bits, independent of the
// standard library's distribution implementation.
double unit_uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double min_angle(Vec2 a, Vec2 b, Vec2 c)
{
    auto angle = [](Vec2 at, Vec2 p, Vec2 q) {
        const Vec2 u = p - at;
        const Vec2 v = q - at;
        return std::atan2(std::abs(cross(u, v)), dot(u, v));
    };
    return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

}  // namespace

Mesh generate_disk_mesh(int boundary_points, const DiskMeshOptions& options)
{
    if (boundary_points < 8) {
        throw MeshError("disk mesh needs at least 8 boundary points, got " + std::to_string(boundary_points));
    }
    const double pi = std::numbers::pi;
    const int m = boundary_points;
    const double r = options.radius;
    const Vec2 c = options.center;
    const double h = 2.0 * pi * r / m;

    std::vector<Vec2> points;
    for (int i = 0; i < m; ++i) {
        const double theta = 2.0 * pi * i / m;
        points.push_back(c + r * Vec2{std::cos(theta), std::sin(theta)});
    }

    // Concentric rings of interior points at the boundary spacing; rows are
    // staggered so the fill is close to equilateral.
    std::mt19937_64 rng(options.seed);
    const double ring_step = h * std::sqrt(3.0) / 2.0;
    const double inner_radius = r * std::cos(pi / m);
    for (int k = 1;; ++k) {
        const double rk = r - k * ring_step;
        if (rk < 0.5 * ring_step) {
            points.push_back(c);
            break;
        }
        const int nk = std::max(3, static_cast<int>(std::lround(2.0 * pi * rk / h)));
        const double offset = (k % 2 == 1) ? pi / nk : 0.0;
        for (int i = 0; i < nk; ++i) {
            const double theta = offset + 2.0 * pi * i / nk;
            Vec2 p = c + rk * Vec2{std::cos(theta), std::sin(theta)};
            p += options.jitter * h * Vec2{2.0 * unit_uniform(rng) - 1.0, 2.0 * unit_uniform(rng) - 1.0};
            if (norm(p - c) < inner_radius - 0.25 * h) {
                points.push_back(p);
            }
        }
    }

    auto triangles = detail::delaunay_triangulate(points);

    // Delaunay refinement: insert circumcentres of poorly shaped triangles
    // unless they would encroach on a boundary segment or crowd a vertex.
    const double target = options.min_angle_deg * pi / 180.0;
    for (int pass = 0; pass < 6; ++pass) {
        std::vector<Vec2> added;
        for (const auto& t : triangles) {
            const Vec2 a = points[t[0]];
            const Vec2 b = points[t[1]];
            const Vec2 q = points[t[2]];
            if (min_angle(a, b, q) >= target) {
                continue;
            }
            const double d = 2.0 * orient(a, b, q);
            const Vec2 ab = b - a;
            const Vec2 aq = q - a;
            const Vec2 cc = a + Vec2{(aq.y * norm2(ab) - ab.y * norm2(aq)) / d,
                                     (ab.x * norm2(aq) - aq.x * norm2(ab)) / d};
            if (norm(cc - c) > inner_radius - 0.25 * h) {
                continue;
            }
            const double spacing = 0.5 * h;
            auto crowded = [&](Vec2 p) { return norm(p - cc) < spacing; };
            if (std::any_of(points.begin(), points.end(), crowded) ||
                std::any_of(added.begin(), added.end(), crowded)) {
                continue;
            }
            added.push_back(cc);
        }
        if (added.empty()) {
            break;
        }
        points.insert(points.end(), added.begin(), added.end());
        triangles = detail::delaunay_triangulate(points);
    }

    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        const double area = 0.5 * orient(points[tri[0]], points[tri[1]], points[tri[2]]);
        if (area < 1e-14) {
            throw MeshError("disk mesh generation produced degenerate triangle " + std::to_string(t));
        }
    }
    Mesh mesh(std::move(points), std::move(triangles));
    if (static_cast<int>(mesh.boundary_edges().size()) != m) {
        throw MeshError("disk mesh has " + std::to_string(mesh.boundary_edges().size()) +
                        " boundary edges, expected " + std::to_string(m));
    }
    return mesh;
}

}  // namespace miscible
