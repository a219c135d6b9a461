#include "miscible/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace miscible {

namespace {

std::int64_t edge_key(int a, int b, int n_vertices)
{
    return static_cast<std::int64_t>(std::min(a, b)) * n_vertices + std::max(a, b);
}

double interior_angle(Vec2 at, Vec2 b, Vec2 c)
{
    const Vec2 u = b - at;
    const Vec2 v = c - at;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles))
{
    if (vertices_.empty()) {
        throw MeshError("no vertices");
    }
    if (triangles_.empty()) {
        throw MeshError("no triangles");
    }
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        for (int v : triangles_[t]) {
            if (v < 0 || v >= n_vertices()) {
                throw MeshError("triangle " + std::to_string(t) + " references vertex " +
                                std::to_string(v) + " out of range");
            }
        }
    }
    build_topology();
    validate();
}

void Mesh::build_topology()
{
    const int nv = n_vertices();
    std::unordered_map<std::int64_t, int> lookup;
    lookup.reserve(triangles_.size() * 2);
    triangle_edges_.resize(triangles_.size());
    areas_.resize(triangles_.size());

    for (int t = 0; t < n_triangles(); ++t) {
        const auto& tri = triangles_[t];
        areas_[t] = 0.5 * orient(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
        for (int i = 0; i < 3; ++i) {
            const int a = tri[(i + 1) % 3];
            const int b = tri[(i + 2) % 3];
            if (a == b) {
                throw MeshError("triangle " + std::to_string(t) + " has a repeated vertex");
            }
            const auto key = edge_key(a, b, nv);
            auto [it, inserted] = lookup.try_emplace(key, n_edges());
            if (inserted) {
                edges_.push_back({std::min(a, b), std::max(a, b)});
                edge_triangles_.push_back({t, -1});
            } else {
                auto& adj = edge_triangles_[it->second];
                if (adj[1] >= 0) {
                    throw MeshError("edge (" + std::to_string(edges_[it->second][0]) + ", " +
                                    std::to_string(edges_[it->second][1]) +
                                    ") is shared by more than two triangles; offending triangle " +
                                    std::to_string(t));
                }
                adj[1] = t;
            }
            triangle_edges_[t][i] = EdgeRef{it->second, a < b ? 1 : -1};
        }
    }

    for (int e = 0; e < n_edges(); ++e) {
        if (edge_triangles_[e][1] < 0) {
            boundary_edges_.push_back(e);
        }
        h_max_ = std::max(h_max_, edge_length(e));
    }
}

void Mesh::validate() const
{
    for (int t = 0; t < n_triangles(); ++t) {
        if (!(areas_[t] > 0.0)) {
            throw MeshError("triangle " + std::to_string(t) + " has non-positive signed area " +
                            std::to_string(areas_[t]));
        }
    }
    // Neighbours across an interior edge must traverse it in opposite directions.
    for (int e = 0; e < n_edges(); ++e) {
        const auto [t0, t1] = edge_triangles_[e];
        if (t1 < 0) {
            continue;
        }
        auto sign_in = [&](int t) {
            for (const auto& r : triangle_edges_[t]) {
                if (r.edge == e) {
                    return r.sign;
                }
            }
            return 0;
        };
        if (sign_in(t0) == sign_in(t1)) {
            throw MeshError("triangles " + std::to_string(t0) + " and " + std::to_string(t1) +
                            " overlap across edge " + std::to_string(e));
        }
    }

    std::vector<int> use_count(vertices_.size(), 0);
    std::vector<int> boundary_degree(vertices_.size(), 0);
    std::vector<double> angle_sum(vertices_.size(), 0.0);
    for (int t = 0; t < n_triangles(); ++t) {
        const auto& tri = triangles_[t];
        for (int i = 0; i < 3; ++i) {
            ++use_count[tri[i]];
            angle_sum[tri[i]] += interior_angle(vertices_[tri[i]], vertices_[tri[(i + 1) % 3]],
                                                vertices_[tri[(i + 2) % 3]]);
        }
    }
    for (int e : boundary_edges_) {
        ++boundary_degree[edges_[e][0]];
        ++boundary_degree[edges_[e][1]];
    }
    for (int v = 0; v < n_vertices(); ++v) {
        if (use_count[v] == 0) {
            throw MeshError("vertex " + std::to_string(v) + " is not used by any triangle");
        }
        if (boundary_degree[v] != 0 && boundary_degree[v] != 2) {
            throw MeshError("vertex " + std::to_string(v) + " is a non-manifold boundary vertex");
        }
        if (boundary_degree[v] == 0 && std::abs(angle_sum[v] - 2.0 * std::numbers::pi) > 1e-8) {
            throw MeshError("interior vertex " + std::to_string(v) +
                            " is not surrounded by a conforming fan of triangles");
        }
    }
    if (n_vertices() - n_edges() + n_triangles() != 1) {
        throw MeshError("Euler relation V - E + T = 1 violated (V=" + std::to_string(n_vertices()) +
                        ", E=" + std::to_string(n_edges()) + ", T=" + std::to_string(n_triangles()) +
                        ")");
    }
}

std::array<Vec2, 3> Mesh::corners(int t) const
{
    const auto& tri = triangles_[t];
    return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

Vec2 Mesh::centroid(int t) const
{
    const auto c = corners(t);
    return (c[0] + c[1] + c[2]) / 3.0;
}

double Mesh::diameter(int t) const
{
    const auto c = corners(t);
    return std::max({norm(c[1] - c[0]), norm(c[2] - c[1]), norm(c[0] - c[2])});
}

double Mesh::edge_length(int e) const
{
    return norm(vertices_[edges_[e][1]] - vertices_[edges_[e][0]]);
}

Vec2 Mesh::edge_normal(int e) const
{
    const Vec2 t = vertices_[edges_[e][1]] - vertices_[edges_[e][0]];
    const double len = norm(t);
    return {t.y / len, -t.x / len};
}

double Mesh::total_area() const
{
    double sum = 0.0;
    for (double a : areas_) {
        sum += a;
    }
    return sum;
}

Mesh generate_unit_square_mesh(int cells_per_side)
{
    if (cells_per_side < 1) {
        throw MeshError("unit square mesh needs at least one cell per side, got " +
                        std::to_string(cells_per_side));
    }
    const int m = cells_per_side;
    const int stride = m + 1;
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>(stride) * stride);
    for (int j = 0; j <= m; ++j) {
        for (int i = 0; i <= m; ++i) {
            vertices.push_back({static_cast<double>(i) / m, static_cast<double>(j) / m});
        }
    }
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(2 * static_cast<std::size_t>(m) * m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const int v00 = j * stride + i;
            const int v10 = v00 + 1;
            const int v01 = v00 + stride;
            const int v11 = v01 + 1;
            triangles.push_back({v00, v10, v11});
            triangles.push_back({v00, v11, v01});
        }
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

Mesh make_mesh(const std::string& descriptor)
{
    const auto colon = descriptor.find(':');
    if (colon == std::string::npos) {
        throw MeshError("mesh descriptor '" + descriptor + "' must be square:M, disk:M or file:PATH");
    }
    const std::string kind = descriptor.substr(0, colon);
    const std::string arg = descriptor.substr(colon + 1);
    if (kind == "file") {
        return load_mesh(arg);
    }
    int n = 0;
    try {
        std::size_t used = 0;
        n = std::stoi(arg, &used);
        if (used != arg.size()) {
            throw std::invalid_argument(arg);
        }
    } catch (const std::exception&) {
        throw MeshError("mesh descriptor '" + descriptor + "' has a non-integer size");
    }
    if (kind == "square") {
        return generate_unit_square_mesh(n);
    }
    if (kind == "disk") {
        return generate_disk_mesh(n);
    }
    throw MeshError("unknown mesh kind '" + kind + "'");
}

}  // namespace miscible
