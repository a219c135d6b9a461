#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "miscible/geometry.hpp"

namespace miscible {

/// Raised when a triangulation violates one of the connectivity invariants
/// or a mesh file cannot be parsed.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Global edge of a triangle together with its orientation relative to the
/// counterclockwise traversal of that triangle.
struct EdgeRef {
    int edge = -1;
    int sign = 0;  // +1 if global low->high direction matches CCW traversal
};

/// Conforming triangulation of a simply connected polygon.
///
/// Local edge i of a triangle (a0, a1, a2) joins a(i+1) and a(i+2), i.e. it
/// is the edge opposite local vertex i. Global edges are stored with
/// vertices ordered low -> high index; the global normal of an edge points
/// to the right of that direction. For a triangle whose EdgeRef sign is +1
/// the global normal is outward.
class Mesh {
public:
    Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles);

    [[nodiscard]] int n_vertices() const { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int n_triangles() const { return static_cast<int>(triangles_.size()); }
    [[nodiscard]] int n_edges() const { return static_cast<int>(edges_.size()); }

    [[nodiscard]] std::span<const Vec2> vertices() const { return vertices_; }
    [[nodiscard]] std::span<const std::array<int, 3>> triangles() const { return triangles_; }
    [[nodiscard]] std::span<const std::array<int, 2>> edges() const { return edges_; }
    [[nodiscard]] std::span<const int> boundary_edges() const { return boundary_edges_; }

    [[nodiscard]] Vec2 vertex(int v) const { return vertices_[v]; }
    [[nodiscard]] const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    [[nodiscard]] const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    [[nodiscard]] const std::array<EdgeRef, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
    /// Triangles adjacent to an edge; the second entry is -1 on the boundary.
    [[nodiscard]] const std::array<int, 2>& edge_triangles(int e) const { return edge_triangles_[e]; }
    [[nodiscard]] bool is_boundary_edge(int e) const { return edge_triangles_[e][1] < 0; }

    [[nodiscard]] std::array<Vec2, 3> corners(int t) const;
    [[nodiscard]] double area(int t) const { return areas_[t]; }
    [[nodiscard]] Vec2 centroid(int t) const;
    [[nodiscard]] double diameter(int t) const;
    [[nodiscard]] double edge_length(int e) const;
    /// Unit normal of the global edge orientation (tangent rotated clockwise).
    [[nodiscard]] Vec2 edge_normal(int e) const;
    [[nodiscard]] double h_max() const { return h_max_; }
    [[nodiscard]] double total_area() const;

private:
    void build_topology();
    void validate() const;

    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<EdgeRef, 3>> triangle_edges_;
    std::vector<std::array<int, 2>> edge_triangles_;
    std::vector<int> boundary_edges_;
    std::vector<double> areas_;
    double h_max_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Uniform partition of the unit square with M cells per side; every cell is
/// split along its bottom-left -> top-right diagonal.
[[nodiscard]] Mesh generate_unit_square_mesh(int cells_per_side);

struct DiskMeshOptions {
    Vec2 center{0.5, 0.5};
    double radius = 0.5;
    /// Seed for the small perturbation of interior points.
    std::uint64_t seed = 1;
    /// Perturbation amplitude relative to the target edge length.
    double jitter = 0.05;
    /// Minimum-angle target of the refinement pass, in degrees.
    double min_angle_deg = 25.0;
};

/// Triangulation of the polygon through `boundary_points` equally spaced
/// points on a circle, filled with a quality Delaunay mesh whose target edge
/// length matches the boundary spacing.
[[nodiscard]] Mesh generate_disk_mesh(int boundary_points, const DiskMeshOptions& options = {});

/// Plain-text mesh format with `#vertices`, `#triangles` and `#boundary`
/// sections; coordinates written with 17 significant digits.
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
[[nodiscard]] Mesh load_mesh(const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
[[nodiscard]] Mesh read_mesh(std::istream& in);

/// Parses a mesh descriptor: `square:M`, `disk:M` or `file:PATH`.
[[nodiscard]] Mesh make_mesh(const std::string& descriptor);

namespace detail {
/// Delaunay triangulation of a point set (Bowyer-Watson). Returns
/// counterclockwise triangles covering the convex hull.
std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Vec2> points);
}  // namespace detail

}  // namespace miscible
