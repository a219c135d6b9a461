#pragma once

#include <vector>

#include "miscible/mesh.hpp"

namespace miscible {

/// Finds the triangle containing a point using a uniform bucket grid over
/// the triangles' bounding boxes.
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh);

    /// Index of a triangle containing x, or -1 if x is outside the mesh
    /// (with a small tolerance on the barycentric coordinates).
    [[nodiscard]] int locate(Vec2 x) const;

private:
    const Mesh* mesh_;
    Vec2 origin_;
    double cell_ = 1.0;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<int> offsets_;
    std::vector<int> items_;
};

}  // namespace miscible
