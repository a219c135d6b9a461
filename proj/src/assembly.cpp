#include <array>

#include "miscible/spaces.hpp"

namespace miscible {

SparseMatrix assemble_p1_mass(const LagrangeSpace& space, const std::function<double(int, Vec2)>& weight,
                              int quad_degree)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = triangle_rule(quad_degree);
    std::vector<Triplet> triplets;
    triplets.reserve(9 * static_cast<std::size_t>(mesh.n_triangles()));
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        const auto& dofs = space.cell_dofs(t);
        std::array<std::array<double, 3>, 3> local{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& lambda = rule.barycentric[q];
            const double w = mesh.area(t) * rule.weights[q] * weight(t, rule.point(q, corners));
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    local[i][j] += w * lambda[i] * lambda[j];
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                triplets.push_back({dofs[i], dofs[j], local[i][j]});
            }
        }
    }
    return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), triplets);
}

SparseMatrix assemble_p1_stiffness(const LagrangeSpace& space, const TensorField& dispersion, int quad_degree)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = triangle_rule(quad_degree);
    std::vector<Triplet> triplets;
    triplets.reserve(9 * static_cast<std::size_t>(mesh.n_triangles()));
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        const auto& dofs = space.cell_dofs(t);
        const auto& g = space.gradients(t);
        Tensor2 avg{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Tensor2 d = dispersion(t, rule.point(q, corners));
            avg.xx += rule.weights[q] * d.xx;
            avg.xy += rule.weights[q] * d.xy;
            avg.yy += rule.weights[q] * d.yy;
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                triplets.push_back({dofs[i], dofs[j], mesh.area(t) * dot(avg * g[j], g[i])});
            }
        }
    }
    return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), triplets);
}

SparseMatrix assemble_p1_convection(const LagrangeSpace& space, const std::function<Vec2(int, Vec2)>& velocity,
                                    int quad_degree)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = triangle_rule(quad_degree);
    std::vector<Triplet> triplets;
    triplets.reserve(9 * static_cast<std::size_t>(mesh.n_triangles()));
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        const auto& dofs = space.cell_dofs(t);
        const auto& g = space.gradients(t);
        // Row i (test lambda_i), column j (trial): integral of (u . grad lambda_j) lambda_i.
        std::array<Vec2, 3> weighted_u{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 u = velocity(t, rule.point(q, corners));
            const double w = mesh.area(t) * rule.weights[q];
            for (int i = 0; i < 3; ++i) {
                weighted_u[i] += (w * rule.barycentric[q][i]) * u;
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                triplets.push_back({dofs[i], dofs[j], dot(weighted_u[i], g[j])});
            }
        }
    }
    return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), triplets);
}

std::vector<double> assemble_p1_load(const LagrangeSpace& space, const std::function<double(int, Vec2)>& source,
                                     int quad_degree)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = triangle_rule(quad_degree);
    std::vector<double> load(space.n_dofs(), 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        const auto& dofs = space.cell_dofs(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = mesh.area(t) * rule.weights[q] * source(t, rule.point(q, corners));
            for (int i = 0; i < 3; ++i) {
                load[dofs[i]] += w * rule.barycentric[q][i];
            }
        }
    }
    return load;
}

std::vector<double> assemble_p1_boundary_load(const LagrangeSpace& space, const std::function<double(Vec2, Vec2)>& flux)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = edge_rule();
    std::vector<double> load(space.n_dofs(), 0.0);
    for (int e : mesh.boundary_edges()) {
        const int t = mesh.edge_triangles(e)[0];
        int sign = 0;
        for (const auto& ref : mesh.triangle_edges(t)) {
            if (ref.edge == e) {
                sign = ref.sign;
            }
        }
        const auto [a, b] = mesh.edge(e);
        const Vec2 pa = mesh.vertex(a);
        const Vec2 pb = mesh.vertex(b);
        const Vec2 outward = static_cast<double>(sign) * mesh.edge_normal(e);
        const double len = mesh.edge_length(e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double s = rule.points[q];
            const double w = len * rule.weights[q] * flux(pa + s * (pb - pa), outward);
            load[a] += w * (1.0 - s);
            load[b] += w * s;
        }
    }
    return load;
}

SparseMatrix assemble_rt_mass(const RTSpace& space, const std::function<double(int, Vec2)>& weight, int quad_degree)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = triangle_rule(quad_degree);
    const int dim = space.local_dim();
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(dim) * dim * mesh.n_triangles());
    std::array<Vec2, RTSpace::kMaxLocalDim> phi{};
    std::array<double, RTSpace::kMaxLocalDim> div{};
    std::array<double, RTSpace::kMaxLocalDim * RTSpace::kMaxLocalDim> local{};
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        local.fill(0.0);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = rule.point(q, corners);
            space.eval_basis(t, x, phi, div);
            const double w = mesh.area(t) * rule.weights[q] * weight(t, x);
            for (int i = 0; i < dim; ++i) {
                for (int j = 0; j <= i; ++j) {
                    local[i * dim + j] += w * dot(phi[i], phi[j]);
                }
            }
        }
        const auto dofs = space.cell_dofs(t);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                const double v = j <= i ? local[i * dim + j] : local[j * dim + i];
                triplets.push_back({dofs[i], dofs[j], v});
            }
        }
    }
    return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), triplets);
}

SparseMatrix assemble_divergence(const RTSpace& rt, const DGSpace& dg, int quad_degree)
{
    const Mesh& mesh = rt.mesh();
    const auto& rule = triangle_rule(quad_degree);
    const int dim = rt.local_dim();
    const int nd = dg.dofs_per_cell();
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(dim) * nd * mesh.n_triangles());
    std::array<Vec2, RTSpace::kMaxLocalDim> phi{};
    std::array<double, RTSpace::kMaxLocalDim> div{};
    std::array<double, 3> chi{};
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        std::array<std::array<double, RTSpace::kMaxLocalDim>, 3> local{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = rule.point(q, corners);
            rt.eval_basis(t, x, phi, div);
            dg.eval_basis(t, x, chi);
            const double w = mesh.area(t) * rule.weights[q];
            for (int a = 0; a < nd; ++a) {
                for (int i = 0; i < dim; ++i) {
                    local[a][i] += w * chi[a] * div[i];
                }
            }
        }
        const auto dofs = rt.cell_dofs(t);
        for (int a = 0; a < nd; ++a) {
            for (int i = 0; i < dim; ++i) {
                triplets.push_back({dg.dof(t, a), dofs[i], local[a][i]});
            }
        }
    }
    return SparseMatrix::from_triplets(dg.n_dofs(), rt.n_dofs(), triplets);
}

std::vector<double> assemble_dg_load(const DGSpace& space, const std::function<double(int, Vec2)>& source,
                                     int quad_degree)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = triangle_rule(quad_degree);
    std::vector<double> load(space.n_dofs(), 0.0);
    std::array<double, 3> chi{};
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = rule.point(q, corners);
            space.eval_basis(t, x, chi);
            const double w = mesh.area(t) * rule.weights[q] * source(t, x);
            for (int a = 0; a < space.dofs_per_cell(); ++a) {
                load[space.dof(t, a)] += w * chi[a];
            }
        }
    }
    return load;
}

std::vector<double> rt_boundary_values(const RTSpace& space, const std::function<double(Vec2, Vec2)>& flux,
                                       int edge_points)
{
    const Mesh& mesh = space.mesh();
    const LineRule rule = gauss_legendre(edge_points);
    std::vector<double> values(space.n_dofs(), 0.0);
    for (int e : mesh.boundary_edges()) {
        const int t = mesh.edge_triangles(e)[0];
        int sign = 0;
        for (const auto& ref : mesh.triangle_edges(t)) {
            if (ref.edge == e) {
                sign = ref.sign;
            }
        }
        const Vec2 pa = mesh.vertex(mesh.edge(e)[0]);
        const Vec2 pb = mesh.vertex(mesh.edge(e)[1]);
        const Vec2 outward = static_cast<double>(sign) * mesh.edge_normal(e);
        const double len = mesh.edge_length(e);
        for (int m = 0; m < space.dofs_per_edge(); ++m) {
            double moment = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double s = rule.points[q];
                moment += len * rule.weights[q] * space.edge_weight(m, s) * flux(pa + s * (pb - pa), outward);
            }
            // The dof uses the global normal, which is sign * outward.
            values[space.edge_dof(e, m)] = sign * moment;
        }
    }
    return values;
}

}  // namespace miscible
