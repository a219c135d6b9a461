#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "miscible/spaces.hpp"

namespace miscible {

namespace {

std::string describe(Vec2 x)
{
    return "(" + std::to_string(x.x) + ", " + std::to_string(x.y) + ")";
}

}  // namespace

FieldP1 interpolate_p1(const ScalarFunction& f, const LagrangeSpacePtr& space)
{
    const Mesh& mesh = space->mesh();
    FieldP1 field{space, std::vector<double>(space->n_dofs())};
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const double value = f(mesh.vertex(v));
        if (!std::isfinite(value)) {
            throw NonFiniteValue("non-finite value at vertex " + std::to_string(v) + " " + describe(mesh.vertex(v)));
        }
        field.values[v] = value;
    }
    return field;
}

FieldRT interpolate_rt(const VectorFunction& u, const RTSpacePtr& space, int edge_points, int quad_degree)
{
    const Mesh& mesh = space->mesh();
    const LineRule erule = gauss_legendre(edge_points);
    FieldRT field{space, std::vector<double>(space->n_dofs(), 0.0)};
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const Vec2 pa = mesh.vertex(mesh.edge(e)[0]);
        const Vec2 pb = mesh.vertex(mesh.edge(e)[1]);
        const Vec2 n = mesh.edge_normal(e);
        const double len = mesh.edge_length(e);
        for (int m = 0; m < space->dofs_per_edge(); ++m) {
            double moment = 0.0;
            for (std::size_t q = 0; q < erule.size(); ++q) {
                const double s = erule.points[q];
                const Vec2 x = pa + s * (pb - pa);
                const Vec2 value = u(x);
                if (!std::isfinite(value.x) || !std::isfinite(value.y)) {
                    throw NonFiniteValue("non-finite vector value on edge " + std::to_string(e) + " at " +
                                         describe(x));
                }
                moment += len * erule.weights[q] * space->edge_weight(m, s) * dot(value, n);
            }
            field.values[space->edge_dof(e, m)] = moment;
        }
    }
    if (space->order() == 1) {
        const auto& rule = triangle_rule(quad_degree);
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const auto corners = mesh.corners(t);
            Vec2 mean{};
            for (std::size_t q = 0; q < rule.size(); ++q) {
                mean += rule.weights[q] * u(rule.point(q, corners));
            }
            field.values[space->interior_dof(t, 0)] = mean.x;
            field.values[space->interior_dof(t, 1)] = mean.y;
        }
    }
    return field;
}

FieldRT rt_project(const VectorFunction& w, const RTSpacePtr& space, int edge_points, int quad_degree)
{
    return interpolate_rt(w, space, edge_points, quad_degree);
}

FieldDG l2_project_dg(const ScalarFunction& phi, const DGSpacePtr& space, int quad_degree)
{
    const Mesh& mesh = space->mesh();
    const auto& rule = triangle_rule(quad_degree);
    const int nd = space->dofs_per_cell();
    FieldDG field{space, std::vector<double>(space->n_dofs(), 0.0)};
    std::array<double, 3> chi{};
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = rule.point(q, corners);
            const double value = phi(x);
            if (!std::isfinite(value)) {
                throw NonFiniteValue("non-finite value in triangle " + std::to_string(t) + " at " + describe(x));
            }
            space->eval_basis(t, x, chi);
            for (int a = 0; a < nd; ++a) {
                rhs[a] += rule.weights[q] * value * chi[a];
                for (int b = 0; b < nd; ++b) {
                    mass(a, b) += rule.weights[q] * chi[a] * chi[b];
                }
            }
        }
        const Eigen::VectorXd c = mass.topLeftCorner(nd, nd).ldlt().solve(rhs.head(nd));
        for (int a = 0; a < nd; ++a) {
            field.values[space->dof(t, a)] = c[a];
        }
    }
    return field;
}

EllipticProjection elliptic_project_p1(const ScalarWithGradient& v, const TensorField& dispersion,
                                       const LagrangeSpacePtr& space, const SolverSettings& settings, int quad_degree)
{
    const Mesh& mesh = space->mesh();
    const auto& rule = triangle_rule(quad_degree);
    const int n = space->n_dofs();

    const SparseMatrix stiffness = assemble_p1_stiffness(*space, dispersion, quad_degree);
    std::vector<double> rhs(n + 1, 0.0);
    std::vector<double> mass_weights(n, 0.0);
    double v_integral = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        const auto& dofs = space->cell_dofs(t);
        const auto& g = space->gradients(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = rule.point(q, corners);
            const double w = mesh.area(t) * rule.weights[q];
            const Vec2 flux = dispersion(t, x) * v.gradient(x);
            v_integral += w * v.value(x);
            for (int i = 0; i < 3; ++i) {
                rhs[dofs[i]] += w * dot(flux, g[i]);
                mass_weights[dofs[i]] += w * rule.barycentric[q][i];
            }
        }
    }
    rhs[n] = v_integral;

    std::vector<Triplet> triplets;
    triplets.reserve(stiffness.nonzeros() + 2 * static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        for (int k = stiffness.row_offsets()[r]; k < stiffness.row_offsets()[r + 1]; ++k) {
            triplets.push_back({r, stiffness.columns()[k], stiffness.values()[k]});
        }
        triplets.push_back({r, n, mass_weights[r]});
        triplets.push_back({n, r, mass_weights[r]});
    }
    LinearSystem system{SparseMatrix::from_triplets(n + 1, n + 1, triplets), rhs, true, settings};
    const std::vector<double> x = solve(system);

    EllipticProjection result;
    result.field = FieldP1{space, std::vector<double>(x.begin(), x.begin() + n)};
    result.residual = relative_residual(system.matrix, x, system.rhs);
    const double area = mesh.total_area();
    result.mean_defect = (v_integral - inner(mass_weights, result.field.values)) / area;
    return result;
}

}  // namespace miscible
