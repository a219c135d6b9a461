#include "miscible/spaces.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace miscible {

// ---------------------------------------------------------------------------
// LagrangeSpace

LagrangeSpace::LagrangeSpace(MeshPtr mesh) : mesh_(std::move(mesh))
{
    gradients_.resize(mesh_->n_triangles());
    for (int t = 0; t < mesh_->n_triangles(); ++t) {
        const auto c = mesh_->corners(t);
        const double two_area = 2.0 * mesh_->area(t);
        for (int i = 0; i < 3; ++i) {
            const Vec2 e = c[(i + 2) % 3] - c[(i + 1) % 3];
            gradients_[t][i] = Vec2{-e.y, e.x} / two_area;
        }
    }
}

std::array<double, 3> LagrangeSpace::barycentric(int t, Vec2 x) const
{
    const auto& tri = mesh_->triangle(t);
    const auto& g = gradients_[t];
    std::array<double, 3> lambda{};
    for (int i = 0; i < 3; ++i) {
        lambda[i] = dot(g[i], x - mesh_->vertex(tri[(i + 1) % 3]));
    }
    return lambda;
}

// ---------------------------------------------------------------------------
// DGSpace

DGSpace::DGSpace(MeshPtr mesh, int order, bool zero_mean)
    : mesh_(std::move(mesh)), order_(order), zero_mean_(zero_mean)
{
    if (order_ != 0 && order_ != 1) {
        throw std::invalid_argument("DG space order must be 0 or 1, got " + std::to_string(order_));
    }
}

void DGSpace::eval_basis(int t, Vec2 x, std::span<double> out) const
{
    out[0] = 1.0;
    if (order_ == 1) {
        const Vec2 xi = (x - mesh_->centroid(t)) / mesh_->diameter(t);
        out[1] = xi.x;
        out[2] = xi.y;
    }
}

std::vector<double> DGSpace::basis_integrals(int quad_degree) const
{
    const auto& rule = triangle_rule(quad_degree);
    std::vector<double> m(n_dofs(), 0.0);
    std::array<double, 3> phi{};
    for (int t = 0; t < mesh_->n_triangles(); ++t) {
        const auto corners = mesh_->corners(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            eval_basis(t, rule.point(q, corners), phi);
            for (int j = 0; j < dofs_per_cell(); ++j) {
                m[dof(t, j)] += mesh_->area(t) * rule.weights[q] * phi[j];
            }
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// RTSpace

RTSpace::RTSpace(MeshPtr mesh, int order) : mesh_(std::move(mesh)), order_(order)
{
    if (order_ != 0 && order_ != 1) {
        throw std::invalid_argument("Raviart-Thomas order must be 0 or 1, got " + std::to_string(order_));
    }
    const int nt = mesh_->n_triangles();
    const int dim = local_dim();
    const int per_edge = dofs_per_edge();

    cell_dofs_.resize(static_cast<std::size_t>(nt) * dim);
    coefficients_.resize(static_cast<std::size_t>(nt) * dim * dim);
    scales_.resize(nt);

    for (int e : mesh_->boundary_edges()) {
        for (int m = 0; m < per_edge; ++m) {
            boundary_dofs_.push_back(edge_dof(e, m));
        }
    }

    const auto& erule = edge_rule();
    const auto& trule = triangle_rule(5);
    std::array<Vec2, kMaxLocalDim> psi{};
    std::array<double, kMaxLocalDim> div{};

    for (int t = 0; t < nt; ++t) {
        scales_[t] = mesh_->diameter(t);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
        int row = 0;
        for (int i = 0; i < 3; ++i) {
            const int e = mesh_->triangle_edges(t)[i].edge;
            const Vec2 p0 = mesh_->vertex(mesh_->edge(e)[0]);
            const Vec2 p1 = mesh_->vertex(mesh_->edge(e)[1]);
            const Vec2 n = mesh_->edge_normal(e);
            const double len = mesh_->edge_length(e);
            for (int m = 0; m < per_edge; ++m, ++row) {
                cell_dofs_[static_cast<std::size_t>(t) * dim + row] = edge_dof(e, m);
                for (std::size_t q = 0; q < erule.size(); ++q) {
                    const double s = erule.points[q];
                    primal_basis(t, p0 + s * (p1 - p0), psi, div);
                    const double w = len * erule.weights[q] * edge_weight(m, s);
                    for (int j = 0; j < dim; ++j) {
                        a(row, j) += w * dot(psi[j], n);
                    }
                }
            }
        }
        if (order_ == 1) {
            const auto corners = mesh_->corners(t);
            for (int comp = 0; comp < 2; ++comp, ++row) {
                cell_dofs_[static_cast<std::size_t>(t) * dim + row] = interior_dof(t, comp);
                for (std::size_t q = 0; q < trule.size(); ++q) {
                    primal_basis(t, trule.point(q, corners), psi, div);
                    for (int j = 0; j < dim; ++j) {
                        a(row, j) += trule.weights[q] * (comp == 0 ? psi[j].x : psi[j].y);
                    }
                }
            }
        }
        const Eigen::MatrixXd inv = a.fullPivLu().inverse();
        double* coef = &coefficients_[static_cast<std::size_t>(t) * dim * dim];
        for (int d = 0; d < dim; ++d) {
            for (int j = 0; j < dim; ++j) {
                coef[d * dim + j] = inv(j, d);
            }
        }
    }
}

int RTSpace::n_dofs() const
{
    const int edges = mesh_->n_edges() * dofs_per_edge();
    return order_ == 0 ? edges : edges + 2 * mesh_->n_triangles();
}

std::span<const int> RTSpace::cell_dofs(int t) const
{
    return {cell_dofs_.data() + static_cast<std::size_t>(t) * local_dim(), static_cast<std::size_t>(local_dim())};
}

void RTSpace::primal_basis(int t, Vec2 x, std::span<Vec2> values, std::span<double> divergences) const
{
    const double h = scales_[t];
    const Vec2 r = (x - mesh_->centroid(t)) / h;
    values[0] = {1.0, 0.0};
    values[1] = {0.0, 1.0};
    divergences[0] = 0.0;
    divergences[1] = 0.0;
    if (order_ == 0) {
        values[2] = r;
        divergences[2] = 2.0 / h;
        return;
    }
    values[2] = {r.x, 0.0};
    values[3] = {r.y, 0.0};
    values[4] = {0.0, r.x};
    values[5] = {0.0, r.y};
    values[6] = {r.x * r.x, r.x * r.y};
    values[7] = {r.x * r.y, r.y * r.y};
    divergences[2] = 1.0 / h;
    divergences[3] = 0.0;
    divergences[4] = 0.0;
    divergences[5] = 1.0 / h;
    divergences[6] = 3.0 * r.x / h;
    divergences[7] = 3.0 * r.y / h;
}

void RTSpace::eval_basis(int t, Vec2 x, std::span<Vec2> values, std::span<double> divergences) const
{
    const int dim = local_dim();
    std::array<Vec2, kMaxLocalDim> psi{};
    std::array<double, kMaxLocalDim> dpsi{};
    primal_basis(t, x, psi, dpsi);
    const double* coef = &coefficients_[static_cast<std::size_t>(t) * dim * dim];
    for (int d = 0; d < dim; ++d) {
        Vec2 v{};
        double dv = 0.0;
        for (int j = 0; j < dim; ++j) {
            v += coef[d * dim + j] * psi[j];
            dv += coef[d * dim + j] * dpsi[j];
        }
        values[d] = v;
        divergences[d] = dv;
    }
}

// ---------------------------------------------------------------------------
// Fields

double FieldP1::value_at(int t, Vec2 x) const
{
    const auto lambda = space->barycentric(t, x);
    const auto& dofs = space->cell_dofs(t);
    return lambda[0] * values[dofs[0]] + lambda[1] * values[dofs[1]] + lambda[2] * values[dofs[2]];
}

Vec2 FieldP1::gradient(int t) const
{
    const auto& g = space->gradients(t);
    const auto& dofs = space->cell_dofs(t);
    return values[dofs[0]] * g[0] + values[dofs[1]] * g[1] + values[dofs[2]] * g[2];
}

double FieldDG::value_at(int t, Vec2 x) const
{
    std::array<double, 3> phi{};
    space->eval_basis(t, x, phi);
    double v = 0.0;
    for (int j = 0; j < space->dofs_per_cell(); ++j) {
        v += values[space->dof(t, j)] * phi[j];
    }
    return v;
}

double FieldDG::integral(int quad_degree) const
{
    return inner(space->basis_integrals(quad_degree), values);
}

Vec2 FieldRT::value_at(int t, Vec2 x) const
{
    std::array<Vec2, RTSpace::kMaxLocalDim> phi{};
    std::array<double, RTSpace::kMaxLocalDim> div{};
    space->eval_basis(t, x, phi, div);
    const auto dofs = space->cell_dofs(t);
    Vec2 u{};
    for (std::size_t d = 0; d < dofs.size(); ++d) {
        u += values[dofs[d]] * phi[d];
    }
    return u;
}

double FieldRT::divergence_at(int t, Vec2 x) const
{
    std::array<Vec2, RTSpace::kMaxLocalDim> phi{};
    std::array<double, RTSpace::kMaxLocalDim> div{};
    space->eval_basis(t, x, phi, div);
    const auto dofs = space->cell_dofs(t);
    double d = 0.0;
    for (std::size_t k = 0; k < dofs.size(); ++k) {
        d += values[dofs[k]] * div[k];
    }
    return d;
}

double FieldRT::mean_divergence(int t) const
{
    const Mesh& mesh = space->mesh();
    double flux = 0.0;
    for (const auto& ref : mesh.triangle_edges(t)) {
        flux += ref.sign * values[space->edge_dof(ref.edge, 0)];
    }
    return flux / mesh.area(t);
}

}  // namespace miscible
