#pragma once

#include <array>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "miscible/geometry.hpp"
#include "miscible/linalg.hpp"
#include "miscible/mesh.hpp"
#include "miscible/quadrature.hpp"

namespace miscible {

/// Non-finite function value met while interpolating or projecting.
class NonFiniteValue : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Continuous piecewise linear space; one dof per vertex.
class LagrangeSpace {
public:
    explicit LagrangeSpace(MeshPtr mesh);

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] const MeshPtr& mesh_ptr() const { return mesh_; }
    [[nodiscard]] int n_dofs() const { return mesh_->n_vertices(); }
    [[nodiscard]] const std::array<int, 3>& cell_dofs(int t) const { return mesh_->triangle(t); }
    /// Constant gradients of the three barycentric basis functions on t.
    [[nodiscard]] const std::array<Vec2, 3>& gradients(int t) const { return gradients_[t]; }
    [[nodiscard]] std::array<double, 3> barycentric(int t, Vec2 x) const;

private:
    MeshPtr mesh_;
    std::vector<std::array<Vec2, 3>> gradients_;
};

/// Discontinuous polynomials of degree `order` (0 or 1) per triangle. The
/// local basis is {1} or {1, (x - xc)/h, (y - yc)/h} about the centroid, so
/// only the first local function carries mass.
class DGSpace {
public:
    DGSpace(MeshPtr mesh, int order, bool zero_mean = true);

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] const MeshPtr& mesh_ptr() const { return mesh_; }
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] bool zero_mean() const { return zero_mean_; }
    [[nodiscard]] int dofs_per_cell() const { return order_ == 0 ? 1 : 3; }
    [[nodiscard]] int n_dofs() const { return dofs_per_cell() * mesh_->n_triangles(); }
    [[nodiscard]] int dof(int t, int j) const { return t * dofs_per_cell() + j; }
    void eval_basis(int t, Vec2 x, std::span<double> out) const;
    /// Integral of every global basis function (the mean-constraint vector).
    [[nodiscard]] std::vector<double> basis_integrals(int quad_degree = kDefaultQuadratureDegree) const;

private:
    MeshPtr mesh_;
    int order_;
    bool zero_mean_;
};

/// Raviart-Thomas space of order 0 (3 local dofs) or 1 (8 local dofs).
///
/// Edge dofs are normal moments against {1} (order 0) or {1, 2s - 1}
/// (order 1), with the global edge normal and s running from the low to the
/// high vertex index, so dof 0 of every edge is the signed flux. Order 1 adds
/// two interior dofs per triangle: the cell means of u_x and u_y.
class RTSpace {
public:
    static constexpr int kMaxLocalDim = 8;

    RTSpace(MeshPtr mesh, int order);

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] const MeshPtr& mesh_ptr() const { return mesh_; }
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] int dofs_per_edge() const { return order_ + 1; }
    [[nodiscard]] int local_dim() const { return order_ == 0 ? 3 : 8; }
    [[nodiscard]] int n_dofs() const;
    [[nodiscard]] int edge_dof(int e, int m) const { return e * dofs_per_edge() + m; }
    [[nodiscard]] int interior_dof(int t, int j) const
    {
        return mesh_->n_edges() * dofs_per_edge() + 2 * t + j;
    }
    [[nodiscard]] std::span<const int> cell_dofs(int t) const;
    [[nodiscard]] std::span<const int> boundary_dofs() const { return boundary_dofs_; }

    /// Values and divergences of the local basis at x (inside triangle t).
    void eval_basis(int t, Vec2 x, std::span<Vec2> values, std::span<double> divergences) const;

    /// Edge test polynomial m at parameter s in [0, 1].
    [[nodiscard]] double edge_weight(int m, double s) const { return m == 0 ? 1.0 : 2.0 * s - 1.0; }

private:
    void primal_basis(int t, Vec2 x, std::span<Vec2> values, std::span<double> divergences) const;

    MeshPtr mesh_;
    int order_;
    std::vector<int> cell_dofs_;
    std::vector<int> boundary_dofs_;
    std::vector<double> coefficients_;  // per triangle: local_dim x local_dim
    std::vector<double> scales_;        // per triangle: diameter
};

using LagrangeSpacePtr = std::shared_ptr<const LagrangeSpace>;
using DGSpacePtr = std::shared_ptr<const DGSpace>;
using RTSpacePtr = std::shared_ptr<const RTSpace>;

struct FieldP1 {
    LagrangeSpacePtr space;
    std::vector<double> values;

    [[nodiscard]] double value_at(int t, Vec2 x) const;
    [[nodiscard]] Vec2 gradient(int t) const;
};

struct FieldDG {
    DGSpacePtr space;
    std::vector<double> values;

    [[nodiscard]] double value_at(int t, Vec2 x) const;
    /// sum over cells of the integral of the field.
    [[nodiscard]] double integral(int quad_degree = kDefaultQuadratureDegree) const;
};

struct FieldRT {
    RTSpacePtr space;
    std::vector<double> values;

    [[nodiscard]] Vec2 value_at(int t, Vec2 x) const;
    [[nodiscard]] double divergence_at(int t, Vec2 x) const;
    /// (1/|T|) * integral of div u over T, i.e. the net outward flux over |T|.
    [[nodiscard]] double mean_divergence(int t) const;
};

struct ScalarWithGradient {
    ScalarFunction value;
    VectorFunction gradient;
};

/// Tensor coefficient evaluated at a point of a given triangle.
using TensorField = std::function<Tensor2(int, Vec2)>;

[[nodiscard]] FieldP1 interpolate_p1(const ScalarFunction& f, const LagrangeSpacePtr& space);

/// Canonical RT interpolant: edge normal moments by the 3-point Gauss rule
/// (or `edge_points` Gauss points) and, for order 1, interior means by the
/// triangle rule of the given degree.
[[nodiscard]] FieldRT interpolate_rt(const VectorFunction& u, const RTSpacePtr& space, int edge_points = 3,
                                     int quad_degree = kDefaultQuadratureDegree);

/// L2 projection onto the discontinuous space (per-cell local solve).
[[nodiscard]] FieldDG l2_project_dg(const ScalarFunction& phi, const DGSpacePtr& space,
                                    int quad_degree = kDefaultQuadratureDegree);

struct EllipticProjection {
    FieldP1 field;
    /// Relative residual of the bordered system that defined the field.
    double residual = 0.0;
    /// (1/|Omega|) * integral of (v - w_h).
    double mean_defect = 0.0;
};

/// Galerkin projection with (D grad(v - w_h), grad phi_h) = 0 for all P1
/// phi_h and integral(v - w_h) = 0, closed with a Lagrange multiplier.
[[nodiscard]] EllipticProjection elliptic_project_p1(const ScalarWithGradient& v, const TensorField& dispersion,
                                                     const LagrangeSpacePtr& space,
                                                     const SolverSettings& settings = {},
                                                     int quad_degree = kDefaultQuadratureDegree);

/// Mixed projection Q_h realised as the canonical interpolant.
[[nodiscard]] FieldRT rt_project(const VectorFunction& w, const RTSpacePtr& space, int edge_points = 3,
                                 int quad_degree = kDefaultQuadratureDegree);

/// Assembly building blocks shared by the scheme and the projections.
/// Each returns a square matrix over the P1 dofs.
[[nodiscard]] SparseMatrix assemble_p1_mass(const LagrangeSpace& space, const std::function<double(int, Vec2)>& weight,
                                            int quad_degree = kDefaultQuadratureDegree);
[[nodiscard]] SparseMatrix assemble_p1_stiffness(const LagrangeSpace& space, const TensorField& dispersion,
                                                 int quad_degree = kDefaultQuadratureDegree);
/// Non-symmetric convection (u . grad C, phi).
[[nodiscard]] SparseMatrix assemble_p1_convection(const LagrangeSpace& space,
                                                  const std::function<Vec2(int, Vec2)>& velocity,
                                                  int quad_degree = kDefaultQuadratureDegree);
[[nodiscard]] std::vector<double> assemble_p1_load(const LagrangeSpace& space,
                                                   const std::function<double(int, Vec2)>& source,
                                                   int quad_degree = kDefaultQuadratureDegree);
/// Integral over the boundary of flux(x, outward normal) * phi.
[[nodiscard]] std::vector<double> assemble_p1_boundary_load(const LagrangeSpace& space,
                                                            const std::function<double(Vec2, Vec2)>& flux);

/// Weighted RT mass matrix (w u, v) with a scalar weight.
[[nodiscard]] SparseMatrix assemble_rt_mass(const RTSpace& space, const std::function<double(int, Vec2)>& weight,
                                            int quad_degree = kDefaultQuadratureDegree);
/// Divergence coupling B(a, i) = (chi_a, div v_i): rows DG dofs, columns RT dofs.
[[nodiscard]] SparseMatrix assemble_divergence(const RTSpace& rt, const DGSpace& dg,
                                               int quad_degree = kDefaultQuadratureDegree);
[[nodiscard]] std::vector<double> assemble_dg_load(const DGSpace& space, const std::function<double(int, Vec2)>& source,
                                                   int quad_degree = kDefaultQuadratureDegree);

/// Boundary dof values of the RT interpolant of a normal flux datum
/// flux(x, outward normal) with an `edge_points` Gauss rule; interior dofs
/// untouched.
[[nodiscard]] std::vector<double> rt_boundary_values(const RTSpace& space,
                                                     const std::function<double(Vec2, Vec2)>& flux,
                                                     int edge_points = 3);

}  // namespace miscible
