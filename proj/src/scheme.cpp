#include "miscible/scheme.hpp"

#include <algorithm>
#include <cmath>

namespace miscible {

int RunConfig::steps() const
{
    return static_cast<int>(std::lround(final_time / tau));
}

void RunConfig::validate() const
{
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("time step must be positive, got " + std::to_string(tau));
    }
    if (!(final_time > 0.0) || !std::isfinite(final_time)) {
        throw std::invalid_argument("final time must be positive, got " + std::to_string(final_time));
    }
    if (steps() < 1) {
        throw std::invalid_argument("final time is shorter than half a time step");
    }
    if (!mesh) {
        throw std::invalid_argument("run configuration has no mesh");
    }
    if (options.mixed_order != 0 && options.mixed_order != 1) {
        throw std::invalid_argument("mixed order must be 0 or 1");
    }
    for (int d : {options.quad_degree, options.source_quad_degree}) {
        if (d < 1 || d > 30) {
            throw std::invalid_argument("quadrature degree must be in [1, 30], got " + std::to_string(d));
        }
    }
    if (output_cadence < 0) {
        throw std::invalid_argument("output cadence must be non-negative");
    }
}

SemiImplicitScheme::SemiImplicitScheme(RunConfig config) : config_(std::move(config))
{
    config_.validate();
    p1_ = std::make_shared<const LagrangeSpace>(config_.mesh);
    dg_ = std::make_shared<const DGSpace>(config_.mesh, config_.options.mixed_order);
    rt_ = std::make_shared<const RTSpace>(config_.mesh, config_.options.mixed_order);
    mean_constraint_ = dg_->basis_integrals(config_.options.quad_degree);
}

DiscreteState SemiImplicitScheme::init_state() const
{
    DiscreteState state;
    state.C = interpolate_p1(config_.problem.initial_concentration, p1_);
    return state;
}

PressureVelocity SemiImplicitScheme::step_pressure_velocity(const FieldP1& c_prev, double t_next) const
{
    const Mesh& mesh = *config_.mesh;
    const auto& data = config_.problem;
    const auto& coeffs = data.coeffs;
    const int quad = config_.options.quad_degree;

    // Viscosity lagged at C^n: this is what makes the step linear.
    const SparseMatrix mass = assemble_rt_mass(
        *rt_, [&](int t, Vec2 x) { return eval_mu(c_prev.value_at(t, x), coeffs) / coeffs.permeability(x); },
        quad);
    const SparseMatrix div = assemble_divergence(*rt_, *dg_, quad);
    auto source = [&](int, Vec2 x) {
        double q = coeffs.injection(x, t_next) - coeffs.production(x, t_next);
        if (data.pressure_source) {
            q += data.pressure_source(x, t_next);
        }
        return q;
    };
    const std::vector<double> load = assemble_dg_load(*dg_, source, config_.options.source_quad_degree);

    std::vector<double> fixed(rt_->n_dofs(), 0.0);
    if (data.boundary.flux_n) {
        // Same accuracy as the source so that both sides of the compatibility condition match.
        const int points = (config_.options.source_quad_degree + 2) / 2;
        fixed = rt_boundary_values(
            *rt_, [&](Vec2 x, Vec2 n) { return data.boundary.flux_n(x, n, t_next); }, points);
    }

    // Eliminate the essential normal-flux dofs.
    std::vector<int> free_map(rt_->n_dofs(), 0);
    for (int d : rt_->boundary_dofs()) {
        free_map[d] = -1;
    }
    std::vector<int> free_dofs;
    for (int d = 0; d < rt_->n_dofs(); ++d) {
        if (free_map[d] >= 0) {
            free_map[d] = static_cast<int>(free_dofs.size());
            free_dofs.push_back(d);
        }
    }
    const int n_free = static_cast<int>(free_dofs.size());
    std::vector<int> identity_rows(dg_->n_dofs());
    for (int i = 0; i < dg_->n_dofs(); ++i) {
        identity_rows[i] = i;
    }
    const SparseMatrix m_ff = extract_block(mass, free_map, free_map, n_free, n_free);
    const SparseMatrix b_f = extract_block(div, identity_rows, free_map, dg_->n_dofs(), n_free);

    std::vector<double> rhs_u(n_free, 0.0);
    std::vector<double> rhs_p = load;
    if (data.boundary.flux_n) {
        const std::vector<double> m_fixed = mass.multiply(fixed);
        const std::vector<double> b_fixed = div.multiply(fixed);
        for (int i = 0; i < n_free; ++i) {
            rhs_u[i] = -m_fixed[free_dofs[i]];
        }
        for (int a = 0; a < dg_->n_dofs(); ++a) {
            rhs_p[a] -= b_fixed[a];
        }
    }

    const SaddleSolution sol =
        solve_saddle(m_ff, b_f, rhs_u, rhs_p, mean_constraint_, config_.options.solver);

    // The bordered system carries +B^T p; the weak form has -(p, div v).
    std::vector<double> pressure(sol.p.size());
    for (std::size_t i = 0; i < pressure.size(); ++i) {
        pressure[i] = -sol.p[i];
    }
    PressureVelocity out{FieldRT{rt_, fixed}, FieldDG{dg_, std::move(pressure)}};
    for (int i = 0; i < n_free; ++i) {
        out.U.values[free_dofs[i]] = sol.u[i];
    }
    out.multiplier = sol.multiplier;
    out.pressure_mean = inner(mean_constraint_, out.P.values) / mesh.total_area();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double source_mean = load[dg_->dof(t, 0)] / mesh.area(t);
        out.divergence_balance = std::max(out.divergence_balance, std::abs(out.U.mean_divergence(t) - source_mean));
    }
    return out;
}

FieldP1 SemiImplicitScheme::step_concentration(const FieldP1& c_prev, const FieldRT& u_next, double t_next) const
{
    const auto& data = config_.problem;
    const auto& coeffs = data.coeffs;
    const int quad = config_.options.quad_degree;
    const double tau = config_.step_size();
    const double phi_over_tau = coeffs.porosity / tau;

    const SparseMatrix time_mass =
        assemble_p1_mass(*p1_, [&](int, Vec2) { return phi_over_tau; }, quad);
    const SparseMatrix reaction =
        assemble_p1_mass(*p1_, [&](int, Vec2 x) { return coeffs.production(x, t_next); }, quad);
    const SparseMatrix stiffness =
        assemble_p1_stiffness(*p1_, [&](int t, Vec2 x) { return eval_D(u_next.value_at(t, x), coeffs); }, quad);
    const SparseMatrix convection =
        assemble_p1_convection(*p1_, [&](int t, Vec2 x) { return u_next.value_at(t, x); }, quad);

    std::vector<Triplet> triplets;
    triplets.reserve(4 * time_mass.nonzeros());
    for (const SparseMatrix* m : {&time_mass, &reaction, &stiffness, &convection}) {
        for (int r = 0; r < m->rows(); ++r) {
            for (int k = m->row_offsets()[r]; k < m->row_offsets()[r + 1]; ++k) {
                triplets.push_back({r, m->columns()[k], m->values()[k]});
            }
        }
    }

    LinearSystem system;
    system.matrix = SparseMatrix::from_triplets(p1_->n_dofs(), p1_->n_dofs(), triplets);
    system.rhs = time_mass.multiply(c_prev.values);
    const std::vector<double> load = assemble_p1_load(
        *p1_,
        [&](int, Vec2 x) {
            double s = coeffs.injected_concentration(x, t_next) * coeffs.injection(x, t_next);
            if (data.concentration_source) {
                s += data.concentration_source(x, t_next);
            }
            return s;
        },
        quad);
    for (std::size_t i = 0; i < load.size(); ++i) {
        system.rhs[i] += load[i];
    }
    if (data.boundary.conc_flux_n) {
        const std::vector<double> boundary = assemble_p1_boundary_load(
            *p1_, [&](Vec2 x, Vec2 n) { return data.boundary.conc_flux_n(x, n, t_next); });
        for (std::size_t i = 0; i < boundary.size(); ++i) {
            system.rhs[i] += boundary[i];
        }
    }
    system.symmetric = false;
    system.settings = config_.options.solver;
    return FieldP1{p1_, solve(system)};
}

RunResult SemiImplicitScheme::run(const Observer& observer) const
{
    RunResult result;
    DiscreteState state = init_state();
    const int n_steps = config_.steps();
    const double tau = config_.step_size();
    if (config_.keep_trajectory) {
        result.trajectory.push_back(state);
    }
    for (int n = 0; n < n_steps; ++n) {
        const double t_next = (n + 1) * tau;
        StepDiagnostics diag;
        try {
            PressureVelocity pv = step_pressure_velocity(state.C, t_next);
            FieldP1 c_next = step_concentration(state.C, pv.U, t_next);
            diag.divergence_balance = pv.divergence_balance;
            diag.pressure_mean = pv.pressure_mean;
            state.U = std::move(pv.U);
            state.P = std::move(pv.P);
            state.C = std::move(c_next);
        } catch (const SingularSystem& e) {
            throw StepFailure(n + 1, e.what());
        } catch (const ConstraintViolation& e) {
            throw StepFailure(n + 1, e.what());
        }
        state.step = n + 1;
        state.time = t_next;
        diag.step = state.step;
        diag.time = t_next;
        for (double v : state.C.values) {
            diag.max_abs_c = std::max(diag.max_abs_c, std::abs(v));
        }
        if (!std::isfinite(diag.max_abs_c)) {
            throw StepFailure(n + 1, "concentration became non-finite");
        }
        if (observer) {
            observer(state, diag);
        }
        const bool last = n + 1 == n_steps;
        if (last || (config_.output_cadence > 0 && state.step % config_.output_cadence == 0)) {
            result.diagnostics.push_back(diag);
        }
        if (config_.keep_trajectory) {
            result.trajectory.push_back(state);
        }
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace miscible
