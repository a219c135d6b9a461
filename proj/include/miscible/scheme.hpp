#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "miscible/linalg.hpp"
#include "miscible/mesh.hpp"
#include "miscible/problem.hpp"
#include "miscible/spaces.hpp"

namespace miscible {

/// Solver failure inside a time step; carries the step index.
class StepFailure : public std::runtime_error {
public:
    StepFailure(int step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step)
    {
    }
    [[nodiscard]] int step() const { return step_; }

private:
    int step_;
};

struct SchemeOptions {
    /// 1: RT1 velocity with discontinuous P1 pressure; 0: RT0 with P0.
    int mixed_order = 1;
    int quad_degree = kDefaultQuadratureDegree;
    /// Rule for the pressure source load and, through a Gauss rule of the
    /// same degree, for imposed boundary fluxes. The per-element mass balance
    /// is only as good as the global compatibility of these integrals, so it
    /// is taken well above the assembly degree.
    int source_quad_degree = 14;
    SolverSettings solver;
};

struct RunConfig {
    double tau = 0.0;
    double final_time = 1.0;
    MeshPtr mesh;
    ProblemData problem;
    SchemeOptions options;
    /// Record diagnostics every `output_cadence` steps (and always the last).
    int output_cadence = 1;
    bool keep_trajectory = false;

    /// N = round(T / tau).
    [[nodiscard]] int steps() const;
    /// T / N, the step actually taken.
    [[nodiscard]] double step_size() const { return final_time / steps(); }
    void validate() const;
};

struct DiscreteState {
    int step = 0;
    double time = 0.0;
    FieldP1 C;
    std::optional<FieldRT> U;
    std::optional<FieldDG> P;
};

struct PressureVelocity {
    FieldRT U;
    FieldDG P;
    /// max over triangles of |mean div U - mean source|.
    double divergence_balance = 0.0;
    /// (1/|Omega|) * integral of P.
    double pressure_mean = 0.0;
    /// Lagrange multiplier of the mean constraint (absorbs source incompatibility).
    double multiplier = 0.0;
};

struct StepDiagnostics {
    int step = 0;
    double time = 0.0;
    double max_abs_c = 0.0;
    double divergence_balance = 0.0;
    double pressure_mean = 0.0;
};

struct RunResult {
    DiscreteState final_state;
    std::vector<StepDiagnostics> diagnostics;
    std::vector<DiscreteState> trajectory;
};

/// Linearised semi-implicit Euler time stepper with a Galerkin P1
/// concentration and a mixed Raviart-Thomas pressure/velocity pair. Each step
/// solves the Darcy system with the viscosity lagged at C^n, then the
/// concentration equation with the new velocity; both solves are linear.
class SemiImplicitScheme {
public:
    explicit SemiImplicitScheme(RunConfig config);

    [[nodiscard]] const RunConfig& config() const { return config_; }
    [[nodiscard]] const LagrangeSpacePtr& concentration_space() const { return p1_; }
    [[nodiscard]] const RTSpacePtr& velocity_space() const { return rt_; }
    [[nodiscard]] const DGSpacePtr& pressure_space() const { return dg_; }

    /// C^0 is the nodal interpolant of the initial concentration.
    [[nodiscard]] DiscreteState init_state() const;

    [[nodiscard]] PressureVelocity step_pressure_velocity(const FieldP1& c_prev, double t_next) const;

    [[nodiscard]] FieldP1 step_concentration(const FieldP1& c_prev, const FieldRT& u_next, double t_next) const;

    using Observer = std::function<void(const DiscreteState&, const StepDiagnostics&)>;

    /// Runs N steps; `observer` sees every step regardless of cadence.
    [[nodiscard]] RunResult run(const Observer& observer = {}) const;

private:
    RunConfig config_;
    LagrangeSpacePtr p1_;
    DGSpacePtr dg_;
    RTSpacePtr rt_;
    std::vector<double> mean_constraint_;
};

}  // namespace miscible
