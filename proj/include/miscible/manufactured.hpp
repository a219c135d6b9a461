#pragma once

#include <string>

#include "miscible/geometry.hpp"
#include "miscible/problem.hpp"

namespace miscible::manufactured {

// Closed-form solution used by both examples:
//   p = 1 + 1000 x^2 (1-x)^3 y^2 (1-y)^3 t^2 e^t
//   c = 0.1 + 50 x^2 (1-x)^2 y^2 (1-y)^2 t e^t
//   u = -grad p / mu(c),  mu(c) = 1 + c^2,  D(u) = (1 + |u|^2/(1+|u|)) I

[[nodiscard]] double exact_p(Vec2 x, double t);
[[nodiscard]] Vec2 exact_u(Vec2 x, double t);
[[nodiscard]] double exact_c(Vec2 x, double t);

[[nodiscard]] Vec2 grad_p(Vec2 x, double t);
[[nodiscard]] Vec2 grad_c(Vec2 x, double t);
[[nodiscard]] double dc_dt(Vec2 x, double t);

/// f = div u.
[[nodiscard]] double forcing_f(Vec2 x, double t);
/// g = c_t - div(D(u) grad c) + u . grad c.
[[nodiscard]] double forcing_g(Vec2 x, double t);

/// Normal fluxes u.n and D(u) grad c . n of the exact solution at time t.
[[nodiscard]] BoundaryData disk_boundary_data();
[[nodiscard]] double exact_flux_n(Vec2 x, Vec2 normal, double t);
[[nodiscard]] double exact_conc_flux_n(Vec2 x, Vec2 normal, double t);

enum class Domain { Square, Disk };

struct ManufacturedProblem {
    std::string name;
    Domain domain = Domain::Square;
    ProblemData data;
    SpaceTimeScalar exact_p;
    SpaceTimeVector exact_u;
    SpaceTimeScalar exact_c;
};

/// Unit square, homogeneous no-flow boundary conditions.
[[nodiscard]] ManufacturedProblem square_problem();
/// Disk of radius 0.5 about (0.5, 0.5) with the exact normal fluxes imposed.
[[nodiscard]] ManufacturedProblem disk_problem();
/// "ex51" or "ex52".
[[nodiscard]] ManufacturedProblem by_name(const std::string& name);

}  // namespace miscible::manufactured
