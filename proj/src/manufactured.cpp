#include "miscible/manufactured.hpp"

#include <cmath>
#include <stdexcept>

namespace miscible::manufactured {

namespace {

// x^2 (1-x)^3 and its first two derivatives (pressure profile).
double pa(double x) { return x * x * (1 - x) * (1 - x) * (1 - x); }
double pa1(double x) { return 2 * x * (1 - x) * (1 - x) * (1 - x) - 3 * x * x * (1 - x) * (1 - x); }
double pa2(double x) { return 2 * (1 - x) * (1 - x) * (1 - x) - 12 * x * (1 - x) * (1 - x) + 6 * x * x * (1 - x); }

// x^2 (1-x)^2 and its first two derivatives (concentration profile).
double cb(double x) { return x * x * (1 - x) * (1 - x); }
double cb1(double x) { return 2 * x * (1 - x) * (1 - 2 * x); }
double cb2(double x) { return 2 - 12 * x + 12 * x * x; }

double p_time(double t) { return t * t * std::exp(t); }
double c_time(double t) { return t * std::exp(t); }

struct Derivatives {
    double c;
    Vec2 grad_c;
    double c_xx, c_yy;
    Vec2 grad_p;
    double p_xx, p_xy, p_yy;
};

Derivatives derivatives(Vec2 x, double t)
{
    const double tp = 1000.0 * p_time(t);
    const double tc = 50.0 * c_time(t);
    Derivatives d{};
    d.c = 0.1 + tc * cb(x.x) * cb(x.y);
    d.grad_c = {tc * cb1(x.x) * cb(x.y), tc * cb(x.x) * cb1(x.y)};
    d.c_xx = tc * cb2(x.x) * cb(x.y);
    d.c_yy = tc * cb(x.x) * cb2(x.y);
    d.grad_p = {tp * pa1(x.x) * pa(x.y), tp * pa(x.x) * pa1(x.y)};
    d.p_xx = tp * pa2(x.x) * pa(x.y);
    d.p_xy = tp * pa1(x.x) * pa1(x.y);
    d.p_yy = tp * pa(x.x) * pa2(x.y);
    return d;
}

// Velocity and its Jacobian du[i][j] = d u_i / d x_j.
struct VelocityJet {
    Vec2 u;
    double du[2][2];
};

VelocityJet velocity_jet(const Derivatives& d)
{
    const double mu = 1.0 + d.c * d.c;
    const double dmu = 2.0 * d.c;
    const double p[2] = {d.grad_p.x, d.grad_p.y};
    const double pp[2][2] = {{d.p_xx, d.p_xy}, {d.p_xy, d.p_yy}};
    const double cg[2] = {d.grad_c.x, d.grad_c.y};
    VelocityJet jet{};
    jet.u = {-p[0] / mu, -p[1] / mu};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            jet.du[i][j] = -pp[i][j] / mu + p[i] * dmu * cg[j] / (mu * mu);
        }
    }
    return jet;
}

double dispersion(double s)
{
    return 1.0 + s / (1.0 + std::sqrt(s));
}

// dD/ds with s = |u|^2; finite at s = 0.
double dispersion_slope(double s)
{
    const double r = std::sqrt(s);
    return (1.0 + 0.5 * r) / ((1.0 + r) * (1.0 + r));
}

}  // namespace

double exact_p(Vec2 x, double t)
{
    return 1.0 + 1000.0 * pa(x.x) * pa(x.y) * p_time(t);
}

double exact_c(Vec2 x, double t)
{
    return 0.1 + 50.0 * cb(x.x) * cb(x.y) * c_time(t);
}

Vec2 grad_p(Vec2 x, double t)
{
    return derivatives(x, t).grad_p;
}

Vec2 grad_c(Vec2 x, double t)
{
    return derivatives(x, t).grad_c;
}

double dc_dt(Vec2 x, double t)
{
    return 50.0 * cb(x.x) * cb(x.y) * (1.0 + t) * std::exp(t);
}

Vec2 exact_u(Vec2 x, double t)
{
    const double c = exact_c(x, t);
    return -grad_p(x, t) / (1.0 + c * c);
}

double forcing_f(Vec2 x, double t)
{
    const auto jet = velocity_jet(derivatives(x, t));
    return jet.du[0][0] + jet.du[1][1];
}

double forcing_g(Vec2 x, double t)
{
    const Derivatives d = derivatives(x, t);
    const auto jet = velocity_jet(d);
    const double s = norm2(jet.u);
    const double big_d = dispersion(s);
    const double slope = dispersion_slope(s);
    const Vec2 grad_d{2.0 * slope * (jet.u.x * jet.du[0][0] + jet.u.y * jet.du[1][0]),
                      2.0 * slope * (jet.u.x * jet.du[0][1] + jet.u.y * jet.du[1][1])};
    const double div_flux = big_d * (d.c_xx + d.c_yy) + dot(grad_d, d.grad_c);
    return dc_dt(x, t) - div_flux + dot(jet.u, d.grad_c);
}

double exact_flux_n(Vec2 x, Vec2 normal, double t)
{
    return dot(exact_u(x, t), normal);
}

double exact_conc_flux_n(Vec2 x, Vec2 normal, double t)
{
    const Vec2 u = exact_u(x, t);
    return dispersion(norm2(u)) * dot(grad_c(x, t), normal);
}

BoundaryData disk_boundary_data()
{
    return {exact_flux_n, exact_conc_flux_n};
}

namespace {

ManufacturedProblem base_problem()
{
    ManufacturedProblem problem;
    auto& coeffs = problem.data.coeffs;
    coeffs.viscosity = quadratic_viscosity;
    coeffs.dispersion_override = scalar_dispersion_override;
    coeffs.porosity = 1.0;
    problem.data.pressure_source = forcing_f;
    problem.data.concentration_source = forcing_g;
    problem.data.initial_concentration = [](Vec2 x) { return exact_c(x, 0.0); };
    problem.exact_p = exact_p;
    problem.exact_u = exact_u;
    problem.exact_c = exact_c;
    return problem;
}

}  // namespace

ManufacturedProblem square_problem()
{
    ManufacturedProblem problem = base_problem();
    problem.name = "ex51";
    problem.domain = Domain::Square;
    problem.data.boundary = BoundaryData::homogeneous();
    return problem;
}

ManufacturedProblem disk_problem()
{
    ManufacturedProblem problem = base_problem();
    problem.name = "ex52";
    problem.domain = Domain::Disk;
    problem.data.boundary = disk_boundary_data();
    return problem;
}

ManufacturedProblem by_name(const std::string& name)
{
    if (name == "ex51") {
        return square_problem();
    }
    if (name == "ex52") {
        return disk_problem();
    }
    throw std::invalid_argument("unknown problem '" + name + "' (expected ex51 or ex52)");
}

}  // namespace miscible::manufactured
