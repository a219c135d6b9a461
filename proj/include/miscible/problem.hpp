#pragma once

#include <functional>
#include <optional>
#include <span>

#include "miscible/geometry.hpp"

namespace miscible {

class Mesh;

/// Physical data of the miscible displacement model:
///   Phi c_t - div(D(u) grad c) + u . grad c = c_hat q_I - c q_P
///   div u = q_I - q_P
///   u = -(k / mu(c)) grad p
struct Coefficients {
    ScalarFunction permeability = [](Vec2) { return 1.0; };
    std::function<double(double)> viscosity = [](double) { return 1.0; };
    double porosity = 1.0;
    double molecular_diffusion = 1.0;
    /// Mechanical dispersion D*(u) = d1(u) I + d2(u) u (x) u.
    std::function<double(Vec2)> dispersion_d1 = [](Vec2) { return 0.0; };
    std::function<double(Vec2)> dispersion_d2 = [](Vec2) { return 0.0; };
    SpaceTimeScalar injection = [](Vec2, double) { return 0.0; };
    SpaceTimeScalar production = [](Vec2, double) { return 0.0; };
    SpaceTimeScalar injected_concentration = [](Vec2, double) { return 0.0; };
    /// Closed-form replacement for the whole tensor D(u).
    std::function<Tensor2(Vec2)> dispersion_override;
};

/// Boundary data: the normal Darcy flux u.n and the normal diffusive flux
/// D(u) grad c . n, each as a function of (x, outward normal, t).
struct BoundaryData {
    std::function<double(Vec2, Vec2, double)> flux_n;
    std::function<double(Vec2, Vec2, double)> conc_flux_n;

    /// u.n = 0 and D(u) grad c . n = 0.
    static BoundaryData homogeneous() { return {}; }
    [[nodiscard]] bool is_homogeneous() const { return !flux_n && !conc_flux_n; }
};

/// Everything the time stepper needs to know about one problem instance.
/// The optional extra sources are added to the right-hand sides of the
/// pressure and concentration equations (manufactured forcing f and g).
struct ProblemData {
    Coefficients coeffs;
    BoundaryData boundary;
    SpaceTimeScalar pressure_source;
    SpaceTimeScalar concentration_source;
    ScalarFunction initial_concentration = [](Vec2) { return 0.0; };
};

/// Diffusion-dispersion tensor Phi d_m I + d1(u) I + d2(u) u (x) u, or the
/// override when one is set.
[[nodiscard]] Tensor2 eval_D(Vec2 u, const Coefficients& coeffs);
[[nodiscard]] double eval_mu(double c, const Coefficients& coeffs);

/// D(u) = (1 + |u|^2 / (1 + |u|)) I.
[[nodiscard]] Tensor2 scalar_dispersion_override(Vec2 u);
/// mu(c) = 1 + c^2.
[[nodiscard]] double quadratic_viscosity(double c);

struct CoefficientCheck {
    bool ok = true;
    double min_permeability = 0.0;
    double max_permeability = 0.0;
    double source_imbalance = 0.0;
};

/// Samples k at the mesh vertices and centroids against [1/k0, k0] and
/// checks int q_I = int q_P at time t by quadrature when both are nonzero.
[[nodiscard]] CoefficientCheck check_coefficients(const Coefficients& coeffs, const Mesh& mesh, double k0,
                                                  double t = 0.0);

/// Checks mu over the given concentration samples against [1/mu0, mu0].
[[nodiscard]] bool viscosity_bounded(const Coefficients& coeffs, std::span<const double> samples, double mu0);

}  // namespace miscible
