#include "miscible/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "miscible/mesh.hpp"
#include "miscible/quadrature.hpp"

namespace miscible {

Tensor2 eval_D(Vec2 u, const Coefficients& coeffs)
{
    if (coeffs.dispersion_override) {
        return coeffs.dispersion_override(u);
    }
    const double iso = coeffs.porosity * coeffs.molecular_diffusion + coeffs.dispersion_d1(u);
    const double d2 = coeffs.dispersion_d2(u);
    return {iso + d2 * u.x * u.x, d2 * u.x * u.y, iso + d2 * u.y * u.y};
}

double eval_mu(double c, const Coefficients& coeffs)
{
    return coeffs.viscosity(c);
}

Tensor2 scalar_dispersion_override(Vec2 u)
{
    const double s = norm(u);
    return Tensor2::identity(1.0 + s * s / (1.0 + s));
}

double quadratic_viscosity(double c)
{
    return 1.0 + c * c;
}

CoefficientCheck check_coefficients(const Coefficients& coeffs, const Mesh& mesh, double k0, double t)
{
    CoefficientCheck check;
    check.min_permeability = std::numeric_limits<double>::infinity();
    check.max_permeability = -std::numeric_limits<double>::infinity();
    auto sample = [&](Vec2 x) {
        const double k = coeffs.permeability(x);
        check.min_permeability = std::min(check.min_permeability, k);
        check.max_permeability = std::max(check.max_permeability, k);
    };
    for (const Vec2& v : mesh.vertices()) {
        sample(v);
    }
    for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
        sample(mesh.centroid(tri));
    }
    if (!(check.min_permeability >= 1.0 / k0 && check.max_permeability <= k0)) {
        check.ok = false;
    }

    const auto& rule = triangle_rule(kDefaultQuadratureDegree);
    double inj = 0.0;
    double prod = 0.0;
    for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
        const auto corners = mesh.corners(tri);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = rule.point(q, corners);
            inj += mesh.area(tri) * rule.weights[q] * coeffs.injection(x, t);
            prod += mesh.area(tri) * rule.weights[q] * coeffs.production(x, t);
        }
    }
    if (inj != 0.0 && prod != 0.0) {
        check.source_imbalance = std::abs(inj - prod) / std::max(std::abs(inj), std::abs(prod));
        if (check.source_imbalance > 1e-8) {
            check.ok = false;
        }
    }
    return check;
}

bool viscosity_bounded(const Coefficients& coeffs, std::span<const double> samples, double mu0)
{
    return std::all_of(samples.begin(), samples.end(), [&](double c) {
        const double mu = coeffs.viscosity(c);
        return mu >= 1.0 / mu0 && mu <= mu0;
    });
}

}  // namespace miscible
