#include <gtest/gtest.h>

#include <random>

#include "miscible/manufactured.hpp"
#include "miscible/mesh.hpp"
#include "miscible/quadrature.hpp"
#include "oracle.hpp"

using namespace miscible;
namespace mf = miscible::manufactured;

TEST(Manufactured, ClosedFormValues)
{
    for (double y : {0.0, 0.3, 0.9}) {
        for (double t : {0.0, 0.5, 1.0}) {
            EXPECT_EQ(mf::exact_p({0.0, y}, t), 1.0);
        }
    }
    // 0.1 + 50 * 0.0625^2 * e, evaluated in 40-digit decimal arithmetic.
    EXPECT_NEAR(mf::exact_c({0.5, 0.5}, 1.0), 0.6309144196209073, 1e-15);
    EXPECT_EQ(mf::exact_c({0.37, 0.81}, 0.0), 0.1);
}

TEST(Manufactured, AgreesWithTypedInFields)
{
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Vec2 x{u(rng), u(rng)};
        const double t = u(rng);
        EXPECT_NEAR(mf::exact_p(x, t), oracle::p(x, t), 1e-14);
        EXPECT_NEAR(mf::exact_c(x, t), oracle::c(x, t), 1e-14);
    }
}

TEST(Manufactured, NoFlowOnSquareBoundary)
{
    for (double s = 0.0; s <= 1.0; s += 0.0625) {
        for (double t : {0.3, 1.0}) {
            EXPECT_NEAR(dot(mf::exact_u({0, s}, t), {-1, 0}), 0.0, 1e-14);
            EXPECT_NEAR(dot(mf::exact_u({1, s}, t), {1, 0}), 0.0, 1e-14);
            EXPECT_NEAR(dot(mf::exact_u({s, 0}, t), {0, -1}), 0.0, 1e-14);
            EXPECT_NEAR(dot(mf::exact_u({s, 1}, t), {0, 1}), 0.0, 1e-14);
            EXPECT_NEAR(mf::grad_c({0, s}, t).x, 0.0, 1e-14);
            EXPECT_NEAR(mf::grad_c({s, 1}, t).y, 0.0, 1e-14);
        }
    }
}

TEST(Manufactured, VelocityIsDarcyLawOfThePressure)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 200; ++i) {
        const Vec2 x{u(rng), u(rng)};
        const double t = u(rng);
        const Vec2 closed = mf::exact_u(x, t);
        for (int k = 0; k < 2; ++k) {
            const double got = k == 0 ? closed.x : closed.y;
            const double mismatch = oracle::fd_mismatch(got, [&](double h) {
                const Vec2 fd = oracle::u(x, t, h);
                return k == 0 ? fd.x : fd.y;
            });
            EXPECT_LE(mismatch, 1e-6) << x.x << "," << x.y << " t=" << t;
        }
    }
}

TEST(Manufactured, ForcingMatchesFiniteDifferences)
{
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (double t : {0.25, 0.5, 1.0}) {
        for (int i = 0; i < 200; ++i) {
            const Vec2 x{u(rng), u(rng)};
            EXPECT_LE(oracle::fd_mismatch(mf::forcing_f(x, t), [&](double h) { return oracle::f(x, t, h); }), 1e-6)
                << x.x << "," << x.y << " t=" << t;
            EXPECT_LE(oracle::fd_mismatch(mf::forcing_g(x, t), [&](double h) { return oracle::g(x, t, h); }), 1e-6)
                << x.x << "," << x.y << " t=" << t;
        }
    }
}

TEST(Manufactured, ForcingAtNamedPoints)
{
    EXPECT_TRUE(std::isfinite(mf::forcing_f({0, 0}, 1.0)));
    EXPECT_NEAR(mf::forcing_f({0, 0}, 1.0), oracle::f({0, 0}, 1.0, 1e-3), 1e-9);
    EXPECT_LE(oracle::fd_mismatch(mf::forcing_g({0.3, 0.7}, 1.0), [](double h) { return oracle::g({0.3, 0.7}, 1.0, h); }),
              1e-6);
}

TEST(Manufactured, ConcentrationForcingAtTimeZeroIsTimeDerivative)
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const Vec2 x{u(rng), u(rng)};
        const double profile = 50.0 * x.x * x.x * (1 - x.x) * (1 - x.x) * x.y * x.y * (1 - x.y) * (1 - x.y);
        EXPECT_NEAR(mf::forcing_g(x, 0.0), profile, 1e-14);
        EXPECT_NEAR(mf::dc_dt(x, 0.0), profile, 1e-14);
        EXPECT_NEAR(mf::forcing_g(x, 1e-8), oracle::g(x, 1e-8, 1e-4), 1e-7);
    }
}

TEST(Manufactured, DiskBoundaryDataVanishesAtTimeZero)
{
    const auto b = mf::disk_boundary_data();
    ASSERT_TRUE(b.flux_n && b.conc_flux_n);
    for (int k = 0; k < 32; ++k) {
        const double a = 2.0 * M_PI * k / 32;
        const Vec2 n{std::cos(a), std::sin(a)};
        const Vec2 x = Vec2{0.5, 0.5} + 0.5 * n;
        EXPECT_EQ(b.flux_n(x, n, 0.0), 0.0);
        EXPECT_EQ(b.conc_flux_n(x, n, 0.0), 0.0);
    }
}

TEST(Manufactured, DiskBoundaryFluxBalancesSource)
{
    const Mesh mesh = generate_disk_mesh(64);
    const double t = 1.0;
    const auto& rule = triangle_rule(14);
    double volume = 0.0;
    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const auto c = mesh.corners(k);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            volume += mesh.area(k) * rule.weights[q] * mf::forcing_f(rule.point(q, c), t);
        }
    }
    const LineRule line = gauss_legendre(8);
    double boundary = 0.0;
    for (int e : mesh.boundary_edges()) {
        const Vec2 a = mesh.vertex(mesh.edge(e)[0]);
        const Vec2 b = mesh.vertex(mesh.edge(e)[1]);
        // Orient the normal outward.
        Vec2 n = mesh.edge_normal(e);
        if (dot(n, 0.5 * (a + b) - Vec2{0.5, 0.5}) < 0) {
            n = -n;
        }
        for (std::size_t q = 0; q < line.size(); ++q) {
            const Vec2 x = a + line.points[q] * (b - a);
            boundary += mesh.edge_length(e) * line.weights[q] * mf::exact_flux_n(x, n, t);
        }
    }
    EXPECT_NEAR(boundary, volume, 1e-8 * std::max(1.0, std::abs(volume)));
    EXPECT_GT(std::abs(volume), 1e-4);
}

TEST(Manufactured, ConcentrationFluxContinuousAlongBoundary)
{
    // Jumps between neighbouring samples shrink in proportion to the spacing.
    auto worst_jump = [](int n) {
        auto flux = [&](int k) {
            const double a = 2.0 * M_PI * k / n;
            const Vec2 nn{std::cos(a), std::sin(a)};
            return mf::exact_conc_flux_n(Vec2{0.5, 0.5} + 0.5 * nn, nn, 1.0);
        };
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(flux(k + 1) - flux(k)));
        }
        return worst;
    };
    const double coarse = worst_jump(2048);
    const double fine = worst_jump(4096);
    EXPECT_GT(coarse, 0.0);
    EXPECT_NEAR(fine / coarse, 0.5, 0.05);
}

TEST(Manufactured, ProblemsByName)
{
    EXPECT_EQ(mf::by_name("ex51").domain, mf::Domain::Square);
    EXPECT_TRUE(mf::by_name("ex51").data.boundary.is_homogeneous());
    EXPECT_EQ(mf::by_name("ex52").domain, mf::Domain::Disk);
    EXPECT_FALSE(mf::by_name("ex52").data.boundary.is_homogeneous());
    EXPECT_THROW((void)mf::by_name("ex53"), std::invalid_argument);
    const auto p = mf::square_problem();
    EXPECT_DOUBLE_EQ(p.data.initial_concentration({0.4, 0.4}), 0.1);
    EXPECT_DOUBLE_EQ(p.data.coeffs.viscosity(2.0), 5.0);
}
