#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "miscible/linalg.hpp"
#include "miscible/manufactured.hpp"
#include "miscible/spaces.hpp"

using namespace miscible;

TEST(SparseMatrix, TripletsAreSortedAndSummed)
{
    const std::vector<Triplet> t{{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {1, 2, 4.0}, {0, 1, -2.0}};
    const SparseMatrix a = SparseMatrix::from_triplets(2, 3, t);
    EXPECT_EQ(a.nonzeros(), 3u);
    EXPECT_DOUBLE_EQ(a.at(1, 2), 5.0);
    EXPECT_DOUBLE_EQ(a.at(1, 0), 3.0);
    EXPECT_DOUBLE_EQ(a.at(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(a.at(0, 0), 0.0);
    for (int r = 0; r < a.rows(); ++r) {
        for (int k = a.row_offsets()[r] + 1; k < a.row_offsets()[r + 1]; ++k) {
            EXPECT_LT(a.columns()[k - 1], a.columns()[k]);
        }
    }
    const auto y = a.multiply(std::vector<double>{1, 1, 1});
    EXPECT_DOUBLE_EQ(y[0], 0.0);
    EXPECT_DOUBLE_EQ(y[1], 8.0);
    EXPECT_DOUBLE_EQ(a.transpose().at(2, 1), 5.0);
}

TEST(SparseMatrix, RejectsBadInput)
{
    const std::vector<Triplet> out_of_range{{0, 3, 1.0}};
    EXPECT_THROW((void)SparseMatrix::from_triplets(2, 2, out_of_range), std::invalid_argument);
    const std::vector<Triplet> nan{{0, 0, std::nan("")}};
    EXPECT_THROW((void)SparseMatrix::from_triplets(2, 2, nan), std::invalid_argument);
}

TEST(Solve, IdentityReturnsRhs)
{
    LinearSystem s{SparseMatrix::identity(5), {1, -2, 3, 0.5, 7}, true, {}};
    EXPECT_EQ(solve(s), s.rhs);
    s.settings.kind = SolverKind::Iterative;
    const auto x = solve(s);
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(x[i], s.rhs[i], 1e-12);
    }
}

TEST(Solve, DiagonalTwoByTwo)
{
    const std::vector<Triplet> t{{0, 0, 2.0}, {1, 1, 4.0}};
    const LinearSystem s{SparseMatrix::from_triplets(2, 2, t), {2, 8}, true, {}};
    const auto x = solve(s);
    EXPECT_NEAR(x[0], 1.0, 1e-15);
    EXPECT_NEAR(x[1], 2.0, 1e-15);
}

TEST(Solve, ZeroRhsGivesZero)
{
    const std::vector<Triplet> t{{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}};
    const LinearSystem s{SparseMatrix::from_triplets(2, 2, t), {0, 0}, true, {}};
    for (double v : solve(s)) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Solve, SingularMatrixIsReported)
{
    const std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}};
    const LinearSystem s{SparseMatrix::from_triplets(2, 2, t), {1, 0}, false, {}};
    EXPECT_THROW((void)solve(s), SingularSystem);
    try {
        (void)solve(s);
    } catch (const SingularSystem& e) {
        EXPECT_GT(e.achieved_residual(), 1e-10);
    }
}

TEST(Solve, NonsymmetricIterativeMatchesDirect)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 40;
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 6.0});
        t.push_back({i, (i + 1) % n, u(rng)});
        t.push_back({(i + 3) % n, i, u(rng)});
    }
    std::vector<double> b(n);
    for (auto& v : b) {
        v = u(rng);
    }
    LinearSystem s{SparseMatrix::from_triplets(n, n, t), b, false, {}};
    const auto direct = solve(s);
    EXPECT_LE(relative_residual(s.matrix, direct, b), 1e-10);
    s.settings.kind = SolverKind::Iterative;
    const auto iterative = solve(s);
    EXPECT_LE(relative_residual(s.matrix, iterative, b), 1e-10);
    for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(direct[i], iterative[i], 1e-9);
    }
}

TEST(Solve, DeterministicForIdenticalInput)
{
    const auto mesh = std::make_shared<const Mesh>(generate_unit_square_mesh(6));
    const auto space = std::make_shared<const LagrangeSpace>(mesh);
    const SparseMatrix k = assemble_p1_stiffness(*space, [](int, Vec2) { return Tensor2::identity(); });
    const SparseMatrix m = assemble_p1_mass(*space, [](int, Vec2) { return 1.0; });
    std::vector<Triplet> t;
    for (int r = 0; r < k.rows(); ++r) {
        for (int c = 0; c < k.rows(); ++c) {
            const double v = k.at(r, c) + m.at(r, c);
            if (v != 0.0) {
                t.push_back({r, c, v});
            }
        }
    }
    std::vector<double> b(k.rows());
    std::iota(b.begin(), b.end(), 0.0);
    const LinearSystem s{SparseMatrix::from_triplets(k.rows(), k.rows(), t), b, true, {}};
    EXPECT_EQ(solve(s), solve(s));
}

namespace {

struct SaddleBlocks {
    SparseMatrix m;
    SparseMatrix b;
    std::vector<double> rhs_u;
    std::vector<double> rhs_p;
    std::vector<double> mean;
};

// Darcy blocks for the manufactured problem at t, boundary fluxes eliminated.
SaddleBlocks darcy_blocks(int cells, int order, double t)
{
    const auto mesh = std::make_shared<const Mesh>(generate_unit_square_mesh(cells));
    const auto rt = std::make_shared<const RTSpace>(mesh, order);
    const auto dg = std::make_shared<const DGSpace>(mesh, order);
    const SparseMatrix mass = assemble_rt_mass(*rt, [&](int, Vec2 x) {
        return quadratic_viscosity(manufactured::exact_c(x, 0.0));
    });
    const SparseMatrix div = assemble_divergence(*rt, *dg);
    std::vector<int> map(rt->n_dofs(), 0);
    for (int d : rt->boundary_dofs()) {
        map[d] = -1;
    }
    int n_free = 0;
    for (int& v : map) {
        if (v >= 0) {
            v = n_free++;
        }
    }
    std::vector<int> rows(dg->n_dofs());
    std::iota(rows.begin(), rows.end(), 0);
    SaddleBlocks s;
    s.m = extract_block(mass, map, map, n_free, n_free);
    s.b = extract_block(div, rows, map, dg->n_dofs(), n_free);
    s.rhs_u.assign(n_free, 0.0);
    s.rhs_p = assemble_dg_load(*dg, [&](int, Vec2 x) { return manufactured::forcing_f(x, t); }, 14);
    s.mean = dg->basis_integrals();
    return s;
}

double bordered_residual(const SaddleBlocks& s, const SaddleSolution& x)
{
    auto mu = s.m.multiply(x.u);
    const auto btp = s.b.transpose().multiply(x.p);
    const auto bu = s.b.multiply(x.u);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        num += std::pow(mu[i] + btp[i] - s.rhs_u[i], 2);
        den += s.rhs_u[i] * s.rhs_u[i];
    }
    for (std::size_t a = 0; a < bu.size(); ++a) {
        num += std::pow(bu[a] + s.mean[a] * x.multiplier - s.rhs_p[a], 2);
        den += s.rhs_p[a] * s.rhs_p[a];
    }
    const double mean = inner(s.mean, x.p);
    num += mean * mean;
    return std::sqrt(num / den);
}

}  // namespace

TEST(SolveSaddle, MultiplyBackOnManufacturedStep)
{
    for (int cells : {4, 8}) {
        for (int order : {0, 1}) {
            const SaddleBlocks s = darcy_blocks(cells, order, 0.125);
            const SaddleSolution x = solve_saddle(s.m, s.b, s.rhs_u, s.rhs_p, s.mean);
            EXPECT_LE(bordered_residual(s, x), 1e-10) << cells << " order " << order;
            EXPECT_LE(std::abs(inner(s.mean, x.p)), 1e-10);
            SolverSettings iterative;
            iterative.kind = SolverKind::Iterative;
            const SaddleSolution y = solve_saddle(s.m, s.b, s.rhs_u, s.rhs_p, s.mean, iterative);
            EXPECT_LE(bordered_residual(s, y), 1e-9) << cells << " order " << order;
        }
    }
}

TEST(SolveSaddle, ZeroDataGivesZeroSolution)
{
    SaddleBlocks s = darcy_blocks(4, 1, 0.0);
    std::fill(s.rhs_p.begin(), s.rhs_p.end(), 0.0);
    const SaddleSolution x = solve_saddle(s.m, s.b, s.rhs_u, s.rhs_p, s.mean);
    for (double v : x.u) {
        EXPECT_EQ(v, 0.0);
    }
    for (double v : x.p) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(SolveSaddle, PermutationEquivariance)
{
    const SaddleBlocks s = darcy_blocks(4, 1, 0.5);
    const SaddleSolution x = solve_saddle(s.m, s.b, s.rhs_u, s.rhs_p, s.mean);

    std::mt19937 rng(11);
    std::vector<int> pu(s.m.rows());
    std::vector<int> pp(s.b.rows());
    std::iota(pu.begin(), pu.end(), 0);
    std::iota(pp.begin(), pp.end(), 0);
    std::shuffle(pu.begin(), pu.end(), rng);
    std::shuffle(pp.begin(), pp.end(), rng);

    const SparseMatrix m = extract_block(s.m, pu, pu, s.m.rows(), s.m.cols());
    const SparseMatrix b = extract_block(s.b, pp, pu, s.b.rows(), s.b.cols());
    std::vector<double> rhs_u(pu.size());
    std::vector<double> rhs_p(pp.size());
    std::vector<double> mean(pp.size());
    for (std::size_t i = 0; i < pu.size(); ++i) {
        rhs_u[pu[i]] = s.rhs_u[i];
    }
    for (std::size_t a = 0; a < pp.size(); ++a) {
        rhs_p[pp[a]] = s.rhs_p[a];
        mean[pp[a]] = s.mean[a];
    }
    const SaddleSolution y = solve_saddle(m, b, rhs_u, rhs_p, mean);
    double scale = 0.0;
    for (double v : x.u) {
        scale = std::max(scale, std::abs(v));
    }
    for (std::size_t i = 0; i < pu.size(); ++i) {
        EXPECT_NEAR(y.u[pu[i]], x.u[i], 1e-12 * std::max(1.0, scale));
    }
    for (std::size_t a = 0; a < pp.size(); ++a) {
        EXPECT_NEAR(y.p[pp[a]], x.p[a], 1e-12);
    }
}

TEST(SolveSaddle, MassBlockIsSymmetricPositiveDefinite)
{
    const SaddleBlocks s = darcy_blocks(4, 1, 0.5);
    EXPECT_LE(s.m.asymmetry(), 1e-14);
    const int n = s.m.rows();
    const auto dense = s.m.to_dense();
    const Eigen::MatrixXd a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        dense.data(), n, n);
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    EXPECT_EQ(llt.info(), Eigen::Success);
}
