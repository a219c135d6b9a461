#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "miscible/harness.hpp"
#include "miscible/manufactured.hpp"

using namespace miscible;

TEST(Rate, PairwiseExamples)
{
    EXPECT_DOUBLE_EQ(rate(0.4, 0.1), 2.0);
    EXPECT_NEAR(rate(0.2024, 0.05264), 1.943, 5e-4);
    EXPECT_EQ(rate(0.3, 0.3), 0.0);
    EXPECT_NEAR(rate(0.9, 0.1, 3.0, 1.0), 2.0, 1e-15);
    EXPECT_THROW((void)rate(0.0, 0.1), UndefinedRate);
    EXPECT_THROW((void)rate(0.1, -1.0), UndefinedRate);
    EXPECT_THROW((void)rate(0.1, 0.05, 1.0, 1.0), UndefinedRate);
}

TEST(Rate, LeastSquaresOverTableOne)
{
    const std::vector<double> h{1.0 / 8, 1.0 / 16, 1.0 / 32};
    EXPECT_NEAR(regression_rate(h, {2.024e-1, 5.264e-2, 1.333e-2}), 1.96, 0.01);
    EXPECT_NEAR(regression_rate(h, {7.114e-2, 1.713e-2, 4.070e-3}), 2.06, 0.01);
    EXPECT_NEAR(regression_rate({1, 2, 4}, {1, 4, 16}), 2.0, 1e-14);
    EXPECT_THROW((void)regression_rate({1.0}, {1.0}), UndefinedRate);
    EXPECT_THROW((void)regression_rate({1.0, 1.0}, {1.0, 2.0}), UndefinedRate);
    EXPECT_THROW((void)regression_rate({1.0, 2.0}, {0.0, 2.0}), UndefinedRate);
}

TEST(FormatSci, PaperStyle)
{
    EXPECT_EQ(format_sci(0.2024), "2.024E-01");
    EXPECT_EQ(format_sci(4.07e-3), "4.070E-03");
    EXPECT_EQ(format_sci(12346.0), "1.235E+04");
    EXPECT_EQ(format_sci(std::nan("")), "NaN");
}

namespace {

MeshPtr square(int m)
{
    return std::make_shared<const Mesh>(generate_unit_square_mesh(m));
}

}  // namespace

TEST(L2Error, ZeroForReproducedFields)
{
    const auto mesh = square(4);
    const auto p1 = std::make_shared<const LagrangeSpace>(mesh);
    EXPECT_LE(l2_error(interpolate_p1([](Vec2 x) { return x.x; }, p1), [](Vec2 x) { return x.x; }), 1e-12);
    const FieldP1 zero{p1, std::vector<double>(p1->n_dofs(), 0.0)};
    EXPECT_EQ(l2_error(zero, [](Vec2) { return 0.0; }), 0.0);
    EXPECT_NEAR(l2_error(zero, [](Vec2) { return 2.0; }), 2.0, 1e-14);
}

TEST(L2Error, InterpolationErrorIsSecondOrder)
{
    std::vector<double> h;
    std::vector<double> e;
    auto c = [](Vec2 x) { return manufactured::exact_c(x, 1.0); };
    for (int m : {8, 16, 32}) {
        const auto mesh = square(m);
        h.push_back(mesh->h_max());
        e.push_back(l2_error(interpolate_p1(c, std::make_shared<const LagrangeSpace>(mesh)), c));
        EXPECT_GT(e.back(), 0.0);
    }
    EXPECT_NEAR(regression_rate(h, e), 2.0, 0.1);
}

TEST(L2Error, IsANormOnEachSpace)
{
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto mesh = std::make_shared<const Mesh>(generate_disk_mesh(16));
    const auto p1 = std::make_shared<const LagrangeSpace>(mesh);
    const auto rt = std::make_shared<const RTSpace>(mesh, 1);
    const auto dg = std::make_shared<const DGSpace>(mesh, 1);
    auto random = [&](int n) {
        std::vector<double> v(n);
        for (auto& x : v) {
            x = u(rng);
        }
        return v;
    };
    for (int trial = 0; trial < 5; ++trial) {
        const FieldP1 a{p1, random(p1->n_dofs())};
        const FieldP1 b{p1, random(p1->n_dofs())};
        FieldP1 sum = a;
        FieldP1 scaled = a;
        for (std::size_t i = 0; i < sum.values.size(); ++i) {
            sum.values[i] += b.values[i];
            scaled.values[i] *= -3.0;
        }
        auto zero = [](Vec2) { return 0.0; };
        const double na = l2_error(a, zero);
        EXPECT_GT(na, 0.0);
        EXPECT_LE(l2_error(sum, zero), na + l2_error(b, zero) + 1e-14);
        EXPECT_NEAR(l2_error(scaled, zero), 3.0 * na, 1e-13);
        const FieldRT w{rt, random(rt->n_dofs())};
        const FieldDG q{dg, random(dg->n_dofs())};
        EXPECT_GT(l2_error(w, [](Vec2) { return Vec2{}; }), 0.0);
        EXPECT_GT(l2_error(q, zero), 0.0);
    }
    const FieldRT w0{rt, std::vector<double>(rt->n_dofs(), 0.0)};
    EXPECT_EQ(l2_error(w0, [](Vec2) { return Vec2{}; }), 0.0);
}

TEST(L2Error, ZeroMeanVariantIgnoresConstants)
{
    const auto mesh = square(6);
    const auto dg = std::make_shared<const DGSpace>(mesh, 1);
    auto p = [](Vec2 x) { return manufactured::exact_p(x, 1.0); };
    const FieldDG proj = l2_project_dg(p, dg);
    FieldDG shifted = proj;
    for (int t = 0; t < mesh->n_triangles(); ++t) {
        shifted.values[dg->dof(t, 0)] += 7.0;
    }
    EXPECT_NEAR(l2_error_zero_mean(shifted, p), l2_error_zero_mean(proj, p), 1e-12);
    EXPECT_LE(l2_error_zero_mean(proj, p), l2_error(proj, p) + 1e-15);
}

TEST(StudyConfig, BuiltInTables)
{
    const auto t1 = table_config("1");
    ASSERT_EQ(t1.cells.size(), 3u);
    EXPECT_DOUBLE_EQ(t1.cells[0].tau, 1.0 / 8);
    EXPECT_EQ(t1.cells[0].mesh, "square:8");
    EXPECT_DOUBLE_EQ(t1.cells[2].tau, 1.0 / 128);
    EXPECT_EQ(t1.cells[2].mesh, "square:32");
    EXPECT_DOUBLE_EQ(t1.final_time, 1.0);
    EXPECT_EQ(t1.problem, "ex51");

    const auto t2 = table_config("2");
    ASSERT_EQ(t2.cells.size(), 12u);
    EXPECT_DOUBLE_EQ(t2.cells[0].tau, 0.05);
    EXPECT_EQ(t2.cells[3].mesh, "square:64");
    EXPECT_DOUBLE_EQ(t2.cells[11].tau, 0.25);

    const auto t3 = table_config("3");
    ASSERT_EQ(t3.cells.size(), 9u);
    EXPECT_EQ(t3.problem, "ex52");
    EXPECT_EQ(t3.cells[0].mesh, "disk:32");
    EXPECT_EQ(t3.cells[2].mesh, "disk:128");

    const auto split = table_config("split");
    EXPECT_EQ(split.kind, StudyKind::Split);
    EXPECT_EQ(split.reference_mesh, "square:128");

    EXPECT_THROW((void)table_config("4"), std::invalid_argument);
    EXPECT_THROW((void)table_config("1", 0.0), std::invalid_argument);
    StudyConfig empty;
    EXPECT_THROW(empty.validate(), std::invalid_argument);
}

TEST(StudyConfig, ScaleMesh)
{
    EXPECT_EQ(scale_mesh("square:32", 0.25), "square:8");
    EXPECT_EQ(scale_mesh("square:8", 0.01), "square:1");
    EXPECT_EQ(scale_mesh("disk:32", 0.1), "disk:8");
    EXPECT_EQ(scale_mesh("file:/tmp/x.mesh", 0.5), "file:/tmp/x.mesh");
    EXPECT_EQ(table_config("2", 0.5).cells[3].mesh, "square:32");
}

TEST(Study, FailedCellIsMarkedAndStudyContinues)
{
    StudyConfig config = table_config("1", 0.25);
    config.cells.insert(config.cells.begin() + 1, StudyCell{0.25, "square:0"});
    const auto records = run_study(config);
    ASSERT_EQ(records.size(), 4u);
    EXPECT_TRUE(records[0].ok);
    EXPECT_FALSE(records[1].ok);
    EXPECT_FALSE(records[1].failure.empty());
    EXPECT_TRUE(records[2].ok);
    EXPECT_TRUE(records[3].ok);
    std::ostringstream csv;
    write_csv(csv, records);
    EXPECT_NE(csv.str().find(",,,,,,\"FAILED: unit square"), std::string::npos) << csv.str();
    for (const auto& r : records) {
        if (r.ok) {
            EXPECT_TRUE(std::isfinite(r.error_u) && r.error_u >= 0.0);
            EXPECT_TRUE(std::isfinite(r.error_c) && r.error_c >= 0.0);
            EXPECT_TRUE(std::isfinite(r.error_p) && r.error_p >= 0.0);
            EXPECT_GE(r.wall_time_seconds, 0.0);
        }
    }
}

TEST(Study, WorkerCountDoesNotChangeBytes)
{
    StudyConfig config = table_config("2", 0.125);
    config.final_time = 0.5;
    config.threads = 1;
    std::ostringstream serial;
    write_csv(serial, run_study(config));
    config.threads = 4;
    std::ostringstream parallel;
    write_csv(parallel, run_study(config));
    EXPECT_EQ(serial.str(), parallel.str());
    std::ostringstream again;
    write_csv(again, run_study(config));
    EXPECT_EQ(parallel.str(), again.str());
}

TEST(Study, MaxOverStepsDominatesFinalTime)
{
    StudyConfig config = table_config("1", 0.25);
    const auto final_only = run_study(config);
    config.max_over_steps = true;
    const auto max_over = run_study(config);
    for (std::size_t i = 0; i < final_only.size(); ++i) {
        EXPECT_GE(max_over[i].error_u, final_only[i].error_u);
        EXPECT_GE(max_over[i].error_c, final_only[i].error_c);
    }
}

TEST(Study, MarkdownHasPaperStyleCells)
{
    StudyConfig config = table_config("1", 0.25);
    const auto records = run_study(config);
    std::ostringstream md;
    write_markdown(md, config, records);
    const std::string s = md.str();
    EXPECT_NE(s.find("1/8"), std::string::npos) << s;
    EXPECT_NE(s.find(format_sci(records[0].error_u)), std::string::npos) << s;
    EXPECT_NE(s.find("least-squares"), std::string::npos) << s;
}

TEST(Checks, TableOneOnReferenceValues)
{
    std::vector<ConvergenceRecord> records(3);
    const double u[] = {2.024e-1, 5.264e-2, 1.333e-2};
    const double c[] = {7.114e-2, 1.713e-2, 4.070e-3};
    for (int i = 0; i < 3; ++i) {
        records[i].h = std::sqrt(2.0) / (8 << i);
        records[i].error_u = u[i];
        records[i].error_c = c[i];
    }
    for (const auto& r : check_table("1", records)) {
        EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
    }
    records[2].error_c *= 3.0;
    bool any_fail = false;
    for (const auto& r : check_table("1", records)) {
        any_fail = any_fail || !r.pass;
    }
    EXPECT_TRUE(any_fail);
    records[1].ok = false;
    EXPECT_FALSE(check_table("1", records).front().pass);
}

TEST(Checks, TableTwoPlateauAndBlowUp)
{
    std::vector<ConvergenceRecord> records(12);
    const double u[3][4] = {{1.955e-1, 5.531e-2, 2.409e-2, 1.998e-2},
                            {2.0e-1, 6.0e-2, 4.168e-2, 3.910e-2},
                            {2.195e-1, 1.088e-1, 9.491e-2, 9.349e-2}};
    const double c[3][4] = {{4.748e-2, 2.081e-2, 1.077e-2, 8.243e-3},
                            {5.0e-2, 2.5e-2, 2.0e-2, 1.961e-2},
                            {1.336e-1, 9.885e-2, 8.426e-2, 8.062e-2}};
    for (int k = 0; k < 12; ++k) {
        records[k].error_u = u[k / 4][k % 4];
        records[k].error_c = c[k / 4][k % 4];
        records[k].max_abs_c = 0.7;
    }
    for (const auto& r : check_table("2", records)) {
        EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
    }
    records[5].max_abs_c = 11.0;
    EXPECT_FALSE(check_table("2", records)[0].pass);
}

TEST(Threads, EnvironmentDefault)
{
    unsetenv("MISCIBLE_THREADS");
    EXPECT_EQ(default_thread_count(), 1);
    setenv("MISCIBLE_THREADS", "3", 1);
    EXPECT_EQ(default_thread_count(), 3);
    setenv("MISCIBLE_THREADS", "abc", 1);
    EXPECT_EQ(default_thread_count(), 1);
    unsetenv("MISCIBLE_THREADS");
}
