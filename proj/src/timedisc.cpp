#include "miscible/timedisc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include "miscible/locator.hpp"

namespace miscible {

TimeDiscreteReference solve_time_discrete_reference(double tau, double final_time, const MeshPtr& fine_mesh,
                                                    const ProblemData& problem, const SchemeOptions& options)
{
    RunConfig run;
    run.tau = tau;
    run.final_time = final_time;
    run.mesh = fine_mesh;
    run.problem = problem;
    run.options = options;
    run.output_cadence = 0;
    run.keep_trajectory = true;
    SemiImplicitScheme scheme(run);
    RunResult result = scheme.run();
    return {fine_mesh, run.step_size(), std::move(result.trajectory)};
}

namespace {

/// Evaluates a field defined on some mesh at points of fine triangle t.
class Sampler {
public:
    Sampler(const Mesh& fine, const Mesh& own) : same_(&fine == &own)
    {
        if (!same_) {
            locator_.emplace(own);
        }
    }

    [[nodiscard]] int cell(int fine_t, Vec2 x) const
    {
        if (same_) {
            return fine_t;
        }
        const int t = locator_->locate(x);
        if (t < 0) {
            throw std::runtime_error("quadrature point outside the coarse mesh; meshes do not nest");
        }
        return t;
    }

private:
    bool same_;
    std::optional<PointLocator> locator_;
};

template <class Diff2>
double fine_l2(const Mesh& fine, int quad_degree, Diff2&& diff2)
{
    const TriangleRule& rule = triangle_rule(quad_degree);
    double sum = 0.0;
    for (int t = 0; t < fine.n_triangles(); ++t) {
        const auto c = fine.corners(t);
        double local = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            local += rule.weights[q] * diff2(t, rule.point(q, c));
        }
        sum += fine.area(t) * local;
    }
    return std::sqrt(sum);
}

}  // namespace

double l2_distance_on(const Mesh& fine, const FieldRT& coarse, const FieldRT& reference, int quad_degree)
{
    const Sampler a(fine, coarse.space->mesh());
    const Sampler b(fine, reference.space->mesh());
    return fine_l2(fine, quad_degree, [&](int t, Vec2 x) {
        return norm2(coarse.value_at(a.cell(t, x), x) - reference.value_at(b.cell(t, x), x));
    });
}

double l2_distance_on(const Mesh& fine, const FieldP1& coarse, const FieldP1& reference, int quad_degree)
{
    const Sampler a(fine, coarse.space->mesh());
    const Sampler b(fine, reference.space->mesh());
    return fine_l2(fine, quad_degree, [&](int t, Vec2 x) {
        const double d = coarse.value_at(a.cell(t, x), x) - reference.value_at(b.cell(t, x), x);
        return d * d;
    });
}

SplitReport error_split_study(double tau, double final_time, const std::vector<std::string>& meshes,
                              const std::string& reference_mesh, const manufactured::ManufacturedProblem& problem,
                              const SchemeOptions& options, int threads)
{
    if (meshes.empty()) {
        throw std::invalid_argument("split study has no meshes");
    }
    SplitReport report;
    report.reference_mesh = reference_mesh;
    const MeshPtr fine = std::make_shared<const Mesh>(make_mesh(reference_mesh));
    report.reference_h = fine->h_max();
    const int quad = options.quad_degree;

    const TimeDiscreteReference ref = solve_time_discrete_reference(tau, final_time, fine, problem.data, options);
    const DiscreteState& last = ref.states.back();
    const double t_final = last.time;
    const VectorFunction u_exact = [&](Vec2 x) { return problem.exact_u(x, t_final); };
    const ScalarFunction c_exact = [&](Vec2 x) { return problem.exact_c(x, t_final); };
    const double temporal_u = l2_error(*last.U, u_exact, quad);
    const double temporal_c = l2_error(last.C, c_exact, quad);

    report.rows.resize(meshes.size());
    auto run_row = [&](std::size_t i) {
        SplitRow& row = report.rows[i];
        row.tau = tau;
        row.mesh = meshes[i];
        row.temporal_u = temporal_u;
        row.temporal_c = temporal_c;
        try {
            RunConfig run;
            run.tau = tau;
            run.final_time = final_time;
            run.mesh = std::make_shared<const Mesh>(make_mesh(meshes[i]));
            run.problem = problem.data;
            run.options = options;
            run.output_cadence = 0;
            row.h = run.mesh->h_max();
            if (row.h < 4.0 * report.reference_h * (1.0 - 1e-12)) {
                throw std::invalid_argument("reference mesh must be at least 4x finer than " + meshes[i]);
            }
            const RunResult result = SemiImplicitScheme(run).run();
            const DiscreteState& s = result.final_state;
            const Sampler where(*fine, *run.mesh);
            row.spatial_u = l2_distance_on(*fine, *s.U, *last.U, quad);
            row.spatial_c = l2_distance_on(*fine, s.C, last.C, quad);
            row.total_u = fine_l2(*fine, quad, [&](int t, Vec2 x) {
                return norm2(s.U->value_at(where.cell(t, x), x) - u_exact(x));
            });
            row.total_c = fine_l2(*fine, quad, [&](int t, Vec2 x) {
                const double d = s.C.value_at(where.cell(t, x), x) - c_exact(x);
                return d * d;
            });
        } catch (const std::exception& e) {
            row.ok = false;
            row.failure = e.what();
        }
    };

    const int n_threads =
        std::clamp(threads > 0 ? threads : default_thread_count(), 1, static_cast<int>(meshes.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < meshes.size(); k = next++) {
            run_row(k);
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    return report;
}

std::vector<CheckResult> check_split(const SplitReport& report)
{
    std::vector<CheckResult> out;
    std::vector<double> h;
    std::vector<double> spatial;
    std::vector<double> temporal;
    bool triangle = true;
    for (const auto& row : report.rows) {
        if (!row.ok) {
            out.push_back({"all cells succeeded", false, row.mesh + ": " + row.failure});
            return out;
        }
        h.push_back(row.h);
        spatial.push_back(row.spatial_u);
        temporal.push_back(row.temporal_u);
        temporal.push_back(row.temporal_c);
        const double slack_u = 1e-12 * std::max(1.0, row.total_u);
        const double slack_c = 1e-12 * std::max(1.0, row.total_c);
        triangle = triangle && row.total_u <= row.spatial_u + row.temporal_u + slack_u &&
                   row.total_c <= row.spatial_c + row.temporal_c + slack_c;
    }
    std::ostringstream d;
    d.precision(4);
    const double r = regression_rate(h, spatial);
    d << "least-squares rate " << r;
    out.push_back({"spatial U rate in [1.6, 2.4]", r >= 1.6 && r <= 2.4, d.str()});

    // Coefficient of variation of the temporal column, U and C separately.
    auto cv = [&](int offset) {
        double mean = 0.0;
        int n = 0;
        for (std::size_t i = offset; i < temporal.size(); i += 2, ++n) {
            mean += temporal[i];
        }
        mean /= n;
        double var = 0.0;
        for (std::size_t i = offset; i < temporal.size(); i += 2) {
            var += (temporal[i] - mean) * (temporal[i] - mean);
        }
        return std::sqrt(var / n) / mean;
    };
    const double cv_u = cv(0);
    const double cv_c = cv(1);
    std::ostringstream e;
    e.precision(4);
    e << "U " << 100 * cv_u << "%, C " << 100 * cv_c << "%";
    out.push_back({"temporal coefficient of variation < 10%", cv_u < 0.1 && cv_c < 0.1, e.str()});
    out.push_back({"total <= spatial + temporal", triangle, triangle ? "holds on every row" : "violated"});
    return out;
}

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_split_csv(std::ostream& os, const SplitReport& report)
{
    os << "tau,h,mesh,reference_mesh,total_u,spatial_u,temporal_u,total_c,spatial_c,temporal_c,status\n";
    for (const auto& r : report.rows) {
        os << num(r.tau) << ',' << num(r.h) << ',' << r.mesh << ',' << report.reference_mesh << ',';
        if (r.ok) {
            os << num(r.total_u) << ',' << num(r.spatial_u) << ',' << num(r.temporal_u) << ',' << num(r.total_c)
               << ',' << num(r.spatial_c) << ',' << num(r.temporal_c) << ",ok\n";
        } else {
            std::string msg = r.failure;
            std::replace(msg.begin(), msg.end(), ',', ';');
            os << ",,,,,,FAILED: " << msg << '\n';
        }
    }
}

void write_split_markdown(std::ostream& os, const SplitReport& report)
{
    os << "### Error splitting against reference " << report.reference_mesh << "\n\n";
    os << "| tau | mesh | U total | U spatial | U temporal | C total | C spatial | C temporal |\n";
    os << "|-----|------|---------|-----------|------------|---------|-----------|------------|\n";
    for (const auto& r : report.rows) {
        if (!r.ok) {
            os << "| " << r.tau << " | " << r.mesh << " | FAILED: " << r.failure << " |||||\n";
            continue;
        }
        os << "| " << r.tau << " | " << r.mesh << " | " << format_sci(r.total_u) << " | " << format_sci(r.spatial_u)
           << " | " << format_sci(r.temporal_u) << " | " << format_sci(r.total_c) << " | "
           << format_sci(r.spatial_c) << " | " << format_sci(r.temporal_c) << " |\n";
    }
}

}  // namespace miscible
