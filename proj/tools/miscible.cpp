// Command-line front end: single runs and table regeneration.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "miscible/harness.hpp"
#include "miscible/manufactured.hpp"
#include "miscible/timedisc.hpp"

using namespace miscible;
using nlohmann::json;

namespace {

struct Common {
    std::string solver = "direct";
    int quad_degree = kDefaultQuadratureDegree;
    int order = 1;
    int source_quad_degree = SchemeOptions{}.source_quad_degree;

    [[nodiscard]] SchemeOptions options() const
    {
        SchemeOptions o;
        o.mixed_order = order;
        o.quad_degree = quad_degree;
        o.source_quad_degree = source_quad_degree;
        o.solver.kind = parse_solver_kind(solver);
        return o;
    }
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--solver", c.solver, "Linear solver")->check(CLI::IsMember({"direct", "iterative"}));
    app->add_option("--quad-degree", c.quad_degree, "Triangle quadrature degree")->check(CLI::Range(1, 30));
    app->add_option("--source-quad-degree", c.source_quad_degree, "Quadrature degree for the pressure source")
        ->check(CLI::Range(1, 30));
    app->add_option("--order", c.order, "Mixed element order: 1 = RT1/P1dc, 0 = RT0/P0")
        ->check(CLI::IsMember({0, 1}));
}

std::ostream& open_out(const std::string& path, std::ofstream& file)
{
    if (path.empty() || path == "-") {
        return std::cout;
    }
    file.open(path);
    if (!file) {
        throw std::runtime_error("cannot write " + path);
    }
    return file;
}

int run_solve(const std::string& mesh_spec, double tau, double final_time, const std::string& problem_name,
              const std::string& out, const Common& common)
{
    const auto problem = manufactured::by_name(problem_name);
    RunConfig run;
    run.tau = tau;
    run.final_time = final_time;
    run.mesh = std::make_shared<const Mesh>(make_mesh(mesh_spec));
    run.problem = problem.data;
    run.options = common.options();
    SemiImplicitScheme scheme(run);
    const RunResult result = scheme.run();
    const DiscreteState& s = result.final_state;
    const double t = s.time;
    const int q = run.options.quad_degree;

    json j;
    j["mesh"] = mesh_spec;
    j["problem"] = problem.name;
    j["tau"] = run.step_size();
    j["steps"] = run.steps();
    j["final_time"] = t;
    j["h"] = run.mesh->h_max();
    j["vertices"] = run.mesh->n_vertices();
    j["triangles"] = run.mesh->n_triangles();
    j["order"] = run.options.mixed_order;
    j["errors"] = {
        {"u_l2", l2_error(*s.U, [&](Vec2 x) { return problem.exact_u(x, t); }, q)},
        {"c_l2", l2_error(s.C, [&](Vec2 x) { return problem.exact_c(x, t); }, q)},
        {"p_l2", l2_error_zero_mean(*s.P, [&](Vec2 x) { return problem.exact_p(x, t); }, q)},
    };
    json diag = json::array();
    for (const auto& d : result.diagnostics) {
        diag.push_back({{"step", d.step},
                        {"time", d.time},
                        {"max_abs_c", d.max_abs_c},
                        {"divergence_balance", d.divergence_balance},
                        {"pressure_mean", d.pressure_mean}});
    }
    j["diagnostics"] = diag;
    j["concentration"] = s.C.values;
    j["velocity"] = s.U->values;
    j["pressure"] = s.P->values;

    std::ofstream file;
    open_out(out, file) << j.dump(1) << '\n';
    return 0;
}

int run_study_command(const std::string& table, double scale, const std::string& out, const std::string& format,
                      bool check, bool max_over_steps, const Common& common)
{
    StudyConfig config = table_config(table, scale);
    config.options = common.options();
    config.max_over_steps = max_over_steps;
    std::ofstream file;
    std::ostream& os = open_out(out, file);

    std::vector<CheckResult> checks;
    bool cells_ok = true;
    if (config.kind == StudyKind::Split) {
        std::vector<std::string> meshes;
        for (const auto& c : config.cells) {
            meshes.push_back(c.mesh);
        }
        const SplitReport report = error_split_study(config.cells.front().tau, config.final_time, meshes,
                                                     config.reference_mesh, manufactured::by_name(config.problem),
                                                     config.options);
        for (const auto& r : report.rows) {
            cells_ok = cells_ok && r.ok;
        }
        if (format == "md") {
            write_split_markdown(os, report);
        } else {
            write_split_csv(os, report);
        }
        if (check) {
            checks = check_split(report);
        }
    } else {
        const auto records = run_study(config);
        for (const auto& r : records) {
            cells_ok = cells_ok && r.ok;
            std::cerr << "cell tau=" << r.tau << " " << r.mesh << ": " << (r.ok ? "ok" : "FAILED " + r.failure)
                      << " (" << r.wall_time_seconds << " s)\n";
        }
        if (format == "md") {
            write_markdown(os, config, records);
        } else {
            write_csv(os, records);
        }
        if (check) {
            if (scale != 1.0 || common.order != 1 || max_over_steps) {
                std::cerr << "--check needs the default study (scale 1, order 1, final-time errors)\n";
                return 1;
            }
            checks = check_table(table, records);
        }
    }
    bool pass = cells_ok;
    for (const auto& c : checks) {
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        pass = pass && c.pass;
    }
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Semi-implicit Galerkin-mixed solver for miscible displacement"};
    app.require_subcommand(1);

    Common solve_common;
    std::string mesh_spec;
    double tau = 0.0;
    double final_time = 1.0;
    std::string problem = "ex51";
    std::string solve_out;
    auto* solve = app.add_subcommand("solve", "Run one simulation and print JSON");
    solve->add_option("--mesh", mesh_spec, "square:M, disk:M or file:PATH")->required();
    solve->add_option("--tau", tau, "Time step")->required();
    solve->add_option("--T", final_time, "Final time");
    solve->add_option("--problem", problem, "Manufactured problem")->check(CLI::IsMember({"ex51", "ex52"}));
    solve->add_option("--out", solve_out, "Output path (default stdout)");
    add_common(solve, solve_common);

    Common study_common;
    std::string table;
    double scale = 1.0;
    std::string study_out;
    std::string format = "csv";
    bool check = false;
    bool max_over_steps = false;
    auto* study = app.add_subcommand("study", "Regenerate a convergence table");
    study->add_option("--table", table, "1, 2, 3 or split")->required()->check(CLI::IsMember({"1", "2", "3", "split"}));
    study->add_option("--scale", scale, "Multiply mesh sizes M (quick runs)")->check(CLI::PositiveNumber);
    study->add_option("--out", study_out, "Output path (default stdout)");
    study->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
    study->add_flag("--check", check, "Exit non-zero unless the acceptance tolerances hold");
    study->add_flag("--max-over-steps", max_over_steps, "Report max over time levels instead of final time");
    add_common(study, study_common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            return run_solve(mesh_spec, tau, final_time, problem, solve_out, solve_common);
        }
        return run_study_command(table, scale, study_out, format, check, max_over_steps, study_common);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
