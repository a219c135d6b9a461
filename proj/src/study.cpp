#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "miscible/harness.hpp"
#include "miscible/manufactured.hpp"

namespace miscible {

void StudyConfig::validate() const
{
    if (cells.empty()) {
        throw std::invalid_argument("study has no cells");
    }
    if (!(final_time > 0.0)) {
        throw std::invalid_argument("study final time must be positive");
    }
    for (const auto& c : cells) {
        if (!(c.tau > 0.0)) {
            throw std::invalid_argument("study cell has a non-positive time step");
        }
        if (c.mesh.empty()) {
            throw std::invalid_argument("study cell has no mesh");
        }
    }
    if (kind == StudyKind::Split && reference_mesh.empty()) {
        throw std::invalid_argument("split study needs a reference mesh");
    }
}

std::string scale_mesh(const std::string& descriptor, double scale)
{
    const auto colon = descriptor.find(':');
    if (colon == std::string::npos) {
        return descriptor;
    }
    const std::string kind = descriptor.substr(0, colon);
    if (kind != "square" && kind != "disk") {
        return descriptor;
    }
    const int m = std::stoi(descriptor.substr(colon + 1));
    int scaled = std::max(1, static_cast<int>(std::lround(m * scale)));
    if (kind == "disk") {
        scaled = std::max(8, scaled);
    }
    return kind + ":" + std::to_string(scaled);
}

StudyConfig table_config(const std::string& table, double scale)
{
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("scale must be positive");
    }
    StudyConfig config;
    config.final_time = 1.0;
    const std::vector<double> taus{0.05, 0.1, 0.25};
    if (table == "1") {
        config.kind = StudyKind::CoupledRate;
        config.name = "Table 1: tau = 8 h^2, unit square";
        config.cells = {{1.0 / 8, "square:8"}, {1.0 / 32, "square:16"}, {1.0 / 128, "square:32"}};
    } else if (table == "2") {
        config.kind = StudyKind::FixedTau;
        config.name = "Table 2: fixed tau, unit square";
        for (double tau : taus) {
            for (int m : {8, 16, 32, 64}) {
                config.cells.push_back({tau, "square:" + std::to_string(m)});
            }
        }
    } else if (table == "3") {
        config.kind = StudyKind::Disk;
        config.problem = "ex52";
        config.name = "Table 3: fixed tau, disk";
        for (double tau : taus) {
            for (int m : {32, 64, 128}) {
                config.cells.push_back({tau, "disk:" + std::to_string(m)});
            }
        }
    } else if (table == "split") {
        config.kind = StudyKind::Split;
        config.name = "Error splitting: tau = 0.1, reference square:128";
        for (int m : {8, 16, 32}) {
            config.cells.push_back({0.1, "square:" + std::to_string(m)});
        }
        config.reference_mesh = scale_mesh("square:128", scale);
    } else {
        throw std::invalid_argument("unknown table '" + table + "' (expected 1, 2, 3 or split)");
    }
    for (auto& c : config.cells) {
        c.mesh = scale_mesh(c.mesh, scale);
    }
    return config;
}

ConvergenceRecord run_cell(const StudyConfig& config, const StudyCell& cell)
{
    ConvergenceRecord record;
    record.tau = cell.tau;
    record.mesh = cell.mesh;
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto problem = manufactured::by_name(config.problem);
        RunConfig run;
        run.tau = cell.tau;
        run.final_time = config.final_time;
        run.mesh = std::make_shared<const Mesh>(make_mesh(cell.mesh));
        run.problem = problem.data;
        run.options = config.options;
        run.output_cadence = 0;
        record.h = run.mesh->h_max();
        record.steps = run.steps();

        const int quad = config.options.quad_degree;
        auto measure = [&](const DiscreteState& s, double& eu, double& ec, double& ep) {
            const double t = s.time;
            eu = l2_error(*s.U, [&](Vec2 x) { return problem.exact_u(x, t); }, quad);
            ec = l2_error(s.C, [&](Vec2 x) { return problem.exact_c(x, t); }, quad);
            ep = l2_error_zero_mean(*s.P, [&](Vec2 x) { return problem.exact_p(x, t); }, quad);
        };

        SemiImplicitScheme scheme(run);
        const RunResult result = scheme.run([&](const DiscreteState& s, const StepDiagnostics& d) {
            record.divergence_balance = std::max(record.divergence_balance, d.divergence_balance);
            record.max_abs_c = std::max(record.max_abs_c, d.max_abs_c);
            record.pressure_mean = std::max(record.pressure_mean, std::abs(d.pressure_mean));
            if (config.max_over_steps) {
                double eu = 0.0;
                double ec = 0.0;
                double ep = 0.0;
                measure(s, eu, ec, ep);
                record.error_u = std::max(record.error_u, eu);
                record.error_c = std::max(record.error_c, ec);
                record.error_p = std::max(record.error_p, ep);
            }
        });
        if (!config.max_over_steps) {
            measure(result.final_state, record.error_u, record.error_c, record.error_p);
        }
        for (double e : {record.error_u, record.error_c, record.error_p}) {
            if (!std::isfinite(e)) {
                throw std::runtime_error("non-finite error norm");
            }
        }
    } catch (const std::exception& e) {
        record.ok = false;
        record.failure = e.what();
    }
    record.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

std::vector<ConvergenceRecord> run_study(const StudyConfig& config)
{
    config.validate();
    std::vector<ConvergenceRecord> records(config.cells.size());
    const int threads = std::clamp(config.threads > 0 ? config.threads : default_thread_count(), 1,
                                   static_cast<int>(config.cells.size()));
    // Largest cells first keeps the pool busy; results land in cell order.
    std::vector<std::size_t> order(config.cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    if (threads > 1) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& ca = config.cells[a];
            const auto& cb = config.cells[b];
            return ca.mesh.size() != cb.mesh.size() ? ca.mesh.size() > cb.mesh.size() : ca.mesh > cb.mesh;
        });
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < order.size(); k = next++) {
            records[order[k]] = run_cell(config, config.cells[order[k]]);
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    return records;
}

namespace {

struct Paper {
    double u;
    double c;
};

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

bool all_ok(const std::vector<ConvergenceRecord>& records, std::string& detail)
{
    for (const auto& r : records) {
        if (!r.ok) {
            detail = r.mesh + " tau=" + fmt(r.tau) + " failed: " + r.failure;
            return false;
        }
    }
    return true;
}

CheckResult within_factor(const std::string& name, const std::vector<ConvergenceRecord>& records,
                          const std::vector<std::size_t>& rows, const std::vector<Paper>& paper, double factor,
                          bool include_u)
{
    CheckResult r{name, true, ""};
    double worst = 1.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& rec = records[rows[k]];
        std::vector<std::pair<double, double>> pairs{{rec.error_c, paper[k].c}};
        if (include_u) {
            pairs.push_back({rec.error_u, paper[k].u});
        }
        for (auto [got, want] : pairs) {
            const double ratio = std::max(got / want, want / got);
            worst = std::max(worst, std::isfinite(ratio) ? ratio : INFINITY);
            if (!(ratio <= factor)) {
                r.pass = false;
            }
        }
    }
    r.detail = "worst ratio to reference values " + fmt(worst) + " (allowed " + fmt(factor) + ")";
    return r;
}

}  // namespace

std::vector<CheckResult> check_table(const std::string& table, const std::vector<ConvergenceRecord>& records)
{
    std::vector<CheckResult> out;
    std::string detail;
    if (!all_ok(records, detail)) {
        out.push_back({"all cells succeeded", false, detail});
        return out;
    }
    const StudyConfig config = table_config(table);
    if (records.size() != config.cells.size()) {
        out.push_back({"record count", false, "expected " + std::to_string(config.cells.size())});
        return out;
    }

    if (table == "1") {
        std::vector<double> h;
        std::vector<double> eu;
        std::vector<double> ec;
        double balance = 0.0;
        for (const auto& r : records) {
            h.push_back(r.h);
            eu.push_back(r.error_u);
            ec.push_back(r.error_c);
            balance = std::max(balance, r.divergence_balance);
        }
        const double ru = regression_rate(h, eu);
        const double rc = regression_rate(h, ec);
        out.push_back({"U rate in [1.7, 2.3]", ru >= 1.7 && ru <= 2.3, "least-squares rate " + fmt(ru)});
        out.push_back({"C rate in [1.7, 2.4]", rc >= 1.7 && rc <= 2.4, "least-squares rate " + fmt(rc)});
        out.push_back(within_factor("errors within factor 2", records, {0, 1, 2},
                                    {{2.024e-1, 7.114e-2}, {5.264e-2, 1.713e-2}, {1.333e-2, 4.070e-3}}, 2.0,
                                    true));
        out.push_back({"divergence balance <= 1e-9", balance <= 1e-9, "max " + fmt(balance)});
    } else if (table == "2") {
        // Cells: tau-major, M = 8, 16, 32, 64.
        bool bounded = true;
        double max_c = 0.0;
        for (const auto& r : records) {
            max_c = std::max(max_c, r.max_abs_c);
            bounded = bounded && std::isfinite(r.max_abs_c) && r.max_abs_c <= 10.0;
        }
        out.push_back({"no blow-up (max|C| <= 10)", bounded, "max|C| " + fmt(max_c)});
        const auto& a = records[10];
        const auto& b = records[11];
        const double du = std::abs(b.error_u - a.error_u) / a.error_u;
        const double dc = std::abs(b.error_c - a.error_c) / a.error_c;
        out.push_back({"tau=0.25 plateau: M=64 within 25% of M=32", du <= 0.25 && dc <= 0.25,
                       "U change " + fmt(100 * du) + "%, C change " + fmt(100 * dc) + "%"});
        bool monotone = true;
        for (int k = 0; k < 3; ++k) {
            monotone = monotone && records[k + 1].error_u < records[k].error_u &&
                       records[k + 1].error_c < records[k].error_c;
        }
        const double first_u = records[0].error_u / records[1].error_u;
        const double last_u = records[2].error_u / records[3].error_u;
        const double first_c = records[0].error_c / records[1].error_c;
        const double last_c = records[2].error_c / records[3].error_c;
        const bool flattens = last_u < first_u && last_c < first_c;
        out.push_back({"tau=0.05: decreasing then flattening", monotone && flattens,
                       "U reduction " + fmt(first_u) + " -> " + fmt(last_u) + ", C reduction " + fmt(first_c) +
                           " -> " + fmt(last_c)});
    } else if (table == "3") {
        bool factor3 = true;
        std::string ratios;
        for (int k = 0; k < 2; ++k) {
            const double q = records[k].error_c / records[k + 1].error_c;
            factor3 = factor3 && q >= 3.0;
            ratios += (k ? ", " : "") + fmt(q);
        }
        out.push_back({"tau=0.05: C error drops >= 3x per doubling", factor3, "ratios " + ratios});
        out.push_back(within_factor("tau=0.05: C errors within factor 3", records, {0, 1, 2},
                                    {{7.105e-2, 1.445e-2}, {2.526e-2, 4.022e-3}, {1.523e-2, 7.754e-4}}, 3.0,
                                    false));
    } else {
        throw std::invalid_argument("no checks for table '" + table + "'");
    }
    return out;
}

}  // namespace miscible
