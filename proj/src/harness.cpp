#include "miscible/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace miscible {

namespace {

template <class Diff>
double accumulate_l2(const Mesh& mesh, int quad_degree, Diff&& diff2)
{
    const TriangleRule& rule = triangle_rule(quad_degree);
    double sum = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto c = mesh.corners(t);
        double local = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            local += rule.weights[q] * diff2(t, rule.point(q, c));
        }
        sum += mesh.area(t) * local;
    }
    return std::sqrt(sum);
}

}  // namespace

double l2_error(const FieldP1& field, const ScalarFunction& exact, int quad_degree)
{
    return accumulate_l2(field.space->mesh(), quad_degree, [&](int t, Vec2 x) {
        const double d = field.value_at(t, x) - exact(x);
        return d * d;
    });
}

double l2_error(const FieldRT& field, const VectorFunction& exact, int quad_degree)
{
    return accumulate_l2(field.space->mesh(), quad_degree, [&](int t, Vec2 x) {
        return norm2(field.value_at(t, x) - exact(x));
    });
}

double l2_error(const FieldDG& field, const ScalarFunction& exact, int quad_degree)
{
    return accumulate_l2(field.space->mesh(), quad_degree, [&](int t, Vec2 x) {
        const double d = field.value_at(t, x) - exact(x);
        return d * d;
    });
}

double l2_error_zero_mean(const FieldDG& field, const ScalarFunction& exact, int quad_degree)
{
    const Mesh& mesh = field.space->mesh();
    const TriangleRule& rule = triangle_rule(quad_degree);
    double exact_integral = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto c = mesh.corners(t);
        double local = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            local += rule.weights[q] * exact(rule.point(q, c));
        }
        exact_integral += mesh.area(t) * local;
    }
    const double area = mesh.total_area();
    const double shift = (field.integral(quad_degree) - exact_integral) / area;
    return accumulate_l2(mesh, quad_degree, [&](int t, Vec2 x) {
        const double d = field.value_at(t, x) - shift - exact(x);
        return d * d;
    });
}

double rate(double e_coarse, double e_fine)
{
    return rate(e_coarse, e_fine, 2.0, 1.0);
}

double rate(double e_coarse, double e_fine, double h_coarse, double h_fine)
{
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) {
        throw UndefinedRate("convergence rate needs positive errors");
    }
    if (!(h_coarse > 0.0) || !(h_fine > 0.0) || h_coarse == h_fine) {
        throw UndefinedRate("convergence rate needs two distinct positive mesh sizes");
    }
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

double regression_rate(const std::vector<double>& h, const std::vector<double>& e)
{
    if (h.size() != e.size() || h.size() < 2) {
        throw UndefinedRate("regression rate needs at least two (h, e) pairs");
    }
    const double n = static_cast<double>(h.size());
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !(e[i] > 0.0)) {
            throw UndefinedRate("convergence rate needs positive errors");
        }
        sx += std::log(h[i]);
        sy += std::log(e[i]);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double dx = std::log(h[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(e[i]) - my);
    }
    if (sxx == 0.0) {
        throw UndefinedRate("regression rate needs distinct mesh sizes");
    }
    return sxy / sxx;
}

int default_thread_count()
{
    const char* env = std::getenv("MISCIBLE_THREADS");
    if (env == nullptr) {
        return 1;
    }
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) {
        return 1;
    }
    return static_cast<int>(std::min(n, 256L));
}

std::string format_sci(double value)
{
    if (!std::isfinite(value)) {
        return std::isnan(value) ? "NaN" : (value > 0 ? "Inf" : "-Inf");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3E", value);
    return buf;
}

namespace {

std::string csv_number(double v)
{
    if (!std::isfinite(v)) {
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch == '\n' ? ' ' : ch;
    }
    return out + "\"";
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records)
{
    os << "tau,h,mesh,steps,error_u_l2,error_c_l2,error_p_l2,max_abs_c,divergence_balance,pressure_mean,status\n";
    for (const auto& r : records) {
        os << csv_number(r.tau) << ',' << csv_number(r.h) << ',' << csv_text(r.mesh) << ',' << r.steps << ',';
        if (r.ok) {
            os << csv_number(r.error_u) << ',' << csv_number(r.error_c) << ',' << csv_number(r.error_p) << ','
               << csv_number(r.max_abs_c) << ',' << csv_number(r.divergence_balance) << ','
               << csv_number(r.pressure_mean) << ",ok\n";
        } else {
            os << ",,,,,," << csv_text("FAILED: " + r.failure) << '\n';
        }
    }
}

namespace {

std::string tau_label(double tau)
{
    const double inv = 1.0 / tau;
    if (std::abs(inv - std::round(inv)) < 1e-9 && inv >= 2.0) {
        return "1/" + std::to_string(static_cast<long>(std::lround(inv)));
    }
    std::ostringstream s;
    s << tau;
    return s.str();
}

}  // namespace

void write_markdown(std::ostream& os, const StudyConfig& config, const std::vector<ConvergenceRecord>& records)
{
    std::vector<std::array<std::string, 7>> rows;
    rows.push_back({"tau", "h", "mesh", "‖U_h^N - u‖", "‖C_h^N - c‖", "‖P_h^N - p‖", "time [s]"});
    for (const auto& r : records) {
        if (r.ok) {
            char h[32];
            std::snprintf(h, sizeof h, "%.4g", r.h);
            char wall[32];
            std::snprintf(wall, sizeof wall, "%.2f", r.wall_time_seconds);
            rows.push_back({tau_label(r.tau), h, r.mesh, format_sci(r.error_u), format_sci(r.error_c),
                            format_sci(r.error_p), wall});
        } else {
            rows.push_back({tau_label(r.tau), "-", r.mesh, "FAILED", "FAILED", "FAILED", r.failure});
        }
    }
    std::array<std::size_t, 7> width{};
    auto display = [](const std::string& s) {
        // Count code points so the norm bars line up.
        std::size_t n = 0;
        for (unsigned char ch : s) {
            n += (ch & 0xC0) != 0x80;
        }
        return n;
    };
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            width[k] = std::max(width[k], display(row[k]));
        }
    }
    if (!config.name.empty()) {
        os << "### " << config.name << "\n\n";
    }
    auto emit = [&](const std::array<std::string, 7>& row) {
        os << '|';
        for (std::size_t k = 0; k < row.size(); ++k) {
            os << ' ' << row[k] << std::string(width[k] - display(row[k]), ' ') << " |";
        }
        os << '\n';
    };
    emit(rows[0]);
    os << '|';
    for (std::size_t k = 0; k < width.size(); ++k) {
        os << std::string(width[k] + 2, '-') << '|';
    }
    os << '\n';
    for (std::size_t i = 1; i < rows.size(); ++i) {
        emit(rows[i]);
    }

    // Pairwise and least-squares rates over consecutive rows sharing a tau.
    std::size_t start = 0;
    while (start < records.size()) {
        std::size_t end = start;
        while (end < records.size() && records[end].tau == records[start].tau) {
            ++end;
        }
        if (config.kind == StudyKind::CoupledRate) {
            end = records.size();
        }
        std::vector<double> hs;
        std::vector<double> eu;
        std::vector<double> ec;
        for (std::size_t i = start; i < end; ++i) {
            if (records[i].ok && records[i].error_u > 0 && records[i].error_c > 0) {
                hs.push_back(records[i].h);
                eu.push_back(records[i].error_u);
                ec.push_back(records[i].error_c);
            }
        }
        if (hs.size() >= 2) {
            os << "\nrates";
            if (config.kind != StudyKind::CoupledRate) {
                os << " (tau = " << tau_label(records[start].tau) << ")";
            }
            os << std::fixed << std::setprecision(2) << ": U least-squares " << regression_rate(hs, eu)
               << ", last pair " << rate(eu[eu.size() - 2], eu.back(), hs[hs.size() - 2], hs.back())
               << "; C least-squares " << regression_rate(hs, ec) << ", last pair "
               << rate(ec[ec.size() - 2], ec.back(), hs[hs.size() - 2], hs.back()) << '\n';
            os.unsetf(std::ios::floatfield);
        }
        start = end;
    }
}

}  // namespace miscible
