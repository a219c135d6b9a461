#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "miscible/geometry.hpp"
#include "miscible/scheme.hpp"
#include "miscible/spaces.hpp"

namespace miscible {

/// L2 norms of (field - exact) over the field's mesh with a triangle rule.
[[nodiscard]] double l2_error(const FieldP1& field, const ScalarFunction& exact,
                              int quad_degree = kDefaultQuadratureDegree);
[[nodiscard]] double l2_error(const FieldRT& field, const VectorFunction& exact,
                              int quad_degree = kDefaultQuadratureDegree);
[[nodiscard]] double l2_error(const FieldDG& field, const ScalarFunction& exact,
                              int quad_degree = kDefaultQuadratureDegree);

/// Pressure error with both sides shifted to zero mean, so that the additive
/// constant of the pure-Neumann problem does not enter.
[[nodiscard]] double l2_error_zero_mean(const FieldDG& field, const ScalarFunction& exact,
                                        int quad_degree = kDefaultQuadratureDegree);

class UndefinedRate : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// log2(e_coarse / e_fine) for a halving of h.
[[nodiscard]] double rate(double e_coarse, double e_fine);
/// log(e_coarse / e_fine) / log(h_coarse / h_fine).
[[nodiscard]] double rate(double e_coarse, double e_fine, double h_coarse, double h_fine);
/// Least-squares slope of log e against log h.
[[nodiscard]] double regression_rate(const std::vector<double>& h, const std::vector<double>& e);

struct ConvergenceRecord {
    double tau = 0.0;
    double h = 0.0;
    std::string mesh;
    int steps = 0;
    double error_u = 0.0;
    double error_c = 0.0;
    double error_p = 0.0;
    double max_abs_c = 0.0;
    /// Largest per-element divergence balance defect seen over all steps.
    double divergence_balance = 0.0;
    /// Largest |(1/|Omega|) integral of P_h| seen over all steps.
    double pressure_mean = 0.0;
    double wall_time_seconds = 0.0;
    bool ok = true;
    std::string failure;
};

enum class StudyKind { CoupledRate, FixedTau, Disk, Split };

struct StudyCell {
    double tau = 0.0;
    std::string mesh;
};

struct StudyConfig {
    StudyKind kind = StudyKind::CoupledRate;
    std::string name;
    std::string problem = "ex51";
    double final_time = 1.0;
    std::vector<StudyCell> cells;
    SchemeOptions options;
    /// Max over time levels instead of the final-time error.
    bool max_over_steps = false;
    /// Worker count; 0 reads MISCIBLE_THREADS (default 1).
    int threads = 0;
    /// Split studies only: reference mesh descriptor.
    std::string reference_mesh;

    void validate() const;
};

/// Scales a mesh descriptor's M by `scale` (rounded, at least 1; at least 8
/// for disks). file: descriptors are left untouched.
[[nodiscard]] std::string scale_mesh(const std::string& descriptor, double scale);

/// Built-in study for "1", "2", "3" or "split".
[[nodiscard]] StudyConfig table_config(const std::string& table, double scale = 1.0);

/// Runs one cell: builds the mesh, runs the scheme and measures errors.
/// Solver and input failures are caught and recorded.
[[nodiscard]] ConvergenceRecord run_cell(const StudyConfig& config, const StudyCell& cell);

/// One record per cell, in cell order, whatever the worker count.
[[nodiscard]] std::vector<ConvergenceRecord> run_study(const StudyConfig& config);

/// Worker count from MISCIBLE_THREADS, 1 when unset or invalid.
[[nodiscard]] int default_thread_count();

/// Scientific notation with 4 significant digits: 2.024E-01.
[[nodiscard]] std::string format_sci(double value);

/// Wall time is left out so that repeated runs give identical bytes.
void write_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records);
void write_markdown(std::ostream& os, const StudyConfig& config, const std::vector<ConvergenceRecord>& records);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Acceptance checks for the built-in tables. `records` must come from
/// table_config(table) at scale 1.
[[nodiscard]] std::vector<CheckResult> check_table(const std::string& table,
                                                   const std::vector<ConvergenceRecord>& records);

}  // namespace miscible
