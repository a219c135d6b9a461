#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "miscible/harness.hpp"
#include "miscible/manufactured.hpp"
#include "miscible/scheme.hpp"

namespace miscible {

/// The time-discrete solution approximated by the same scheme on a fine mesh.
struct TimeDiscreteReference {
    MeshPtr mesh;
    double tau = 0.0;
    /// States n = 0..N; U and P are empty at n = 0.
    std::vector<DiscreteState> states;
};

[[nodiscard]] TimeDiscreteReference solve_time_discrete_reference(double tau, double final_time,
                                                                  const MeshPtr& fine_mesh,
                                                                  const ProblemData& problem,
                                                                  const SchemeOptions& options = {});

struct SplitRow {
    double tau = 0.0;
    double h = 0.0;
    std::string mesh;
    double total_u = 0.0;
    double spatial_u = 0.0;
    double temporal_u = 0.0;
    double total_c = 0.0;
    double spatial_c = 0.0;
    double temporal_c = 0.0;
    bool ok = true;
    std::string failure;
};

struct SplitReport {
    std::string reference_mesh;
    double reference_h = 0.0;
    std::vector<SplitRow> rows;
};

/// Final-time errors of coarse runs split into the distance to the fine
/// reference (spatial) and the reference's own error (temporal). All three
/// norms use the reference mesh's quadrature points, so the triangle
/// inequality holds row by row. Coarse meshes must nest in the reference.
[[nodiscard]] SplitReport error_split_study(double tau, double final_time, const std::vector<std::string>& meshes,
                                            const std::string& reference_mesh,
                                            const manufactured::ManufacturedProblem& problem,
                                            const SchemeOptions& options = {}, int threads = 0);

/// Distance between a coarse field and a reference field, or between a field
/// and an exact function, measured with the quadrature of `fine`.
[[nodiscard]] double l2_distance_on(const Mesh& fine, const FieldRT& coarse, const FieldRT& reference,
                                    int quad_degree = kDefaultQuadratureDegree);
[[nodiscard]] double l2_distance_on(const Mesh& fine, const FieldP1& coarse, const FieldP1& reference,
                                    int quad_degree = kDefaultQuadratureDegree);

/// Spatial rate for U in [1.6, 2.4] and temporal coefficient of variation
/// below 10% across meshes, plus the row-wise triangle inequality.
[[nodiscard]] std::vector<CheckResult> check_split(const SplitReport& report);

void write_split_csv(std::ostream& os, const SplitReport& report);
void write_split_markdown(std::ostream& os, const SplitReport& report);

}  // namespace miscible
