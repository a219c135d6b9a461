#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace miscible {

/// Factorization breakdown or an iteration that stalled above tolerance.
class SingularSystem : public std::runtime_error {
public:
    SingularSystem(const std::string& what, double residual)
        : std::runtime_error(what + " (relative residual " + std::to_string(residual) + ")"),
          residual_(residual)
    {
    }
    [[nodiscard]] double achieved_residual() const { return residual_; }

private:
    double residual_;
};

/// A solution that violates its side constraint (zero-mean pressure).
class ConstraintViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse row matrix. Column indices are sorted and unique in
/// every row; values are finite.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, std::vector<int> row_offsets, std::vector<int> columns,
                 std::vector<double> values);

    /// Duplicates are summed; entries are kept even when the sum is zero so
    /// the sparsity pattern depends on connectivity only.
    static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);
    static SparseMatrix identity(int n);

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] std::size_t nonzeros() const { return values_.size(); }
    [[nodiscard]] std::span<const int> row_offsets() const { return row_offsets_; }
    [[nodiscard]] std::span<const int> columns() const { return columns_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    /// Stored value at (r, c), zero when absent.
    [[nodiscard]] double at(int r, int c) const;
    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
    [[nodiscard]] SparseMatrix transpose() const;
    /// Largest |A(i,j) - A(j,i)|.
    [[nodiscard]] double asymmetry() const;
    [[nodiscard]] std::vector<double> to_dense() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_offsets_{0};
    std::vector<int> columns_;
    std::vector<double> values_;
};

enum class SolverKind { Direct, Iterative };

[[nodiscard]] SolverKind parse_solver_kind(const std::string& name);

struct SolverSettings {
    SolverKind kind = SolverKind::Direct;
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-12;
    int max_iterations = 20000;
};

struct LinearSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
    bool symmetric = false;
    SolverSettings settings;
};

/// Solves A x = b. The direct path uses a sparse LU factorization; the
/// iterative path uses diagonally preconditioned MINRES for symmetric systems
/// and BiCGSTAB otherwise. The residual contract is always verified by an
/// explicit multiply-back.
[[nodiscard]] std::vector<double> solve(const LinearSystem& system);

/// ||A x - b|| / ||b|| (or ||A x|| when b = 0).
[[nodiscard]] double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b);

struct SaddleSolution {
    std::vector<double> u;
    std::vector<double> p;
    double multiplier = 0.0;
};

/// Solves the bordered saddle-point system
///   [ M  B^T  0 ] [u]   [rhs_u]
///   [ B  0    m ] [p] = [rhs_p]
///   [ 0  m^T  0 ] [l]   [ 0   ]
/// monolithically. `mean_constraint` closes the pressure null space; the
/// returned pressure satisfies m^T p = 0.
[[nodiscard]] SaddleSolution solve_saddle(const SparseMatrix& m_block, const SparseMatrix& b_block,
                                          std::span<const double> rhs_u, std::span<const double> rhs_p,
                                          std::span<const double> mean_constraint,
                                          const SolverSettings& settings = {});

/// Sub-block of `a`: entry (r, c) goes to (row_map[r], col_map[c]) and is
/// dropped when either map is negative.
[[nodiscard]] SparseMatrix extract_block(const SparseMatrix& a, std::span<const int> row_map,
                                         std::span<const int> col_map, int rows, int cols);

/// Euclidean inner product and norm of coefficient vectors.
[[nodiscard]] double inner(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double l2_norm(std::span<const double> a);

}  // namespace miscible
