#include "miscible/linalg.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace miscible {

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using EigenVector = Eigen::VectorXd;

EigenSparse to_eigen(const SparseMatrix& a)
{
    const Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> view(
        a.rows(), a.cols(), static_cast<int>(a.nonzeros()), a.row_offsets().data(), a.columns().data(),
        a.values().data());
    EigenSparse result(view);
    result.makeCompressed();
    return result;
}

double residual_against(const SparseMatrix& a, std::span<const double> x, std::span<const double> b,
                        std::vector<double>& r)
{
    r = a.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = b[i] - r[i];
    }
    return l2_norm(r);
}

bool meets_contract(double residual_norm, double rhs_norm, const SolverSettings& s)
{
    if (rhs_norm == 0.0) {
        return residual_norm <= s.absolute_tolerance;
    }
    return residual_norm <= s.relative_tolerance * rhs_norm;
}

std::vector<double> solve_direct(const LinearSystem& system)
{
    const EigenSparse a = to_eigen(system.matrix);
    Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) {
        throw SingularSystem("sparse LU factorization failed: " + lu.lastErrorMessage(),
                             std::numeric_limits<double>::infinity());
    }
    const Eigen::Map<const EigenVector> b(system.rhs.data(), static_cast<Eigen::Index>(system.rhs.size()));
    EigenVector x = lu.solve(b);
    if (lu.info() != Eigen::Success) {
        throw SingularSystem("sparse LU back-substitution failed", std::numeric_limits<double>::infinity());
    }

    // A few steps of iterative refinement recover digits lost to pivoting.
    const double b_norm = l2_norm(system.rhs);
    std::vector<double> r;
    std::vector<double> xs(x.data(), x.data() + x.size());
    double r_norm = residual_against(system.matrix, xs, system.rhs, r);
    for (int step = 0; step < 3 && !meets_contract(r_norm, b_norm, system.settings); ++step) {
        const Eigen::Map<const EigenVector> rv(r.data(), static_cast<Eigen::Index>(r.size()));
        const EigenVector dx = lu.solve(rv);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            xs[i] += dx[static_cast<Eigen::Index>(i)];
        }
        r_norm = residual_against(system.matrix, xs, system.rhs, r);
    }
    return xs;
}

template <typename Solver>
std::vector<double> run_iterative(Solver& solver, const EigenSparse& a, const LinearSystem& system)
{
    solver.setTolerance(system.settings.relative_tolerance * 0.1);
    solver.setMaxIterations(system.settings.max_iterations);
    solver.compute(a);
    const Eigen::Map<const EigenVector> b(system.rhs.data(), static_cast<Eigen::Index>(system.rhs.size()));
    const EigenVector x = solver.solve(b);
    return {x.data(), x.data() + x.size()};
}

std::vector<double> solve_iterative(const LinearSystem& system)
{
    const EigenSparse a = to_eigen(system.matrix);
    if (system.symmetric) {
        Eigen::MINRES<EigenSparse, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> minres;
        return run_iterative(minres, a, system);
    }
    Eigen::BiCGSTAB<EigenSparse, Eigen::DiagonalPreconditioner<double>> bicgstab;
    return run_iterative(bicgstab, a, system);
}

}  // namespace

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_offsets, std::vector<int> columns,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_offsets_(std::move(row_offsets)), columns_(std::move(columns)),
      values_(std::move(values))
{
    if (rows_ < 0 || cols_ < 0 || row_offsets_.size() != static_cast<std::size_t>(rows_) + 1 ||
        columns_.size() != values_.size() || row_offsets_.back() != static_cast<int>(values_.size())) {
        throw std::invalid_argument("inconsistent CSR arrays");
    }
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            if (columns_[k] < 0 || columns_[k] >= cols_) {
                throw std::invalid_argument("CSR column index out of range in row " + std::to_string(r));
            }
            if (k > row_offsets_[r] && columns_[k] <= columns_[k - 1]) {
                throw std::invalid_argument("CSR columns not sorted/unique in row " + std::to_string(r));
            }
            if (!std::isfinite(values_[k])) {
                throw std::invalid_argument("non-finite matrix entry in row " + std::to_string(r));
            }
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets)
{
    std::vector<int> counts(static_cast<std::size_t>(rows) + 1, 0);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw std::invalid_argument("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                                        ") outside a " + std::to_string(rows) + "x" + std::to_string(cols) +
                                        " matrix");
        }
        ++counts[t.row + 1];
    }
    std::partial_sum(counts.begin(), counts.end(), counts.begin());
    std::vector<std::pair<int, double>> entries(triplets.size());
    std::vector<int> fill(counts.begin(), counts.end() - 1);
    for (const auto& t : triplets) {
        entries[fill[t.row]++] = {t.col, t.value};
    }

    std::vector<int> offsets(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<int> columns;
    std::vector<double> values;
    columns.reserve(triplets.size());
    values.reserve(triplets.size());
    for (int r = 0; r < rows; ++r) {
        auto first = entries.begin() + counts[r];
        auto last = entries.begin() + counts[r + 1];
        std::stable_sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto it = first; it != last; ++it) {
            if (!columns.empty() && static_cast<int>(columns.size()) > offsets[r] && columns.back() == it->first) {
                values.back() += it->second;
            } else {
                columns.push_back(it->first);
                values.push_back(it->second);
            }
        }
        offsets[r + 1] = static_cast<int>(columns.size());
    }
    return SparseMatrix(rows, cols, std::move(offsets), std::move(columns), std::move(values));
}

SparseMatrix SparseMatrix::identity(int n)
{
    std::vector<int> offsets(static_cast<std::size_t>(n) + 1);
    std::iota(offsets.begin(), offsets.end(), 0);
    std::vector<int> columns(n);
    std::iota(columns.begin(), columns.end(), 0);
    return SparseMatrix(n, n, std::move(offsets), std::move(columns), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(int r, int c) const
{
    const auto first = columns_.begin() + row_offsets_[r];
    const auto last = columns_.begin() + row_offsets_[r + 1];
    const auto it = std::lower_bound(first, last, c);
    return (it != last && *it == c) ? values_[it - columns_.begin()] : 0.0;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const
{
    if (x.size() != static_cast<std::size_t>(cols_)) {
        throw std::invalid_argument("matrix-vector size mismatch");
    }
    std::vector<double> y(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
        double sum = 0.0;
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            sum += values_[k] * x[columns_[k]];
        }
        y[r] = sum;
    }
    return y;
}

SparseMatrix SparseMatrix::transpose() const
{
    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            t.push_back({columns_[k], r, values_[k]});
        }
    }
    return from_triplets(cols_, rows_, t);
}

double SparseMatrix::asymmetry() const
{
    if (rows_ != cols_) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            worst = std::max(worst, std::abs(values_[k] - at(columns_[k], r)));
        }
    }
    return worst;
}

std::vector<double> SparseMatrix::to_dense() const
{
    std::vector<double> dense(static_cast<std::size_t>(rows_) * cols_, 0.0);
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            dense[static_cast<std::size_t>(r) * cols_ + columns_[k]] = values_[k];
        }
    }
    return dense;
}

SolverKind parse_solver_kind(const std::string& name)
{
    if (name == "direct") {
        return SolverKind::Direct;
    }
    if (name == "iterative") {
        return SolverKind::Iterative;
    }
    throw std::invalid_argument("unknown solver '" + name + "' (expected direct or iterative)");
}

SparseMatrix extract_block(const SparseMatrix& a, std::span<const int> row_map, std::span<const int> col_map,
                           int rows, int cols)
{
    std::vector<Triplet> t;
    t.reserve(a.nonzeros());
    for (int r = 0; r < a.rows(); ++r) {
        if (row_map[r] < 0) {
            continue;
        }
        for (int k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k) {
            const int c = col_map[a.columns()[k]];
            if (c >= 0) {
                t.push_back({row_map[r], c, a.values()[k]});
            }
        }
    }
    return SparseMatrix::from_triplets(rows, cols, t);
}

double inner(std::span<const double> a, std::span<const double> b)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

double l2_norm(std::span<const double> a)
{
    return std::sqrt(inner(a, a));
}

double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b)
{
    std::vector<double> r;
    const double r_norm = residual_against(a, x, b, r);
    const double b_norm = l2_norm(b);
    return b_norm == 0.0 ? r_norm : r_norm / b_norm;
}

std::vector<double> solve(const LinearSystem& system)
{
    const auto& a = system.matrix;
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("solve: matrix is not square");
    }
    if (system.rhs.size() != static_cast<std::size_t>(a.rows())) {
        throw std::invalid_argument("solve: right-hand side has the wrong length");
    }
    if (a.rows() == 0) {
        return {};
    }
    const double b_norm = l2_norm(system.rhs);
    if (b_norm == 0.0) {
        return std::vector<double>(a.rows(), 0.0);
    }

    std::vector<double> x = system.settings.kind == SolverKind::Direct ? solve_direct(system) : solve_iterative(system);

    std::vector<double> r;
    const double r_norm = residual_against(a, x, system.rhs, r);
    if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }) ||
        !meets_contract(r_norm, b_norm, system.settings)) {
        throw SingularSystem(system.settings.kind == SolverKind::Direct ? "direct solve missed the residual target"
                                                                        : "iterative solve stalled above tolerance",
                             r_norm / b_norm);
    }
    return x;
}

namespace {

/// Bordered solve through one factorization of K with a single pressure dof
/// pinned. K = [[M, B^T], [B, 0]] has the one-dimensional null space z
/// (z^T K = 0, K symmetric), so for [K c; c^T 0][x; l] = [r; s]:
///   l = z^T r / z^T c,  K y = r - l c (pinned row dropped),
///   x = y + ((s - c^T y) / c^T z) z.
/// The dense border row never enters the factorization.
class PinnedSaddle {
public:
    PinnedSaddle(const SparseMatrix& k, std::span<const double> c, int pin) : c_(c.begin(), c.end()), pin_(pin)
    {
        const int n = k.rows();
        std::vector<Triplet> t;
        t.reserve(k.nonzeros() + 1);
        std::vector<double> column(n, 0.0);
        for (int r = 0; r < n; ++r) {
            for (int q = k.row_offsets()[r]; q < k.row_offsets()[r + 1]; ++q) {
                const int col = k.columns()[q];
                if (col == pin_) {
                    column[r] = k.values()[q];
                }
                if (r != pin_ && col != pin_) {
                    t.push_back({r, col, k.values()[q]});
                }
            }
        }
        t.push_back({pin_, pin_, 1.0});
        const EigenSparse a = to_eigen(SparseMatrix::from_triplets(n, n, t));
        lu_.analyzePattern(a);
        lu_.factorize(a);
        if (lu_.info() != Eigen::Success) {
            throw SingularSystem("sparse LU factorization failed: " + lu_.lastErrorMessage(),
                                 std::numeric_limits<double>::infinity());
        }
        for (auto& v : column) {
            v = -v;
        }
        column[pin_] = 1.0;
        z_ = pinned_solve(column);
        zc_ = inner(z_, c_);
        if (!(std::abs(zc_) > 0.0) || !std::isfinite(zc_)) {
            throw SingularSystem("mean constraint does not close the pressure null space",
                                 std::numeric_limits<double>::infinity());
        }
    }

    /// Solution of the bordered system; `rhs` has n + 1 entries.
    [[nodiscard]] std::vector<double> apply(std::span<const double> rhs) const
    {
        const std::size_t n = z_.size();
        const std::span<const double> r = rhs.first(n);
        const double l = inner(z_, r) / zc_;
        std::vector<double> reduced(n);
        for (std::size_t i = 0; i < n; ++i) {
            reduced[i] = r[i] - l * c_[i];
        }
        reduced[pin_] = 0.0;
        std::vector<double> x = pinned_solve(reduced);
        const double alpha = (rhs[n] - inner(c_, x)) / zc_;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * z_[i];
        }
        x.push_back(l);
        return x;
    }

private:
    [[nodiscard]] std::vector<double> pinned_solve(const std::vector<double>& b) const
    {
        const Eigen::Map<const EigenVector> bv(b.data(), static_cast<Eigen::Index>(b.size()));
        const EigenVector x = lu_.solve(bv);
        return {x.data(), x.data() + x.size()};
    }

    std::vector<double> c_;
    int pin_;
    Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<double> z_;
    double zc_ = 0.0;
};

}  // namespace

SaddleSolution solve_saddle(const SparseMatrix& m_block, const SparseMatrix& b_block, std::span<const double> rhs_u,
                            std::span<const double> rhs_p, std::span<const double> mean_constraint,
                            const SolverSettings& settings)
{
    const int nu = m_block.rows();
    const int np = b_block.rows();
    if (m_block.cols() != nu || b_block.cols() != nu || rhs_u.size() != static_cast<std::size_t>(nu) ||
        rhs_p.size() != static_cast<std::size_t>(np) || mean_constraint.size() != static_cast<std::size_t>(np)) {
        throw std::invalid_argument("solve_saddle: inconsistent block dimensions");
    }
    if (np == 0) {
        throw std::invalid_argument("solve_saddle: empty pressure block");
    }
    const int n = nu + np + 1;
    std::vector<Triplet> t;
    t.reserve(m_block.nonzeros() + 2 * b_block.nonzeros() + 2 * static_cast<std::size_t>(np));
    for (int r = 0; r < nu; ++r) {
        for (int k = m_block.row_offsets()[r]; k < m_block.row_offsets()[r + 1]; ++k) {
            t.push_back({r, m_block.columns()[k], m_block.values()[k]});
        }
    }
    for (int r = 0; r < np; ++r) {
        for (int k = b_block.row_offsets()[r]; k < b_block.row_offsets()[r + 1]; ++k) {
            const int c = b_block.columns()[k];
            const double v = b_block.values()[k];
            t.push_back({nu + r, c, v});
            t.push_back({c, nu + r, v});
        }
    }
    const std::size_t unbordered = t.size();
    for (int r = 0; r < np; ++r) {
        if (mean_constraint[r] != 0.0) {
            t.push_back({nu + r, n - 1, mean_constraint[r]});
            t.push_back({n - 1, nu + r, mean_constraint[r]});
        }
    }
    LinearSystem system;
    system.matrix = SparseMatrix::from_triplets(n, n, t);
    system.rhs.assign(n, 0.0);
    std::copy(rhs_u.begin(), rhs_u.end(), system.rhs.begin());
    std::copy(rhs_p.begin(), rhs_p.end(), system.rhs.begin() + nu);
    system.symmetric = true;
    system.settings = settings;

    std::vector<double> x;
    const double b_norm = l2_norm(system.rhs);
    if (settings.kind == SolverKind::Iterative || b_norm == 0.0) {
        x = solve(system);
    } else {
        t.resize(unbordered);
        const SparseMatrix k = SparseMatrix::from_triplets(n - 1, n - 1, t);
        std::vector<double> c(n - 1, 0.0);
        int pin = nu;
        for (int r = 0; r < np; ++r) {
            c[nu + r] = mean_constraint[r];
            if (std::abs(mean_constraint[r]) > std::abs(c[pin])) {
                pin = nu + r;
            }
        }
        const PinnedSaddle factor(k, c, pin);
        x = factor.apply(system.rhs);
        std::vector<double> r;
        double r_norm = residual_against(system.matrix, x, system.rhs, r);
        for (int step = 0; step < 3 && !meets_contract(r_norm, b_norm, settings); ++step) {
            const std::vector<double> dx = factor.apply(r);
            for (int i = 0; i < n; ++i) {
                x[i] += dx[i];
            }
            r_norm = residual_against(system.matrix, x, system.rhs, r);
        }
        if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }) ||
            !meets_contract(r_norm, b_norm, settings)) {
            throw SingularSystem("saddle solve missed the residual target", r_norm / b_norm);
        }
    }

    SaddleSolution out;
    out.u.assign(x.begin(), x.begin() + nu);
    out.p.assign(x.begin() + nu, x.begin() + nu + np);
    out.multiplier = x.back();

    double weight = 0.0;
    for (double v : mean_constraint) {
        weight += std::abs(v);
    }
    const double mean = weight > 0.0 ? inner(mean_constraint, out.p) / weight : 0.0;
    double scale = 1.0;
    for (double v : out.p) {
        scale = std::max(scale, std::abs(v));
    }
    if (std::abs(mean) > 1e-8 * scale) {
        throw ConstraintViolation("saddle solve returned pressure with weighted mean " + std::to_string(mean));
    }
    return out;
}

}  // namespace miscible
