#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ccmtl {

using Vector = std::vector<double>;

/// Clamp floor applied wherever a near-zero quantity would otherwise be
/// divided by (preconditioner diagonals, relative-change denominators).
inline constexpr double kEpsFloor = 1e-12;

/// Row-major dense matrix of doubles. Also used for task weight stacks,
/// where row t holds the weight vector of task t and flattening row-major
/// gives the stacked per-task unknown vector of the coupled system.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    DenseMatrix(std::size_t rows, std::size_t cols, Vector entries);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }
    Vector& storage() { return data_; }
    const Vector& storage() const { return data_; }

    bool all_finite() const;

    bool operator==(const DenseMatrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

/// Task weight stack: one row per task, one column per feature.
using WeightMatrix = DenseMatrix;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
bool all_finite(std::span<const double> v);

/// Symmetric positive semi-definite linear map given only by its action.
struct SymmetricOperator {
    std::size_t dim = 0;
    /// out = A * in; |in| = |out| = dim. Must not alias.
    std::function<void(std::span<const double>, std::span<double>)> apply;

    Vector operator()(std::span<const double> in) const;
};

enum class Preconditioner { none, jacobi };

struct CgConfig {
    /// Relative residual threshold against max(||rhs||, kEpsFloor).
    double tol = 1e-8;
    /// 0 means automatic: 10 * dim.
    std::size_t max_iter = 0;
    Preconditioner preconditioner = Preconditioner::jacobi;
};

struct CgResult {
    Vector solution;
    std::size_t iterations = 0;
    /// True residual norm ||A x - b|| recomputed at exit.
    double residual = 0.0;
    bool converged = false;
    /// Preconditioned residual norm sqrt(r' M^-1 r) per iteration,
    /// starting with the initial residual.
    Vector residual_history;
};

/// Preconditioned conjugate gradient for symmetric PSD operators.
/// Consistent singular systems are fine: iterates stay in the Krylov
/// space of the residual. `system_diag` supplies the operator diagonal
/// when cfg.preconditioner == jacobi; it is ignored otherwise.
CgResult cg_solve(const SymmetricOperator& op, std::span<const double> rhs,
                  std::span<const double> x0, const CgConfig& cfg,
                  std::span<const double> system_diag = {});

/// Operator that divides elementwise by max(diag_i, kEpsFloor).
SymmetricOperator jacobi_preconditioner(Vector diag);

/// Direct solve of a symmetric full-rank system; the test-side reference
/// for the iterative path. Intended for dimensions up to ~2000. Pivots
/// below the factorization's rank threshold raise NumericalError.
Vector dense_direct_solve(const DenseMatrix& a, std::span<const double> rhs);

} // namespace ccmtl
