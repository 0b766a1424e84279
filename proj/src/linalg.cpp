#include "ccmtl/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ccmtl/errors.hpp"

namespace ccmtl {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Vector entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw ContractViolation("DenseMatrix: entries length " + std::to_string(data_.size()) +
                                " != rows*cols = " + std::to_string(rows_ * cols_));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool DenseMatrix::all_finite() const { return ccmtl::all_finite(data_); }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ContractViolation("dot: length mismatch " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size())
        throw ContractViolation("axpy: length mismatch " + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

Vector SymmetricOperator::operator()(std::span<const double> in) const {
    Vector out(dim, 0.0);
    apply(in, out);
    return out;
}

SymmetricOperator jacobi_preconditioner(Vector diag) {
    for (double d : diag)
        if (d < 0.0 || !std::isfinite(d))
            throw ContractViolation("jacobi_preconditioner: diagonal entries must be finite and >= 0");
    const std::size_t n = diag.size();
    return SymmetricOperator{
        n, [d = std::move(diag)](std::span<const double> in, std::span<double> out) {
            for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] / std::max(d[i], kEpsFloor);
        }};
}

CgResult cg_solve(const SymmetricOperator& op, std::span<const double> rhs,
                  std::span<const double> x0, const CgConfig& cfg,
                  std::span<const double> system_diag) {
    const std::size_t n = op.dim;
    if (rhs.size() != n || x0.size() != n)
        throw ContractViolation("cg_solve: dimension mismatch, op.dim=" + std::to_string(n) +
                                " |rhs|=" + std::to_string(rhs.size()) +
                                " |x0|=" + std::to_string(x0.size()));
    if (cfg.tol <= 0.0) throw ContractViolation("cg_solve: tol must be > 0");

    const bool use_jacobi = cfg.preconditioner == Preconditioner::jacobi;
    if (use_jacobi && system_diag.size() != n)
        throw ContractViolation("cg_solve: jacobi preconditioner requested but system_diag has size " +
                                std::to_string(system_diag.size()));
    SymmetricOperator precond;
    if (use_jacobi) precond = jacobi_preconditioner(Vector(system_diag.begin(), system_diag.end()));

    const std::size_t max_iter = cfg.max_iter > 0 ? cfg.max_iter : 10 * std::max<std::size_t>(n, 1);

    CgResult res;
    res.solution.assign(x0.begin(), x0.end());
    Vector r(n), z(n), p(n), ap(n);

    op.apply(res.solution, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];

    const double threshold = cfg.tol * std::max(norm2(rhs), kEpsFloor);

    auto apply_precond = [&](const Vector& in, Vector& out) {
        if (use_jacobi)
            precond.apply(in, out);
        else
            std::copy(in.begin(), in.end(), out.begin());
    };

    apply_precond(r, z);
    double rz = dot(r, z);
    res.residual_history.push_back(std::sqrt(std::max(rz, 0.0)));

    auto finish = [&](bool converged) {
        op.apply(res.solution, ap);
        for (std::size_t i = 0; i < n; ++i) ap[i] -= rhs[i];
        res.residual = norm2(ap);
        res.converged = converged;
        return res;
    };

    if (norm2(r) <= threshold) return finish(true);

    p = z;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        op.apply(p, ap);
        const double pap = dot(p, ap);
        if (!std::isfinite(pap))
            throw NumericalError("cg_solve: non-finite curvature p'Ap at iteration " +
                                 std::to_string(it));
        if (pap <= 0.0) {
            // exhausted the range of a PSD operator; the current iterate
            // is the best attainable in this Krylov space
            res.iterations = it - 1;
            return finish(norm2(r) <= threshold);
        }
        const double alpha = rz / pap;
        axpy(alpha, p, res.solution);
        axpy(-alpha, ap, r);
        if (!all_finite(r))
            throw NumericalError("cg_solve: non-finite residual at iteration " + std::to_string(it));

        apply_precond(r, z);
        const double rz_new = dot(r, z);
        res.residual_history.push_back(std::sqrt(std::max(rz_new, 0.0)));
        res.iterations = it;
        if (norm2(r) <= threshold) return finish(true);
        const double beta = rz_new / rz;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rz = rz_new;
    }
    return finish(false);
}

Vector dense_direct_solve(const DenseMatrix& a, std::span<const double> rhs) {
    if (a.rows() != a.cols())
        throw ContractViolation("dense_direct_solve: matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", expected square");
    const std::size_t n = a.rows();
    if (rhs.size() != n)
        throw ContractViolation("dense_direct_solve: rhs length " + std::to_string(rhs.size()) +
                                " != dim " + std::to_string(n));

    double max_abs = 0.0;
    for (double v : a.flat()) max_abs = std::max(max_abs, std::abs(v));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-10 * std::max(max_abs, 1.0))
                throw ContractViolation("dense_direct_solve: matrix is not symmetric at (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> m(a.data(), static_cast<Eigen::Index>(n),
                                 static_cast<Eigen::Index>(n));
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n));

    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (lu.rank() < static_cast<Eigen::Index>(n))
        throw NumericalError("dense_direct_solve: singular system, rank " +
                             std::to_string(lu.rank()) + " < " + std::to_string(n));
    Eigen::VectorXd x = lu.solve(b);
    return Vector(x.data(), x.data() + n);
}

} // namespace ccmtl
