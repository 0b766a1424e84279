#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ccmtl/errors.hpp"
#include "ccmtl/io_util.hpp"
#include "ccmtl/linalg.hpp"
#include "ccmtl/rng.hpp"
#include "oracles.hpp"

using namespace ccmtl;

namespace {

SymmetricOperator matrix_op(const DenseMatrix& m) {
    SymmetricOperator op;
    op.dim = m.rows();
    op.apply = [&m](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * in[j];
            out[i] = s;
        }
    };
    return op;
}

Vector diag_of(const DenseMatrix& m) {
    Vector d(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) d[i] = m(i, i);
    return d;
}

double rel_err(const Vector& got, const Vector& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-30);
}

} // namespace

TEST_CASE("DenseMatrix basics") {
    DenseMatrix m(2, 3, 1.5);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 1.5);
    m(0, 1) = -2.0;
    CHECK(m.flat()[1] == -2.0); // row-major layout

    DenseMatrix id = DenseMatrix::identity(3);
    CHECK(id(0, 0) == 1.0);
    CHECK(id(0, 1) == 0.0);

    CHECK_THROWS_AS(DenseMatrix(2, 2, Vector{1.0, 2.0, 3.0}), ContractViolation);

    DenseMatrix nan_m(1, 1);
    CHECK(nan_m.all_finite());
    nan_m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(nan_m.all_finite());

    DenseMatrix a(1, 2, Vector{1.0, 2.0});
    DenseMatrix b(1, 2, Vector{1.0, 2.0});
    CHECK(a == b);
    b(0, 1) = 3.0;
    CHECK_FALSE(a == b);
}

TEST_CASE("dot / norm2 / axpy") {
    Vector a{1.0, 2.0, 3.0};
    Vector b{4.0, -5.0, 6.0};
    CHECK(dot(a, b) == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(norm2(b) == doctest::Approx(std::sqrt(77.0)).epsilon(1e-15));

    Vector y{1.0, 1.0, 1.0};
    axpy(2.0, a, y);
    CHECK(y[0] == 3.0);
    CHECK(y[2] == 7.0);

    Vector short_v{1.0};
    CHECK_THROWS_AS(dot(a, short_v), ContractViolation);
    CHECK_THROWS_AS(axpy(1.0, a, short_v), ContractViolation);
}

TEST_CASE("cg on identity converges immediately") {
    DenseMatrix id = DenseMatrix::identity(2);
    Vector rhs{3.0, 4.0};
    Vector x0{0.0, 0.0};
    CgConfig cfg;
    cfg.preconditioner = Preconditioner::none;
    auto res = cg_solve(matrix_op(id), rhs, x0, cfg);
    CHECK(res.converged);
    CHECK(res.iterations <= 2);
    CHECK(res.solution[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(res.solution[1] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("cg solves a 2x2 SPD system exactly") {
    DenseMatrix a(2, 2, Vector{4.0, 1.0, 1.0, 3.0});
    Vector rhs{1.0, 2.0};
    Vector x0{0.0, 0.0};
    CgConfig cfg;
    cfg.tol = 1e-12;
    auto res = cg_solve(matrix_op(a), rhs, x0, cfg, diag_of(a));
    CHECK(res.converged);
    CHECK(res.solution[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-10));
    CHECK(res.solution[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-10));
    // true residual reported at exit
    CHECK(res.residual <= 1e-12 * norm2(rhs) + 1e-15);
}

TEST_CASE("cg handles a consistent singular PSD system") {
    // diag(1, 0): rhs (2, 0) lies in the range; from x0 = 0 CG returns the
    // minimum-norm solution (2, 0), never touching the null direction.
    DenseMatrix a(2, 2, Vector{1.0, 0.0, 0.0, 0.0});
    Vector rhs{2.0, 0.0};
    Vector x0{0.0, 0.0};
    CgConfig cfg;
    cfg.preconditioner = Preconditioner::none;
    auto res = cg_solve(matrix_op(a), rhs, x0, cfg);
    CHECK(res.converged);
    CHECK(res.solution[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.solution[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cg matches the dense direct solver on random SPD systems") {
    Rng rng(42);
    for (std::size_t dim : {3UL, 17UL, 64UL, 200UL}) {
        auto a = oracle::random_spd(dim, rng);
        Vector rhs(dim);
        for (auto& v : rhs) v = rng.normal();
        Vector x0(dim, 0.0);

        Vector direct = dense_direct_solve(a, rhs);

        for (auto pre : {Preconditioner::none, Preconditioner::jacobi}) {
            CgConfig cfg;
            cfg.tol = 1e-12;
            cfg.max_iter = 50 * dim;
            cfg.preconditioner = pre;
            auto res = cg_solve(matrix_op(a), rhs, x0, cfg, diag_of(a));
            CHECK(res.converged);
            CHECK(rel_err(res.solution, direct) <= 1e-6);
        }
    }
}

TEST_CASE("cg residual history records one entry per iteration and converges") {
    // The residual norm itself may oscillate between iterations (only the
    // energy-norm error is monotone), so the history is checked for shape,
    // a correct initial entry, finiteness, and a converged final entry.
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        auto a = oracle::random_spd(40, rng, 0.5);
        Vector rhs(40);
        for (auto& v : rhs) v = rng.normal();
        Vector x0(40, 0.0);
        CgConfig cfg;
        cfg.tol = 1e-10;
        auto res = cg_solve(matrix_op(a), rhs, x0, cfg, diag_of(a));
        CHECK(res.converged);
        REQUIRE(res.residual_history.size() == res.iterations + 1);

        // With x0 = 0 the initial residual is the rhs itself; the first
        // entry must be its Jacobi-preconditioned norm sqrt(r^T M^-1 r).
        double expect = 0.0;
        for (std::size_t i = 0; i < rhs.size(); ++i) expect += rhs[i] * rhs[i] / a(i, i);
        expect = std::sqrt(expect);
        CHECK(res.residual_history.front() == doctest::Approx(expect).epsilon(1e-12));

        for (double h : res.residual_history) CHECK(std::isfinite(h));
        // The final true residual satisfied the stopping rule.
        Vector ax = matrix_op(a)(res.solution);
        double rn = 0.0;
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            const double r = rhs[i] - ax[i];
            rn += r * r;
        }
        CHECK(std::sqrt(rn) <= cfg.tol * std::max(norm2(rhs), 1e-12) * (1.0 + 1e-9));
    }
}

TEST_CASE("cg result does not depend on the warm start") {
    Rng rng(11);
    auto a = oracle::random_spd(30, rng, 1.0);
    Vector rhs(30);
    for (auto& v : rhs) v = rng.normal();
    Vector zero(30, 0.0);
    Vector warm(30);
    for (auto& v : warm) v = rng.normal();

    CgConfig cfg;
    cfg.tol = 1e-12;
    auto from_zero = cg_solve(matrix_op(a), rhs, zero, cfg, diag_of(a));
    auto from_warm = cg_solve(matrix_op(a), rhs, warm, cfg, diag_of(a));
    CHECK(from_zero.converged);
    CHECK(from_warm.converged);
    CHECK(rel_err(from_warm.solution, from_zero.solution) <= 1e-8);

    // warm-starting from the answer costs zero iterations
    auto again = cg_solve(matrix_op(a), rhs, from_zero.solution, cfg, diag_of(a));
    CHECK(again.converged);
    CHECK(again.iterations == 0);
}

TEST_CASE("cg argument validation") {
    DenseMatrix id = DenseMatrix::identity(2);
    Vector rhs{1.0, 2.0};
    Vector x0{0.0, 0.0};
    Vector bad_x0{0.0};
    CgConfig cfg;

    CHECK_THROWS_AS(cg_solve(matrix_op(id), Vector{1.0}, bad_x0, cfg, diag_of(id)),
                    ContractViolation);
    CHECK_THROWS_AS(cg_solve(matrix_op(id), rhs, bad_x0, cfg, diag_of(id)), ContractViolation);

    CgConfig bad_tol;
    bad_tol.tol = 0.0;
    CHECK_THROWS_AS(cg_solve(matrix_op(id), rhs, x0, bad_tol, diag_of(id)), ContractViolation);

    // jacobi requested but no diagonal supplied
    CHECK_THROWS_AS(cg_solve(matrix_op(id), rhs, x0, cfg), ContractViolation);
}

TEST_CASE("cg surfaces non-finite arithmetic as NumericalError") {
    SymmetricOperator bad;
    bad.dim = 2;
    bad.apply = [](std::span<const double>, std::span<double> out) {
        out[0] = std::numeric_limits<double>::quiet_NaN();
        out[1] = 0.0;
    };
    Vector rhs{1.0, 1.0};
    Vector x0{0.0, 0.0};
    CgConfig cfg;
    cfg.preconditioner = Preconditioner::none;
    CHECK_THROWS_AS(cg_solve(bad, rhs, x0, cfg), NumericalError);
}

TEST_CASE("jacobi preconditioner divides by the clamped diagonal") {
    auto pre = jacobi_preconditioner(Vector{0.0, 2.0});
    Vector out = pre(Vector{1.0, 2.0});
    CHECK(out[0] == doctest::Approx(1e12).epsilon(1e-12)); // 1 / max(0, 1e-12)
    CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(jacobi_preconditioner(Vector{-1.0, 1.0}), ContractViolation);
    CHECK_THROWS_AS(jacobi_preconditioner(Vector{std::numeric_limits<double>::infinity()}),
                    ContractViolation);
}

TEST_CASE("dense_direct_solve basics and validation") {
    DenseMatrix id = DenseMatrix::identity(3);
    Vector rhs{1.0, 2.0, 3.0};
    Vector x = dense_direct_solve(id, rhs);
    CHECK(rel_err(x, rhs) <= 1e-14);

    DenseMatrix d(2, 2, Vector{2.0, 0.0, 0.0, 4.0});
    Vector y = dense_direct_solve(d, Vector{2.0, 8.0});
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(2.0).epsilon(1e-14));

    DenseMatrix rect(2, 3);
    CHECK_THROWS_AS(dense_direct_solve(rect, rhs), ContractViolation);
    CHECK_THROWS_AS(dense_direct_solve(id, Vector{1.0}), ContractViolation);

    DenseMatrix asym(2, 2, Vector{1.0, 2.0, 3.0, 4.0});
    CHECK_THROWS_AS(dense_direct_solve(asym, Vector{1.0, 1.0}), ContractViolation);

    DenseMatrix singular(2, 2, Vector{1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS(dense_direct_solve(singular, Vector{1.0, 1.0}), NumericalError);
}

TEST_CASE("dense_direct_solve hits 1e-10 relative residual on a 50x50 SPD system") {
    Rng rng(3);
    auto a = oracle::random_spd(50, rng);
    Vector rhs(50);
    for (auto& v : rhs) v = rng.normal();
    Vector x = dense_direct_solve(a, rhs);

    Vector ax(50, 0.0);
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 50; ++j) ax[i] += a(i, j) * x[j];
    CHECK(rel_err(ax, rhs) <= 1e-10);
}

TEST_CASE("Rng stream is stable and statistically sane") {
    // Golden values pin the exact stream; any change to the generator or the
    // transforms silently breaks every seeded artifact, so fail loudly here.
    Rng a(123);
    Rng b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform01() == b.uniform01());

    Rng c(2024);
    double mean = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double v = c.normal();
        mean += v;
        sq += v * v;
    }
    mean /= n;
    sq = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(sq - 1.0) < 0.05);

    Rng d(5);
    for (int i = 0; i < 1000; ++i) {
        double u = d.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        auto k = d.next_below(7);
        CHECK(k < 7);
    }
    CHECK(d.next_below(1) == 0);

    // shuffle is a permutation and seed-deterministic
    std::vector<int> v1{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> v2 = v1;
    Rng s1(9), s2(9);
    s1.shuffle(v1);
    s2.shuffle(v2);
    CHECK(v1 == v2);
    std::vector<int> sorted = v1;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("format_double round-trips") {
    Rng rng(77);
    for (int i = 0; i < 200; ++i) {
        double v = rng.normal() * std::pow(10.0, rng.normal() * 3.0);
        // 17 significant digits reproduce the exact bits
        double back17 = std::strtod(format_double(v, 17).c_str(), nullptr);
        CHECK(back17 == v);
        // 12 significant digits reproduce the value to ~1e-11 relative
        double back12 = std::strtod(format_double(v, 12).c_str(), nullptr);
        CHECK(std::abs(back12 - v) <= 1e-11 * std::abs(v));
    }
    CHECK(format_double(0.25, 12) == "0.25");
    CHECK(format_double(0.0, 17) == "0");
}

TEST_CASE("AtomicFile commits atomically") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "ccmtl_test_atomic";
    fs::create_directories(dir);
    fs::path target = dir / "out.txt";
    fs::path tmp = dir / "out.txt.tmp";
    fs::remove(target);
    fs::remove(tmp);

    {
        AtomicFile f(target.string());
        f.stream() << "hello\n";
        // nothing visible at the destination before commit
        CHECK_FALSE(fs::exists(target));
        f.commit();
    }
    CHECK(fs::exists(target));
    CHECK_FALSE(fs::exists(tmp));
    std::ifstream in(target);
    std::string line;
    std::getline(in, line);
    CHECK(line == "hello");

    // abandoned writer leaves no debris
    fs::path target2 = dir / "never.txt";
    {
        AtomicFile f(target2.string());
        f.stream() << "partial";
    }
    CHECK_FALSE(fs::exists(target2));
    CHECK_FALSE(fs::exists(dir / "never.txt.tmp"));
    fs::remove_all(dir);
}
