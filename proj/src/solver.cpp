#include "ccmtl/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <utility>

#include "ccmtl/errors.hpp"
#include "ccmtl/parallel.hpp"

namespace ccmtl {

namespace {

void check_shapes(const TaskDataset& data, const WeightMatrix& weights, const TaskGraph& graph) {
    if (weights.rows() != data.num_tasks() || weights.cols() != data.feature_dim())
        throw ContractViolation("weight matrix shape does not match dataset");
    if (graph.num_nodes != data.num_tasks())
        throw ContractViolation("graph node count does not match dataset");
}

double squared_loss(const TaskDataset& data, const WeightMatrix& weights) {
    // Predictions accumulate feature-by-feature into a residual buffer so the
    // inner loops stream contiguous feature rows; each sample still sums its
    // terms in ascending feature order, so the result matches a per-sample
    // dot product bit for bit.
    double loss = 0.0;
    Vector pred;
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const Task& task = data.task(t);
        const auto w = weights.row(t);
        const std::size_t ns = task.n_samples();
        pred.assign(ns, 0.0);
        for (std::size_t p = 0; p < data.feature_dim(); ++p) {
            const double c = w[p];
            const auto row = task.features.row(p);
            for (std::size_t j = 0; j < ns; ++j) pred[j] += c * row[j];
        }
        for (std::size_t j = 0; j < ns; ++j) {
            const double r = pred[j] - task.targets[j];
            loss += r * r;
        }
    }
    return 0.5 * loss;
}

double edge_distance(const WeightMatrix& weights, std::size_t i, std::size_t j) {
    const auto wi = weights.row(i);
    const auto wj = weights.row(j);
    double d2 = 0.0;
    for (std::size_t p = 0; p < weights.cols(); ++p) {
        const double diff = wi[p] - wj[p];
        d2 += diff * diff;
    }
    return std::sqrt(d2);
}

// Small SPD solve of (gram + ridge I) w = rhs by conjugate gradient; kept
// iterative so the direct-factorization path stays a test-only oracle.
Vector ridge_solve(const DenseMatrix& gram, std::span<const double> rhs, double ridge) {
    const std::size_t p = gram.rows();
    SymmetricOperator op{p, [&gram, ridge, p](std::span<const double> in, std::span<double> out) {
                             for (std::size_t i = 0; i < p; ++i) {
                                 double acc = ridge * in[i];
                                 const auto row = gram.row(i);
                                 for (std::size_t j = 0; j < p; ++j) acc += row[j] * in[j];
                                 out[i] = acc;
                             }
                         }};
    Vector diag(p);
    for (std::size_t i = 0; i < p; ++i) diag[i] = gram(i, i) + ridge;
    CgConfig cfg;
    cfg.tol = 1e-14;
    cfg.max_iter = std::max<std::size_t>(50 * p, 200);
    const Vector x0(p, 0.0);
    return cg_solve(op, rhs, x0, cfg, diag).solution;
}

WeightMatrix init_from_normals(const NormalEquations& normals, double ridge,
                               std::size_t threads) {
    if (ridge < 0.0) throw ValidationError("init_weights: ridge must be >= 0");
    WeightMatrix w(normals.num_tasks, normals.feature_dim);
    parallel_for(normals.num_tasks, threads, [&](std::size_t t) {
        const Vector wt = ridge_solve(normals.gram[t], normals.xty.row(t), ridge);
        std::copy(wt.begin(), wt.end(), w.row(t).begin());
    });
    if (!w.all_finite()) throw NumericalError("init_weights produced non-finite values");
    return w;
}

} // namespace

NormalEquations precompute_normal_equations(const TaskDataset& data, std::size_t threads) {
    const std::size_t p = data.feature_dim();
    NormalEquations normals;
    normals.num_tasks = data.num_tasks();
    normals.feature_dim = p;
    normals.gram.assign(normals.num_tasks, DenseMatrix(p, p));
    normals.xty = WeightMatrix(normals.num_tasks, p);
    normals.yty.assign(normals.num_tasks, 0.0);
    parallel_for(normals.num_tasks, threads, [&](std::size_t t) {
        const Task& task = data.task(t);
        DenseMatrix& gram = normals.gram[t];
        auto xty = normals.xty.row(t);
        for (std::size_t i = 0; i < p; ++i) {
            const auto xi = task.features.row(i);
            xty[i] = dot(xi, task.targets);
            for (std::size_t j = i; j < p; ++j) {
                const double g = dot(xi, task.features.row(j));
                gram(i, j) = g;
                gram(j, i) = g;
            }
        }
        normals.yty[t] = dot(task.targets, task.targets);
    });
    return normals;
}

WeightMatrix init_weights(const TaskDataset& data, double ridge, std::size_t threads) {
    return init_from_normals(precompute_normal_equations(data, threads), ridge, threads);
}

namespace {

double edge_penalty(const WeightMatrix& weights, const TaskGraph& graph) {
    double penalty = 0.0;
    for (const auto& [i, j] : graph.edges) penalty += edge_distance(weights, i, j);
    return penalty;
}

// Squared loss through the precomputed per-task normal equations:
// ||X_t^T w - y_t||^2 = w^T (X_t X_t^T) w - 2 w^T (X_t y_t) + y_t^T y_t.
// Touches O(P^2) data per task instead of the full sample matrix, which is
// what keeps per-iteration objective bookkeeping cheap on large task
// collections.  Agrees with the residual form up to rounding.
double loss_from_normals(const NormalEquations& normals, const WeightMatrix& weights) {
    double loss = 0.0;
    const std::size_t p = normals.feature_dim;
    for (std::size_t t = 0; t < normals.num_tasks; ++t) {
        const auto w = weights.row(t);
        const DenseMatrix& gram = normals.gram[t];
        const auto c = normals.xty.row(t);
        double quad = 0.0;
        double lin = 0.0;
        for (std::size_t a = 0; a < p; ++a) {
            const auto ga = gram.row(a);
            double acc = 0.0;
            for (std::size_t b = 0; b < p; ++b) acc += ga[b] * w[b];
            quad += w[a] * acc;
            lin += c[a] * w[a];
        }
        loss += quad - 2.0 * lin + normals.yty[t];
    }
    return 0.5 * loss;
}

} // namespace

double objective(const TaskDataset& data, const WeightMatrix& weights, const TaskGraph& graph,
                 double lambda) {
    check_shapes(data, weights, graph);
    return squared_loss(data, weights) + 0.5 * lambda * edge_penalty(weights, graph);
}

double surrogate_objective(const TaskDataset& data, const WeightMatrix& weights,
                           const TaskGraph& graph, const EdgeWeights& edge_weights,
                           double lambda) {
    check_shapes(data, weights, graph);
    if (edge_weights.size() != graph.edges.size())
        throw ContractViolation("surrogate_objective: edge weight count mismatch");
    double penalty = 0.0;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const double l = edge_weights[e];
        if (!(l > 0.0))
            throw ContractViolation("surrogate_objective: edge weights must be > 0");
        const auto [i, j] = graph.edges[e];
        const double d = edge_distance(weights, i, j);
        penalty += l * d * d + 0.25 / l;
    }
    return squared_loss(data, weights) + 0.5 * lambda * penalty;
}

SymmetricOperator weight_system_operator(const NormalEquations& normals, const TaskGraph& graph,
                                         const EdgeWeights& edge_weights, double lambda) {
    if (graph.num_nodes != normals.num_tasks)
        throw ContractViolation("weight_system_operator: graph node count mismatch");
    const std::size_t p = normals.feature_dim;
    return SymmetricOperator{
        normals.num_tasks * p,
        [&normals, &graph, &edge_weights, lambda, p](std::span<const double> in,
                                                     std::span<double> out) {
            for (std::size_t t = 0; t < normals.num_tasks; ++t) {
                const DenseMatrix& gram = normals.gram[t];
                const double* vt = in.data() + t * p;
                double* ot = out.data() + t * p;
                for (std::size_t i = 0; i < p; ++i) {
                    const auto row = gram.row(i);
                    double acc = 0.0;
                    for (std::size_t j = 0; j < p; ++j) acc += row[j] * vt[j];
                    ot[i] = acc;
                }
            }
            apply_graph_regularizer(graph, edge_weights, lambda, in, p, out);
        }};
}

Vector weight_system_diagonal(const NormalEquations& normals, const TaskGraph& graph,
                              const EdgeWeights& edge_weights, double lambda) {
    const std::size_t p = normals.feature_dim;
    const Vector degree = regularizer_diagonal(graph, edge_weights, lambda, normals.num_tasks);
    Vector diag(normals.num_tasks * p);
    for (std::size_t t = 0; t < normals.num_tasks; ++t)
        for (std::size_t i = 0; i < p; ++i) diag[t * p + i] = degree[t] + normals.gram[t](i, i);
    return diag;
}

Vector weight_system_rhs(const NormalEquations& normals) {
    const auto flat = normals.xty.flat();
    return {flat.begin(), flat.end()};
}

WeightSolveResult solve_weight_system(const NormalEquations& normals, const TaskGraph& graph,
                                      const EdgeWeights& edge_weights, double lambda,
                                      const WeightMatrix& w_prev, const CgConfig& cg) {
    if (w_prev.rows() != normals.num_tasks || w_prev.cols() != normals.feature_dim)
        throw ContractViolation("solve_weight_system: warm-start shape mismatch");
    const SymmetricOperator op = weight_system_operator(normals, graph, edge_weights, lambda);
    const Vector rhs = weight_system_rhs(normals);
    Vector diag;
    if (cg.preconditioner == Preconditioner::jacobi)
        diag = weight_system_diagonal(normals, graph, edge_weights, lambda);
    CgResult res = cg_solve(op, rhs, w_prev.flat(), cg, diag);
    return WeightSolveResult{
        WeightMatrix(normals.num_tasks, normals.feature_dim, std::move(res.solution)),
        res.iterations, res.residual, res.converged};
}

WeightSolveResult solve_weight_system(const TaskDataset& data, const TaskGraph& graph,
                                      const EdgeWeights& edge_weights, double lambda,
                                      const WeightMatrix& w_prev, const CgConfig& cg) {
    return solve_weight_system(precompute_normal_equations(data), graph, edge_weights, lambda,
                               w_prev, cg);
}

FitReport fit(const TaskDataset& data, const FitConfig& config) {
    if (config.lambda < 0.0) throw ValidationError("fit: lambda must be >= 0");
    if (config.outer_tol <= 0.0) throw ValidationError("fit: outer_tol must be > 0");
    if (config.max_outer_iter < 1) throw ValidationError("fit: max_outer_iter must be >= 1");
    if (config.edge_eps <= 0.0) throw ValidationError("fit: edge_eps must be > 0");
    if (config.ridge_init < 0.0) throw ValidationError("fit: ridge_init must be >= 0");
    if (config.k < 1) throw ValidationError("fit: k must be >= 1");

    const auto t_start = std::chrono::steady_clock::now();
    FitReport report;
    report.bias_added = config.add_bias;

    const TaskDataset train = config.add_bias ? data.with_bias_column() : data;
    const NormalEquations normals = precompute_normal_equations(train, config.threads);
    WeightMatrix w = init_from_normals(normals, config.ridge_init, config.threads);

    const auto finish = [&](WeightMatrix weights, bool converged) {
        if (!weights.all_finite()) throw NumericalError("fit produced non-finite weights");
        report.weights = std::move(weights);
        report.converged = converged;
        report.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return report;
    };

    if (train.num_tasks() < 2) {
        report.warnings.push_back("fewer than 2 tasks: no graph coupling, returning "
                                  "independent per-task solutions");
        const double obj = loss_from_normals(normals, w);
        report.objective_trace = {obj, obj};
        report.outer_iterations = 1;
        report.cg_iterations = {0};
        return finish(std::move(w), true);
    }

    const TaskGraph graph = build_knn_graph(w, config.k);
    const auto trace_objective = [&](const WeightMatrix& weights) {
        return loss_from_normals(normals, weights) +
               0.5 * config.lambda * edge_penalty(weights, graph);
    };

    // The coupling term vanishes when lambda = 0 (or no edges exist), and the
    // initial weights already solve each decoupled block.
    if (config.lambda == 0.0 || graph.edges.empty()) {
        const double obj = trace_objective(w);
        report.objective_trace = {obj, obj};
        report.outer_iterations = 1;
        report.cg_iterations = {0};
        return finish(std::move(w), true);
    }

    double obj_prev = trace_objective(w);
    report.objective_trace = {obj_prev};
    bool converged = false;
    for (std::size_t iter = 1; iter <= config.max_outer_iter; ++iter) {
        const EdgeWeights l = update_edge_weights(w, graph, config.edge_eps);
        WeightSolveResult step =
            solve_weight_system(normals, graph, l, config.lambda, w, config.cg);
        if (!step.converged) {
            std::ostringstream msg;
            msg << "inner solver hit its iteration cap at outer iteration " << iter
                << " (residual " << step.residual << ")";
            report.warnings.push_back(msg.str());
        }
        w = std::move(step.weights);
        const double obj = trace_objective(w);
        report.objective_trace.push_back(obj);
        report.cg_iterations.push_back(step.cg_iterations);
        report.outer_iterations = iter;
        if (std::abs(obj_prev - obj) < config.outer_tol * std::max(std::abs(obj_prev), kEpsFloor)) {
            converged = true;
            break;
        }
        obj_prev = obj;
    }
    return finish(std::move(w), converged);
}

std::vector<Vector> predict(const WeightMatrix& weights, const TaskDataset& data) {
    if (weights.cols() != data.feature_dim()) {
        std::ostringstream msg;
        msg << "predict: model feature_dim " << weights.cols() << " != data feature_dim "
            << data.feature_dim();
        throw ContractViolation(msg.str());
    }
    if (weights.rows() != data.num_tasks()) {
        std::ostringstream msg;
        msg << "predict: model has " << weights.rows() << " tasks, data has " << data.num_tasks();
        throw ContractViolation(msg.str());
    }
    std::vector<Vector> out(data.num_tasks());
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const Task& task = data.task(t);
        const auto w = weights.row(t);
        Vector& pred = out[t];
        pred.assign(task.n_samples(), 0.0);
        for (std::size_t j = 0; j < task.n_samples(); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < data.feature_dim(); ++p)
                acc += w[p] * task.features(p, j);
            pred[j] = acc;
        }
    }
    return out;
}

} // namespace ccmtl
