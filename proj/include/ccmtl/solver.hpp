#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ccmtl/dataset.hpp"
#include "ccmtl/graph.hpp"
#include "ccmtl/linalg.hpp"

namespace ccmtl {

struct FitConfig {
    double lambda = 1.0;          // fusion strength on the task graph
    std::size_t k = 10;           // neighbours in the task graph
    double outer_tol = 1e-5;      // relative objective change that stops the outer loop
    std::size_t max_outer_iter = 100;
    double ridge_init = 1e-6;     // ridge in the per-task initialization
    double edge_eps = 1e-8;       // distance floor in the edge-weight update
    bool add_bias = false;        // append a constant-1 feature before fitting
    CgConfig cg{};                // inner linear-system solver controls
    std::size_t threads = 1;      // worker threads for per-task precomputation
};

struct FitReport {
    WeightMatrix weights;                 // one row per task
    std::vector<double> objective_trace;  // initial value, then one entry per outer iteration
    std::size_t outer_iterations = 0;
    std::vector<std::size_t> cg_iterations; // inner iterations per outer iteration
    double wall_time_seconds = 0.0;
    bool converged = false;
    bool bias_added = false;
    std::vector<std::string> warnings;
};

// Per-task normal-equation blocks, computed once per fit: the coupled system's
// block-diagonal data term is X_t X_t^T and its right-hand side is X_t y_t,
// so the iterative solver never touches the raw samples.
struct NormalEquations {
    std::size_t num_tasks = 0;
    std::size_t feature_dim = 0;
    std::vector<DenseMatrix> gram; // X_t X_t^T, one P x P block per task
    WeightMatrix xty;              // row t = X_t y_t
    Vector yty;                    // y_t . y_t per task
};

NormalEquations precompute_normal_equations(const TaskDataset& data, std::size_t threads = 1);

// Independent ridge regression per task: solves (X_t X_t^T + ridge I) w = X_t y_t.
// Finite for every task, including underdetermined ones (N_t < P).
WeightMatrix init_weights(const TaskDataset& data, double ridge, std::size_t threads = 1);

// Training objective: 1/2 sum_t ||W_t^T X_t - y_t||^2
//                   + (lambda/2) sum_{(i,j) in G} ||W_i - W_j||_2.
double objective(const TaskDataset& data, const WeightMatrix& weights, const TaskGraph& graph,
                 double lambda);

// Variational upper bound with auxiliary edge weights l > 0:
// 1/2 sum_t ||W_t^T X_t - y_t||^2
//   + (lambda/2) sum_edges (l_ij ||W_i - W_j||^2 + 1/(4 l_ij)).
// Equals the objective when l_ij = 1/(2||W_i - W_j||), and never undercuts it.
double surrogate_objective(const TaskDataset& data, const WeightMatrix& weights,
                           const TaskGraph& graph, const EdgeWeights& edge_weights, double lambda);

// The coupled system matrix lambda*L(l) (x) I_P + blockdiag(X_t X_t^T) acting on
// flattened weight stacks, plus its diagonal (for Jacobi preconditioning) and
// right-hand side.  The Laplacian factor is applied edge-by-edge, never formed.
SymmetricOperator weight_system_operator(const NormalEquations& normals, const TaskGraph& graph,
                                         const EdgeWeights& edge_weights, double lambda);
Vector weight_system_diagonal(const NormalEquations& normals, const TaskGraph& graph,
                              const EdgeWeights& edge_weights, double lambda);
Vector weight_system_rhs(const NormalEquations& normals);

struct WeightSolveResult {
    WeightMatrix weights;
    std::size_t cg_iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// One W-step: solves the coupled system for fixed edge weights, warm-started
// from w_prev.  Non-convergence at the iteration cap is reported, not fatal.
WeightSolveResult solve_weight_system(const TaskDataset& data, const TaskGraph& graph,
                                      const EdgeWeights& edge_weights, double lambda,
                                      const WeightMatrix& w_prev, const CgConfig& cg);
WeightSolveResult solve_weight_system(const NormalEquations& normals, const TaskGraph& graph,
                                      const EdgeWeights& edge_weights, double lambda,
                                      const WeightMatrix& w_prev, const CgConfig& cg);

// Full alternating fit: per-task init, k-NN graph on the initial weights, then
// alternate closed-form edge-weight updates with warm-started CG solves until
// the relative objective change drops below outer_tol.
FitReport fit(const TaskDataset& data, const FitConfig& config);

// Per-task predictions y_hat_t = W_t^T X_t; tasks align with weight rows.
std::vector<Vector> predict(const WeightMatrix& weights, const TaskDataset& data);

} // namespace ccmtl
