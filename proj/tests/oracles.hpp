#pragma once

// Independent reference implementations the tests check the library against.
// Everything here favors explicit naive loops and dense assembly over speed,
// and deliberately shares no code with the library's optimized paths (the
// one exception: reference_fit uses dense_direct_solve, the designated
// direct-factorization oracle).

#include <cstdint>
#include <utility>
#include <vector>

#include "ccmtl/dataset.hpp"
#include "ccmtl/graph.hpp"
#include "ccmtl/linalg.hpp"
#include "ccmtl/rng.hpp"

namespace oracle {

// Objective and surrogate recomputed from their formulas with scalar loops.
double naive_objective(const ccmtl::TaskDataset& data, const ccmtl::WeightMatrix& w,
                       const ccmtl::TaskGraph& g, double lambda);
double naive_surrogate(const ccmtl::TaskDataset& data, const ccmtl::WeightMatrix& w,
                       const ccmtl::TaskGraph& g, const ccmtl::EdgeWeights& l, double lambda);

// Dense TP x TP Kronecker assembly of the graph term:
// (lambda * sum_{(i,j)} l_ij (e_i - e_j)(e_i - e_j)^T) (x) I_P.
ccmtl::DenseMatrix dense_graph_matrix(const ccmtl::TaskGraph& g, const ccmtl::EdgeWeights& l,
                                      double lambda, std::size_t feature_dim);

// Dense block-diagonal data term blockdiag(X_t X_t^T), naive triple loops.
ccmtl::DenseMatrix dense_data_matrix(const ccmtl::TaskDataset& data);

// Stacked right-hand side X_t y_t.
ccmtl::Vector dense_rhs(const ccmtl::TaskDataset& data);

// Per-task data-term application computed as X_t (X_t^T w_t), i.e. without
// forming the Gram matrix the library precomputes.
ccmtl::WeightMatrix naive_data_apply(const ccmtl::TaskDataset& data,
                                     const ccmtl::WeightMatrix& w);

// Exhaustive k-nearest-neighbour edge set: full pairwise distances, per-node
// full sort with ties to the lower index, union-symmetrized, sorted.
std::vector<std::pair<std::size_t, std::size_t>> exhaustive_knn_edges(
    const ccmtl::WeightMatrix& points, std::size_t k);

// Random SPD matrix M^T M + delta I with entries from rng.
ccmtl::DenseMatrix random_spd(std::size_t n, ccmtl::Rng& rng, double delta = 1e-3);

// Random regression instance: T in [2, max_tasks], P in [1, max_features],
// per-task sample counts in [min_samples, max_samples], targets carrying a
// planted linear signal plus noise.
ccmtl::TaskDataset random_dataset(ccmtl::Rng& rng, std::size_t max_tasks = 10,
                                  std::size_t max_features = 4, std::size_t max_samples = 30,
                                  std::size_t min_samples = 2);

struct ReferenceFit {
    ccmtl::WeightMatrix weights;
    std::vector<double> objective_trace;
};

// The alternating algorithm re-implemented against dense assembly: per-task
// ridge init via dense solves, exhaustive kNN graph, closed-form edge weights
// and a dense direct solve of the full (graph + data) system each iteration.
ReferenceFit reference_fit(const ccmtl::TaskDataset& data, double lambda, std::size_t k,
                           double ridge_init = 1e-6, double edge_eps = 1e-8,
                           double outer_tol = 1e-5, std::size_t max_outer = 100);

} // namespace oracle
