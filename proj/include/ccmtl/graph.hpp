#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccmtl/linalg.hpp"

namespace ccmtl {

// Undirected graph over tasks.  Edges are stored once with i < j, sorted
// lexicographically, so every traversal of the edge list is deterministic.
struct TaskGraph {
    std::size_t num_nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// One weight per edge, aligned with TaskGraph::edges.
using EdgeWeights = Vector;

// Symmetric k-nearest-neighbour graph on the rows of `weights`: each node is
// connected to its k closest neighbours in Euclidean distance (ties broken by
// lower node index), and the directed lists are merged into undirected edges.
// k is truncated to num_nodes - 1 when it exceeds it.
TaskGraph build_knn_graph(const WeightMatrix& weights, std::size_t k);

// Edge weights minimizing the surrogate at the current weights:
// l_ij = 1 / (2 * ||W_i - W_j||), with the distance floored at `eps` to keep
// the weight finite when the incident rows have (numerically) fused.
EdgeWeights update_edge_weights(const WeightMatrix& weights, const TaskGraph& graph,
                                double eps = 1e-8);

// Returns lambda * L(l) * W, where L(l) is the weighted graph Laplacian:
// row i of the result is lambda * sum over incident edges of l_ij * (W_i - W_j).
WeightMatrix apply_graph_regularizer(const WeightMatrix& weights, const TaskGraph& graph,
                                     const EdgeWeights& edge_weights, double lambda);

// Accumulating core of the above on flattened row-major storage (row t lives
// at [t*feature_dim, (t+1)*feature_dim)): out += lambda * L(l) * W.  This is
// the form the conjugate-gradient operator calls; the matrix overload wraps it.
void apply_graph_regularizer(const TaskGraph& graph, const EdgeWeights& edge_weights,
                             double lambda, std::span<const double> weights_flat,
                             std::size_t feature_dim, std::span<double> out_flat);

// Diagonal of lambda * L(l) per node: entry t is lambda * degree(t), where
// degree(t) sums l_ij over edges incident to t.  Replicated per feature this
// is the diagonal of the flattened regularizer operator.  num_tasks must
// match the graph and is taken explicitly so callers state the expected size.
Vector regularizer_diagonal(const TaskGraph& graph, const EdgeWeights& edge_weights,
                            double lambda, std::size_t num_tasks);

// Plain-text dump "i j l_ij" per line, for diagnostics and golden tests.
std::string dump_edges(const TaskGraph& graph, const EdgeWeights& edge_weights);

} // namespace ccmtl
