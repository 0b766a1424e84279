#include "ccmtl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <utility>

#include "ccmtl/errors.hpp"
#include "ccmtl/io_util.hpp"

namespace ccmtl {

TaskGraph build_knn_graph(const WeightMatrix& weights, std::size_t k) {
    const std::size_t n = weights.rows();
    const std::size_t p = weights.cols();
    if (n < 2) throw ValidationError("build_knn_graph: need at least 2 nodes");
    if (k < 1) throw ValidationError("build_knn_graph: k must be >= 1");
    k = std::min(k, n - 1);

    // Row norms, used only as pruning bounds: |‖w_i‖ - ‖w_j‖| never exceeds
    // ‖w_i - w_j‖, so once the norm gap alone beats the current kth-best
    // distance, every node further out in norm order is excluded exactly.
    // Distances themselves stay the plain difference sum, so values (and
    // therefore ties) are identical to a direct all-pairs double loop.
    Vector nrm(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto row = weights.row(j);
        double s = 0.0;
        for (std::size_t q = 0; q < p; ++q) s += row[q] * row[q];
        nrm[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (nrm[a] != nrm[b]) return nrm[a] < nrm[b];
        return a < b;
    });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

    // A single coordinate gap is another exact lower bound on the distance;
    // the highest-variance coordinate rejects most survivors of the norm
    // window before the full distance is computed.
    std::size_t gate = 0;
    {
        Vector mean(p, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const auto row = weights.row(j);
            for (std::size_t q = 0; q < p; ++q) mean[q] += row[q];
        }
        for (std::size_t q = 0; q < p; ++q) mean[q] /= static_cast<double>(n);
        Vector var(p, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const auto row = weights.row(j);
            for (std::size_t q = 0; q < p; ++q) {
                const double d = row[q] - mean[q];
                var[q] += d * d;
            }
        }
        for (std::size_t q = 1; q < p; ++q)
            if (var[q] > var[gate]) gate = q;
    }

    // Norm-ordered copy of the rows: the outward sweep below visits adjacent
    // positions, so the candidate scan streams contiguous memory instead of
    // hopping across the matrix.
    Vector prow(n * p);
    Vector pnrm(n);
    Vector pgate(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = weights.row(order[r]);
        for (std::size_t q = 0; q < p; ++q) prow[r * p + q] = row[q];
        pnrm[r] = nrm[order[r]];
        pgate[r] = row[gate];
    }

    // Slack on the pruning tests so bound rounding can never drop a candidate
    // whose true distance ties the kth best.
    constexpr double kPruneSlack = 1e-9;

    // Positions are cut into norm-contiguous slabs, each also sorted by the
    // gate coordinate.  Once the kth-best distance proves an entire slab sits
    // inside the norm window, one binary search over its gate-sorted view
    // yields exactly the candidates that survive the gate bound, instead of a
    // linear pass over the slab.
    const std::size_t slab = std::max<std::size_t>(24, std::min<std::size_t>(64, n / 128));
    const std::size_t num_slabs = (n + slab - 1) / slab;
    Vector sg_gate(n);
    std::vector<std::uint32_t> sg_pos(n);
    {
        std::vector<std::uint32_t> tmp;
        for (std::size_t b = 0; b < num_slabs; ++b) {
            const std::size_t beg = b * slab;
            const std::size_t end = std::min(n, beg + slab);
            tmp.resize(end - beg);
            for (std::size_t r = beg; r < end; ++r) tmp[r - beg] = static_cast<std::uint32_t>(r);
            std::sort(tmp.begin(), tmp.end(), [&](std::uint32_t a, std::uint32_t c) {
                if (pgate[a] != pgate[c]) return pgate[a] < pgate[c];
                return a < c;
            });
            for (std::size_t m = 0; m < tmp.size(); ++m) {
                sg_gate[beg + m] = pgate[tmp[m]];
                sg_pos[beg + m] = tmp[m];
            }
        }
    }

    // The k nearest per node, kept sorted by (distance, index); comparing the
    // index on equal distances reproduces the tie-to-lower-index rule no
    // matter in which order candidates arrive.
    std::vector<std::pair<std::size_t, std::size_t>> edge_pairs;
    edge_pairs.reserve(n * k);
    Vector best_d(k);
    std::vector<std::size_t> best_j(k);
    Vector gap2(slab);
    Vector gate2(slab);
    for (std::size_t i = 0; i < n; ++i) {
        const double* wi = prow.data() + rank[i] * p;
        const double nrm_i = pnrm[rank[i]];
        const double gate_i = pgate[rank[i]];
        std::size_t filled = 0;

        // Exact distance and insertion for the candidate at sweep position r.
        const auto admit = [&](std::size_t r) {
            const double* wj = prow.data() + r * p;
            double d2 = 0.0;
            for (std::size_t q = 0; q < p; ++q) {
                const double diff = wi[q] - wj[q];
                d2 += diff * diff;
            }
            const std::size_t j = order[r];
            if (filled < k || d2 < best_d[k - 1] ||
                (d2 == best_d[k - 1] && j < best_j[k - 1])) {
                std::size_t pos = filled < k ? filled++ : k - 1;
                while (pos > 0 && (d2 < best_d[pos - 1] ||
                                   (d2 == best_d[pos - 1] && j < best_j[pos - 1]))) {
                    best_d[pos] = best_d[pos - 1];
                    best_j[pos] = best_j[pos - 1];
                    --pos;
                }
                best_d[pos] = d2;
                best_j[pos] = j;
            }
        };

        // Visits a run of up to `len` positions starting at r0 and moving by
        // `dir` (never past a slab edge).  The pruning threshold is read once
        // per run, so a candidate admitted mid-run does not tighten the bound
        // for its neighbors: that only widens the visited set, and every
        // visited candidate still goes through the exact distance and
        // insertion, so the selected k are identical to the per-candidate
        // rule.  Splitting the norm and gate gaps into straight-line passes
        // keeps the hot loops free of branches.  Returns the number of
        // positions consumed, or len + 1 meaning the norm gap stopped the
        // side for good.
        const auto scan_run = [&](std::size_t r0, std::ptrdiff_t dir, std::size_t len) {
            const double thr = filled == k ? best_d[k - 1] * (1.0 + kPruneSlack)
                                           : std::numeric_limits<double>::infinity();
            const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(r0);
            for (std::size_t m = 0; m < len; ++m) {
                const std::size_t r =
                    static_cast<std::size_t>(base + dir * static_cast<std::ptrdiff_t>(m));
                const double g = nrm_i - pnrm[r];
                gap2[m] = g * g;
            }
            std::size_t stop = len;
            bool stopped = false;
            for (std::size_t m = 0; m < len; ++m) {
                // The norm gap grows monotonically outward, so the first
                // failure ends the whole side.
                if (gap2[m] > thr) {
                    stop = m;
                    stopped = true;
                    break;
                }
            }
            for (std::size_t m = 0; m < stop; ++m) {
                const std::size_t r =
                    static_cast<std::size_t>(base + dir * static_cast<std::ptrdiff_t>(m));
                const double g = gate_i - pgate[r];
                gate2[m] = g * g;
            }
            for (std::size_t m = 0; m < stop; ++m) {
                // The gate gap is not monotone along the sweep, so it only
                // skips this candidate, never a whole side.
                if (gate2[m] > thr) continue;
                admit(static_cast<std::size_t>(base + dir * static_cast<std::ptrdiff_t>(m)));
            }
            return stopped ? len + 1 : len;
        };

        // Admits every candidate of slab b whose gate gap can still be within
        // the threshold, found via binary search in the slab's gate-sorted
        // view.  Only called once the whole slab is proven inside the norm
        // window.  The half-width is widened by the slack factor so square
        // root rounding can never exclude a candidate the squared comparison
        // would keep; extra admissions are harmless since admission is exact.
        const auto scan_slab_by_gate = [&](std::size_t b, double thr) {
            const std::size_t beg = b * slab;
            const std::size_t end = std::min(n, beg + slab);
            const double s = std::sqrt(thr) * (1.0 + kPruneSlack);
            const double* gb = sg_gate.data();
            std::size_t idx =
                static_cast<std::size_t>(std::lower_bound(gb + beg, gb + end, gate_i - s) - gb);
            for (; idx < end && gb[idx] <= gate_i + s; ++idx) admit(sg_pos[idx]);
        };

        // Outward two-sided sweep, preferring the side whose next norm gap is
        // smaller.  Each turn consumes the rest of one slab on the chosen
        // side: whole untouched slabs are first tested against the norm
        // window as a unit (skip the side for good, or take the gate-sorted
        // shortcut), anything else falls back to the linear run.
        std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(rank[i]) - 1;
        std::size_t hi = rank[i] + 1;
        bool lo_alive = lo >= 0;
        bool hi_alive = hi < n;
        while (lo_alive || hi_alive) {
            bool take_lo;
            if (lo_alive && hi_alive) {
                take_lo = nrm_i - pnrm[static_cast<std::size_t>(lo)] <= pnrm[hi] - nrm_i;
            } else {
                take_lo = lo_alive;
            }
            if (take_lo) {
                const std::size_t r = static_cast<std::size_t>(lo);
                const std::size_t b = r / slab;
                const std::size_t beg = b * slab;
                const std::size_t end = std::min(n, beg + slab);
                if (filled == k && r == end - 1) {
                    const double thr = best_d[k - 1] * (1.0 + kPruneSlack);
                    const double mn = nrm_i - pnrm[end - 1];
                    if (mn * mn > thr) {
                        lo_alive = false;
                        continue;
                    }
                    const double mx = nrm_i - pnrm[beg];
                    if (mx * mx <= thr) {
                        scan_slab_by_gate(b, thr);
                        lo = static_cast<std::ptrdiff_t>(beg) - 1;
                        lo_alive = lo >= 0;
                        continue;
                    }
                }
                const std::size_t len = r - beg + 1;
                const std::size_t used = scan_run(r, -1, len);
                if (used > len) {
                    lo_alive = false;
                } else {
                    lo = static_cast<std::ptrdiff_t>(beg) - 1;
                    lo_alive = lo >= 0;
                }
            } else {
                const std::size_t b = hi / slab;
                const std::size_t beg = b * slab;
                const std::size_t end = std::min(n, beg + slab);
                if (filled == k && hi == beg) {
                    const double thr = best_d[k - 1] * (1.0 + kPruneSlack);
                    const double mn = pnrm[beg] - nrm_i;
                    if (mn * mn > thr) {
                        hi_alive = false;
                        continue;
                    }
                    const double mx = pnrm[end - 1] - nrm_i;
                    if (mx * mx <= thr) {
                        scan_slab_by_gate(b, thr);
                        hi = end;
                        hi_alive = hi < n;
                        continue;
                    }
                }
                const std::size_t len = end - hi;
                const std::size_t used = scan_run(hi, 1, len);
                if (used > len) {
                    hi_alive = false;
                } else {
                    hi = end;
                    hi_alive = hi < n;
                }
            }
        }
        for (std::size_t m = 0; m < filled; ++m) {
            const std::size_t j = best_j[m];
            edge_pairs.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    std::sort(edge_pairs.begin(), edge_pairs.end());
    edge_pairs.erase(std::unique(edge_pairs.begin(), edge_pairs.end()), edge_pairs.end());
    return TaskGraph{n, std::move(edge_pairs)};
}

EdgeWeights update_edge_weights(const WeightMatrix& weights, const TaskGraph& graph, double eps) {
    if (weights.rows() != graph.num_nodes)
        throw ContractViolation("update_edge_weights: weight rows != graph nodes");
    if (eps <= 0.0) throw ContractViolation("update_edge_weights: eps must be > 0");
    EdgeWeights out(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [i, j] = graph.edges[e];
        const auto wi = weights.row(i);
        const auto wj = weights.row(j);
        double d2 = 0.0;
        for (std::size_t p = 0; p < weights.cols(); ++p) {
            const double diff = wi[p] - wj[p];
            d2 += diff * diff;
        }
        out[e] = 1.0 / (2.0 * std::max(std::sqrt(d2), eps));
    }
    return out;
}

void apply_graph_regularizer(const TaskGraph& graph, const EdgeWeights& edge_weights,
                             double lambda, std::span<const double> weights_flat,
                             std::size_t feature_dim, std::span<double> out_flat) {
    if (lambda < 0.0) throw ContractViolation("apply_graph_regularizer: lambda must be >= 0");
    if (edge_weights.size() != graph.edges.size())
        throw ContractViolation("apply_graph_regularizer: edge weight count mismatch");
    if (feature_dim == 0 || weights_flat.size() != graph.num_nodes * feature_dim ||
        out_flat.size() != weights_flat.size())
        throw ContractViolation("apply_graph_regularizer: flattened shape mismatch");
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [i, j] = graph.edges[e];
        const double c = lambda * edge_weights[e];
        const double* wi = weights_flat.data() + i * feature_dim;
        const double* wj = weights_flat.data() + j * feature_dim;
        double* oi = out_flat.data() + i * feature_dim;
        double* oj = out_flat.data() + j * feature_dim;
        for (std::size_t p = 0; p < feature_dim; ++p) {
            const double diff = c * (wi[p] - wj[p]);
            oi[p] += diff;
            oj[p] -= diff;
        }
    }
}

WeightMatrix apply_graph_regularizer(const WeightMatrix& weights, const TaskGraph& graph,
                                     const EdgeWeights& edge_weights, double lambda) {
    if (weights.rows() != graph.num_nodes)
        throw ContractViolation("apply_graph_regularizer: weight rows != graph nodes");
    WeightMatrix out(weights.rows(), weights.cols());
    apply_graph_regularizer(graph, edge_weights, lambda, weights.flat(), weights.cols(),
                            out.flat());
    return out;
}

Vector regularizer_diagonal(const TaskGraph& graph, const EdgeWeights& edge_weights, double lambda,
                            std::size_t num_tasks) {
    if (num_tasks != graph.num_nodes)
        throw ContractViolation("regularizer_diagonal: num_tasks != graph nodes");
    if (edge_weights.size() != graph.edges.size())
        throw ContractViolation("regularizer_diagonal: edge weight count mismatch");
    Vector degree(num_tasks, 0.0);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [i, j] = graph.edges[e];
        degree[i] += edge_weights[e];
        degree[j] += edge_weights[e];
    }
    for (double& d : degree) d *= lambda;
    return degree;
}

std::string dump_edges(const TaskGraph& graph, const EdgeWeights& edge_weights) {
    if (edge_weights.size() != graph.edges.size())
        throw ContractViolation("dump_edges: edge weight count mismatch");
    std::ostringstream os;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [i, j] = graph.edges[e];
        os << i << ' ' << j << ' ' << format_double(edge_weights[e], 12) << '\n';
    }
    return os.str();
}

} // namespace ccmtl
