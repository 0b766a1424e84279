#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccmtl/dataset.hpp"
#include "ccmtl/solver.hpp"
#include "ccmtl/synthetic.hpp"

namespace ccmtl {

// Pooled single-task baseline: one ridge least-squares model over the union of
// all tasks' samples, replicated into every row.
WeightMatrix fit_stl(const TaskDataset& train, double ridge = 1e-6);

// Independent-task baseline; identical to the solver's initialization.
WeightMatrix fit_itl(const TaskDataset& train, double ridge = 1e-6, std::size_t threads = 1);

double rmse(std::span<const double> y_true, std::span<const double> y_pred);

// One RMSE over all tasks' samples pooled together (not a mean of per-task
// RMSEs); weights row t scores task t.
double pooled_rmse(const WeightMatrix& weights, const TaskDataset& data);

// 11 log-spaced powers of ten, 1e-5 .. 1e5.
Vector default_lambda_grid();

struct GridSpec {
    Vector lambda_values = default_lambda_grid();
    std::size_t folds = 5;
    std::uint64_t seed = 0;
};

struct GridSearchResult {
    double best_lambda = 0.0;
    // (lambda, mean CV RMSE) in grid order.
    std::vector<std::pair<double, double>> cv_table;
    std::vector<std::string> warnings;
};

// Per-task-stratified k-fold cross-validation over the lambda grid; returns
// the lambda with minimal mean pooled validation RMSE (ties -> smaller
// lambda).  Tasks with fewer samples than folds join every training fold and
// are excluded from scoring, with a warning.  Fits across (lambda, fold)
// pairs run on `threads` workers; results are independent of the count.
GridSearchResult grid_search(const TaskDataset& train, const GridSpec& grid, const FitConfig& cfg,
                             std::size_t threads = 1);

enum class Method { ccmtl, stl, itl };

std::string method_name(Method method);
Method parse_method(const std::string& name); // throws ValidationError

struct EvalResult {
    double rmse_mean = 0.0;
    // Sample standard deviation (n-1 denominator); 0 for a single repeat.
    double rmse_std = 0.0;
    Vector per_run;
    Vector runtime_seconds; // final-fit wall time per repeat (excludes CV)
    Vector lambdas;         // selected lambda per repeat (0 when not tuned)
};

struct MethodResult {
    Method method = Method::ccmtl;
    EvalResult result;
};

// Repeated split-evaluate protocol: for repeat r the split uses seed + r;
// ccmtl tunes lambda by grid_search on the training part, then every method
// fits the training part and is scored by pooled RMSE on the test part.
std::vector<MethodResult> benchmark(const TaskDataset& dataset, const SplitSpec& split,
                                    std::size_t repeats, const std::vector<Method>& methods,
                                    const GridSpec& grid, const FitConfig& cfg,
                                    std::size_t threads = 1);

struct ScaleBenchSpec {
    std::vector<std::size_t> task_counts; // strictly ascending
    ScaleSynSpec base;                    // num_tasks is overridden per count
    GridSpec grid;
    FitConfig fit;
    // When set, skips tuning; otherwise lambda is found by grid_search on the
    // dataset generated at the smallest task count and reused for all counts.
    std::optional<double> lambda_override;
    std::size_t threads = 1;
};

struct ScaleBenchResult {
    double lambda = 0.0;
    std::vector<std::size_t> task_counts;
    Vector seconds; // fit-only wall time per count
    std::vector<std::size_t> outer_iterations;
    std::vector<std::size_t> total_cg_iterations;
    // Least-squares slope of log(seconds) vs log(tasks); absent for a single
    // count.
    std::optional<double> slope;
};

ScaleBenchResult scale_bench(const ScaleBenchSpec& spec);

} // namespace ccmtl
