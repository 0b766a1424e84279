#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccmtl/linalg.hpp"

namespace ccmtl {

/// One regression task: a feature block with one column per sample
/// (feature_dim x n_samples) and its targets.
struct Task {
    std::string id;
    DenseMatrix features; // feature_dim rows, n_samples columns
    Vector targets;

    std::size_t n_samples() const { return targets.size(); }
};

/// Immutable collection of tasks sharing one feature dimension.
/// Invariants (checked on construction): at least one task, every task
/// has >= 1 sample, all values finite, consistent feature dimension.
class TaskDataset {
public:
    TaskDataset(std::vector<Task> tasks, std::size_t feature_dim);

    std::size_t num_tasks() const { return tasks_.size(); }
    std::size_t feature_dim() const { return feature_dim_; }
    std::size_t total_samples() const { return total_samples_; }
    const Task& task(std::size_t t) const { return tasks_[t]; }
    const std::vector<Task>& tasks() const { return tasks_; }

    /// Copy with a constant-1 feature appended to every task.
    TaskDataset with_bias_column() const;

private:
    std::vector<Task> tasks_;
    std::size_t feature_dim_ = 0;
    std::size_t total_samples_ = 0;
};

struct SplitSpec {
    double train_ratio = 0.2;
    std::uint64_t seed = 0;
};

struct SplitResult {
    TaskDataset train;
    TaskDataset test;
};

/// Per-task seeded shuffle + partition. Train size is
/// round(train_ratio * n) clamped to [1, n-1]; sample order within each
/// side follows the original dataset order. Tasks with fewer than two
/// samples are rejected.
SplitResult split(const TaskDataset& dataset, const SplitSpec& spec);

/// CSV schema: header `task_id,y,x1,...,xP`, one sample per row, '.'
/// decimal separator. Rows of one task need not be contiguous; task
/// order is fixed by first appearance. Values are written with 12
/// significant digits.
TaskDataset load_csv(const std::string& path);
void save_csv(const TaskDataset& dataset, const std::string& path);

} // namespace ccmtl
