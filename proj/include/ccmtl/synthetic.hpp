#pragma once

#include <cstdint>
#include <vector>

#include "ccmtl/dataset.hpp"
#include "ccmtl/linalg.hpp"

namespace ccmtl {

/// Grouped tasks with disjoint 5-feature supports: tasks in group g carry
/// i.i.d. standard-normal coefficients on features [5g, 5g+5) and zeros
/// elsewhere, so the remaining features act as distractors.
struct SynSpec {
    std::size_t groups = 3;
    std::size_t tasks_per_group = 10;
    std::size_t feature_dim = 15;
    std::size_t samples_per_task = 100;
    double noise_std = 1.0;
    std::uint64_t seed = 0;
};

/// Grouped tasks for runtime scaling: per group a center drawn from
/// N(0, center_std^2 I), per task a weight vector N(center, within_std^2 I).
struct ScaleSynSpec {
    std::size_t num_tasks = 1000;
    std::size_t group_size = 100;
    std::size_t feature_dim = 10;
    std::size_t samples_per_task = 100;
    double center_std = 31.622776601683793; // sqrt(1000)
    double within_std = 1.0;
    double noise_std = 1.0;
    std::uint64_t seed = 0;
};

struct GeneratedData {
    TaskDataset dataset;
    WeightMatrix true_weights;       // one row per task
    std::vector<std::size_t> group_labels;
};

GeneratedData generate_syn(const SynSpec& spec);
GeneratedData generate_scale_syn(const ScaleSynSpec& spec);

} // namespace ccmtl
