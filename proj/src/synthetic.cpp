#include "ccmtl/synthetic.hpp"

#include <string>
#include <utility>

#include "ccmtl/errors.hpp"
#include "ccmtl/rng.hpp"

namespace ccmtl {

namespace {

constexpr std::size_t kSynSupport = 5; // features per group

Task make_task(std::string id, const std::span<const double> weights, std::size_t n_samples,
               double noise_std, Rng& rng) {
    const std::size_t p = weights.size();
    Task task{std::move(id), DenseMatrix(p, n_samples), Vector(n_samples)};
    for (std::size_t j = 0; j < n_samples; ++j) {
        double y = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            const double x = rng.normal();
            task.features(i, j) = x;
            y += weights[i] * x;
        }
        task.targets[j] = y + noise_std * rng.normal();
    }
    return task;
}

} // namespace

GeneratedData generate_syn(const SynSpec& spec) {
    if (spec.groups < 1 || spec.tasks_per_group < 1 || spec.feature_dim < 1 ||
        spec.samples_per_task < 1)
        throw ValidationError("generate_syn: all counts must be >= 1");
    if (spec.groups * kSynSupport > spec.feature_dim)
        throw ValidationError("generate_syn: groups * " + std::to_string(kSynSupport) +
                              " support features = " + std::to_string(spec.groups * kSynSupport) +
                              " exceeds feature_dim = " + std::to_string(spec.feature_dim));
    if (spec.noise_std < 0.0) throw ValidationError("generate_syn: noise_std must be >= 0");

    Rng rng(spec.seed);
    const std::size_t num_tasks = spec.groups * spec.tasks_per_group;
    WeightMatrix true_weights(num_tasks, spec.feature_dim);
    std::vector<std::size_t> labels(num_tasks);
    std::vector<Task> tasks;
    tasks.reserve(num_tasks);

    std::size_t t = 0;
    for (std::size_t g = 0; g < spec.groups; ++g) {
        for (std::size_t k = 0; k < spec.tasks_per_group; ++k, ++t) {
            labels[t] = g;
            auto w = true_weights.row(t);
            for (std::size_t i = 0; i < kSynSupport; ++i) w[g * kSynSupport + i] = rng.normal();
            tasks.push_back(make_task("task_" + std::to_string(t), w, spec.samples_per_task,
                                      spec.noise_std, rng));
        }
    }
    return GeneratedData{TaskDataset(std::move(tasks), spec.feature_dim), std::move(true_weights),
                         std::move(labels)};
}

GeneratedData generate_scale_syn(const ScaleSynSpec& spec) {
    if (spec.num_tasks < 1 || spec.group_size < 1 || spec.feature_dim < 1 ||
        spec.samples_per_task < 1)
        throw ValidationError("generate_scale_syn: all counts must be >= 1");
    if (spec.num_tasks % spec.group_size != 0)
        throw ValidationError("generate_scale_syn: num_tasks = " + std::to_string(spec.num_tasks) +
                              " is not divisible by group_size = " +
                              std::to_string(spec.group_size));
    if (spec.center_std < 0.0 || spec.within_std < 0.0 || spec.noise_std < 0.0)
        throw ValidationError("generate_scale_syn: std parameters must be >= 0");

    Rng rng(spec.seed);
    const std::size_t groups = spec.num_tasks / spec.group_size;
    WeightMatrix true_weights(spec.num_tasks, spec.feature_dim);
    std::vector<std::size_t> labels(spec.num_tasks);
    std::vector<Task> tasks;
    tasks.reserve(spec.num_tasks);

    Vector center(spec.feature_dim);
    std::size_t t = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        for (double& c : center) c = spec.center_std * rng.normal();
        for (std::size_t k = 0; k < spec.group_size; ++k, ++t) {
            labels[t] = g;
            auto w = true_weights.row(t);
            for (std::size_t i = 0; i < spec.feature_dim; ++i)
                w[i] = center[i] + spec.within_std * rng.normal();
            tasks.push_back(make_task("task_" + std::to_string(t), w, spec.samples_per_task,
                                      spec.noise_std, rng));
        }
    }
    return GeneratedData{TaskDataset(std::move(tasks), spec.feature_dim), std::move(true_weights),
                         std::move(labels)};
}

} // namespace ccmtl
