#include "ccmtl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "ccmtl/errors.hpp"
#include "ccmtl/io_util.hpp"
#include "ccmtl/rng.hpp"

namespace ccmtl {

TaskDataset::TaskDataset(std::vector<Task> tasks, std::size_t feature_dim)
    : tasks_(std::move(tasks)), feature_dim_(feature_dim) {
    if (tasks_.empty()) throw ValidationError("TaskDataset: no tasks");
    if (feature_dim_ == 0) throw ValidationError("TaskDataset: feature_dim must be >= 1");
    for (const Task& t : tasks_) {
        if (t.n_samples() == 0)
            throw ValidationError("TaskDataset: task '" + t.id + "' has no samples");
        if (t.features.rows() != feature_dim_ || t.features.cols() != t.n_samples())
            throw ValidationError("TaskDataset: task '" + t.id + "' feature block is " +
                                  std::to_string(t.features.rows()) + "x" +
                                  std::to_string(t.features.cols()) + ", expected " +
                                  std::to_string(feature_dim_) + "x" +
                                  std::to_string(t.n_samples()));
        if (!t.features.all_finite() || !all_finite(t.targets))
            throw ValidationError("TaskDataset: task '" + t.id + "' contains non-finite values");
        total_samples_ += t.n_samples();
    }
}

TaskDataset TaskDataset::with_bias_column() const {
    std::vector<Task> biased;
    biased.reserve(tasks_.size());
    for (const Task& t : tasks_) {
        const std::size_t p = feature_dim_;
        const std::size_t n = t.n_samples();
        DenseMatrix f(p + 1, n);
        for (std::size_t i = 0; i < p; ++i)
            std::copy(t.features.row(i).begin(), t.features.row(i).end(), f.row(i).begin());
        std::fill(f.row(p).begin(), f.row(p).end(), 1.0);
        biased.push_back(Task{t.id, std::move(f), t.targets});
    }
    return TaskDataset(std::move(biased), feature_dim_ + 1);
}

SplitResult split(const TaskDataset& dataset, const SplitSpec& spec) {
    if (!(spec.train_ratio > 0.0 && spec.train_ratio < 1.0))
        throw ValidationError("split: train_ratio must be in (0,1), got " +
                              std::to_string(spec.train_ratio));
    Rng rng(spec.seed);
    std::vector<Task> train_tasks, test_tasks;
    train_tasks.reserve(dataset.num_tasks());
    test_tasks.reserve(dataset.num_tasks());
    const std::size_t p = dataset.feature_dim();

    for (std::size_t t = 0; t < dataset.num_tasks(); ++t) {
        const Task& task = dataset.task(t);
        const std::size_t n = task.n_samples();
        if (n < 2)
            throw ValidationError("split: task '" + task.id + "' has " + std::to_string(n) +
                                  " samples, need >= 2");
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);

        auto n_train = static_cast<std::size_t>(std::llround(spec.train_ratio * static_cast<double>(n)));
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

        std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<long>(n_train));
        std::vector<std::size_t> test_idx(order.begin() + static_cast<long>(n_train), order.end());
        std::sort(train_idx.begin(), train_idx.end());
        std::sort(test_idx.begin(), test_idx.end());

        auto take = [&](const std::vector<std::size_t>& idx) {
            Task out{task.id, DenseMatrix(p, idx.size()), Vector(idx.size())};
            for (std::size_t j = 0; j < idx.size(); ++j) {
                for (std::size_t i = 0; i < p; ++i) out.features(i, j) = task.features(i, idx[j]);
                out.targets[j] = task.targets[idx[j]];
            }
            return out;
        };
        train_tasks.push_back(take(train_idx));
        test_tasks.push_back(take(test_idx));
    }
    return SplitResult{TaskDataset(std::move(train_tasks), p), TaskDataset(std::move(test_tasks), p)};
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_double(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw FormatError("line " + std::to_string(line_no) + ": cannot parse number '" +
                          std::string(field) + "'");
    if (!std::isfinite(value))
        throw FormatError("line " + std::to_string(line_no) + ": non-finite value '" +
                          std::string(field) + "'");
    return value;
}

} // namespace

TaskDataset load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw FormatError("'" + path + "' is empty");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_fields(line);
    if (header.size() < 3 || header[0] != "task_id" || header[1] != "y")
        throw FormatError("line 1: expected header 'task_id,y,x1,...,xP'");
    const std::size_t p = header.size() - 2;

    // per-task rows in file order; task order by first appearance
    std::vector<std::string> task_order;
    std::unordered_map<std::string, std::size_t> task_index;
    std::vector<std::vector<Vector>> rows; // [task][sample] -> features
    std::vector<Vector> targets;           // [task] -> y values

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != p + 2)
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(p) + " features, got " +
                              std::to_string(fields.size() >= 2 ? fields.size() - 2 : 0));
        std::string id(fields[0]);
        auto [it, inserted] = task_index.try_emplace(id, task_order.size());
        if (inserted) {
            task_order.push_back(id);
            rows.emplace_back();
            targets.emplace_back();
        }
        const std::size_t t = it->second;
        targets[t].push_back(parse_double(fields[1], line_no));
        Vector x(p);
        for (std::size_t i = 0; i < p; ++i) x[i] = parse_double(fields[2 + i], line_no);
        rows[t].push_back(std::move(x));
    }
    if (task_order.empty()) throw FormatError("'" + path + "' has no data rows");

    std::vector<Task> tasks;
    tasks.reserve(task_order.size());
    for (std::size_t t = 0; t < task_order.size(); ++t) {
        const std::size_t n = rows[t].size();
        Task task{task_order[t], DenseMatrix(p, n), std::move(targets[t])};
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < p; ++i) task.features(i, j) = rows[t][j][i];
        tasks.push_back(std::move(task));
    }
    return TaskDataset(std::move(tasks), p);
}

void save_csv(const TaskDataset& dataset, const std::string& path) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "task_id,y";
    for (std::size_t i = 1; i <= dataset.feature_dim(); ++i) out << ",x" << i;
    out << "\n";
    for (const Task& task : dataset.tasks()) {
        for (std::size_t j = 0; j < task.n_samples(); ++j) {
            out << task.id << ',' << format_double(task.targets[j], 12);
            for (std::size_t i = 0; i < dataset.feature_dim(); ++i)
                out << ',' << format_double(task.features(i, j), 12);
            out << "\n";
        }
    }
    file.commit();
}

} // namespace ccmtl
