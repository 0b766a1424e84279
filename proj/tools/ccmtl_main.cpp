// Command-line front end: data generation, training, prediction, evaluation,
// benchmarking and the scaling benchmark, all deterministic given their flags.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "ccmtl/dataset.hpp"
#include "ccmtl/errors.hpp"
#include "ccmtl/eval.hpp"
#include "ccmtl/io_util.hpp"
#include "ccmtl/model_io.hpp"
#include "ccmtl/solver.hpp"
#include "ccmtl/synthetic.hpp"

namespace {

using namespace ccmtl;

constexpr double kTraceSlack = 1e-9; // relative slack when checking descent

// ---------------------------------------------------------------------------
// shared option blocks

struct FitOpts {
    double outer_tol = 1e-5;
    std::size_t max_outer = 100;
    double ridge_init = 1e-6;
    double edge_eps = 1e-8;
    double cg_tol = 1e-8;
    std::size_t cg_max_iter = 0; // 0 = automatic (10 * system dimension)
    std::size_t k = 10;
    bool add_bias = false;
    std::size_t threads = 1;

    FitConfig config() const {
        FitConfig cfg;
        cfg.k = k;
        cfg.outer_tol = outer_tol;
        cfg.max_outer_iter = max_outer;
        cfg.ridge_init = ridge_init;
        cfg.edge_eps = edge_eps;
        cfg.add_bias = add_bias;
        cfg.cg.tol = cg_tol;
        cfg.cg.max_iter = cg_max_iter;
        cfg.threads = threads;
        return cfg;
    }

    std::string describe() const {
        std::ostringstream os;
        os << "k=" << k << " outer_tol=" << outer_tol << " max_outer=" << max_outer
           << " ridge_init=" << ridge_init << " edge_eps=" << edge_eps << " cg_tol=" << cg_tol
           << " cg_max_iter=" << (cg_max_iter == 0 ? std::string("auto") : std::to_string(cg_max_iter))
           << " add_bias=" << (add_bias ? "true" : "false") << " threads=" << threads;
        return os.str();
    }
};

void add_fit_flags(CLI::App* cmd, FitOpts& opts) {
    cmd->add_option("--k", opts.k, "Neighbours in the task graph")->capture_default_str();
    cmd->add_option("--outer-tol", opts.outer_tol, "Relative objective change stopping threshold")
        ->capture_default_str();
    cmd->add_option("--max-outer", opts.max_outer, "Outer iteration cap")->capture_default_str();
    cmd->add_option("--ridge-init", opts.ridge_init, "Ridge used by the per-task initialization")
        ->capture_default_str();
    cmd->add_option("--edge-eps", opts.edge_eps, "Distance floor in edge-weight updates")
        ->capture_default_str();
    cmd->add_option("--cg-tol", opts.cg_tol, "Inner solver relative residual tolerance")
        ->capture_default_str();
    cmd->add_option("--cg-max-iter", opts.cg_max_iter,
                    "Inner solver iteration cap (0 = 10 x system dimension)")
        ->capture_default_str();
    cmd->add_flag("--add-bias", opts.add_bias, "Append a constant-1 feature before fitting");
    cmd->add_option("--threads", opts.threads, "Worker threads (results are identical for any count)")
        ->capture_default_str();
}

struct GridOpts {
    std::size_t folds = 5;
    std::uint64_t cv_seed = 0;

    GridSpec spec() const {
        GridSpec grid;
        grid.folds = folds;
        grid.seed = cv_seed;
        return grid;
    }
};

void add_grid_flags(CLI::App* cmd, GridOpts& opts) {
    cmd->add_option("--folds", opts.folds, "Cross-validation folds")->capture_default_str();
    cmd->add_option("--cv-seed", opts.cv_seed, "Cross-validation shuffle seed")
        ->capture_default_str();
}

std::string describe_grid(const GridSpec& grid) {
    std::ostringstream os;
    os << "lambda_grid=[" << grid.lambda_values.front() << ".." << grid.lambda_values.back()
       << "; " << grid.lambda_values.size() << " log-spaced] folds=" << grid.folds
       << " cv_seed=" << grid.seed;
    return os.str();
}

struct GenOpts {
    std::string kind;
    std::uint64_t seed = 0;
    // syn
    std::size_t groups = 3;
    std::size_t tasks_per_group = 10;
    // scalesyn
    std::size_t tasks = 1000;
    std::size_t group_size = 100;
    double center_std = 31.622776601683793; // sqrt(1000)
    double within_std = 1.0;
    // shared
    std::size_t features = 0; // 0 = kind default (15 for syn, 10 for scalesyn)
    std::size_t samples = 100;
    double noise_std = 1.0;

    GeneratedData generate() const {
        if (kind == "syn") {
            SynSpec spec;
            spec.groups = groups;
            spec.tasks_per_group = tasks_per_group;
            spec.feature_dim = features == 0 ? 15 : features;
            spec.samples_per_task = samples;
            spec.noise_std = noise_std;
            spec.seed = seed;
            return generate_syn(spec);
        }
        if (kind == "scalesyn") {
            ScaleSynSpec spec;
            spec.num_tasks = tasks;
            spec.group_size = group_size;
            spec.feature_dim = features == 0 ? 10 : features;
            spec.samples_per_task = samples;
            spec.center_std = center_std;
            spec.within_std = within_std;
            spec.noise_std = noise_std;
            spec.seed = seed;
            return generate_scale_syn(spec);
        }
        throw ValidationError("unknown --kind '" + kind + "' (expected syn or scalesyn)");
    }

    std::string describe() const {
        std::ostringstream os;
        os << "kind=" << kind << " seed=" << seed;
        if (kind == "syn")
            os << " groups=" << groups << " tasks_per_group=" << tasks_per_group
               << " features=" << (features == 0 ? 15 : features);
        else
            os << " tasks=" << tasks << " group_size=" << group_size
               << " features=" << (features == 0 ? 10 : features) << " center_std=" << center_std
               << " within_std=" << within_std;
        os << " samples_per_task=" << samples << " noise_std=" << noise_std;
        return os.str();
    }
};

void add_gen_flags(CLI::App* cmd, GenOpts& opts, bool with_kind = true) {
    if (with_kind)
        cmd->add_option("--kind", opts.kind, "Generator: syn or scalesyn")->required();
    cmd->add_option("--seed", opts.seed, "Generator seed")->capture_default_str();
    cmd->add_option("--groups", opts.groups, "[syn] number of task groups")->capture_default_str();
    cmd->add_option("--tasks-per-group", opts.tasks_per_group, "[syn] tasks per group")
        ->capture_default_str();
    cmd->add_option("--tasks", opts.tasks, "[scalesyn] total number of tasks")
        ->capture_default_str();
    cmd->add_option("--group-size", opts.group_size, "[scalesyn] tasks per group")
        ->capture_default_str();
    cmd->add_option("--center-std", opts.center_std, "[scalesyn] group-center std deviation")
        ->capture_default_str();
    cmd->add_option("--within-std", opts.within_std, "[scalesyn] within-group weight std")
        ->capture_default_str();
    cmd->add_option("--features", opts.features, "Feature count (0 = generator default)")
        ->capture_default_str();
    cmd->add_option("--samples", opts.samples, "Samples per task")->capture_default_str();
    cmd->add_option("--noise-std", opts.noise_std, "Target noise std deviation")
        ->capture_default_str();
}

// ---------------------------------------------------------------------------
// helpers

void write_truth_file(const GeneratedData& data, const std::string& path) {
    AtomicFile file(path);
    auto& os = file.stream();
    os << "{\n  \"group_labels\": [";
    for (std::size_t t = 0; t < data.group_labels.size(); ++t) {
        if (t) os << ", ";
        os << data.group_labels[t];
    }
    os << "],\n  \"true_weights\": [\n";
    for (std::size_t t = 0; t < data.true_weights.rows(); ++t) {
        os << "    [";
        const auto row = data.true_weights.row(t);
        for (std::size_t p = 0; p < row.size(); ++p) {
            if (p) os << ", ";
            os << format_double(row[p], 17);
        }
        os << (t + 1 < data.true_weights.rows() ? "],\n" : "]\n");
    }
    os << "  ]\n}\n";
    file.commit();
}

// Rows of `model` reordered to match `data` task order; rejects unknown ids.
WeightMatrix align_model_rows(const Model& model, const TaskDataset& data) {
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t t = 0; t < model.task_ids.size(); ++t) row_of.emplace(model.task_ids[t], t);
    std::vector<std::string> missing;
    for (const Task& task : data.tasks())
        if (!row_of.count(task.id)) missing.push_back(task.id);
    if (!missing.empty()) {
        std::ostringstream os;
        os << "data contains task_ids unknown to the model:";
        for (const auto& id : missing) os << " '" << id << "'";
        throw ValidationError(os.str());
    }
    WeightMatrix aligned(data.num_tasks(), model.feature_dim);
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const auto src = model.weights.row(row_of.at(data.task(t).id));
        std::copy(src.begin(), src.end(), aligned.row(t).begin());
    }
    return aligned;
}

// Applies the model's bias convention to freshly loaded data and checks dims.
TaskDataset prepare_for_model(const Model& model, const TaskDataset& data) {
    const TaskDataset prepared = model.bias_added ? data.with_bias_column() : data;
    if (prepared.feature_dim() != model.feature_dim) {
        std::ostringstream os;
        os << "feature dimension mismatch: model expects " << model.feature_dim
           << (model.bias_added ? " (including bias)" : "") << ", data provides "
           << prepared.feature_dim();
        throw ValidationError(os.str());
    }
    return prepared;
}

void print_fit_log(const FitReport& report) {
    for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
    std::printf("initial objective: %.10g\n", report.objective_trace.front());
    for (std::size_t i = 1; i < report.objective_trace.size(); ++i)
        std::printf("outer %zu: objective %.10g (cg iterations %zu)\n", i,
                    report.objective_trace[i],
                    i - 1 < report.cg_iterations.size() ? report.cg_iterations[i - 1] : 0);
    std::printf("outer iterations: %zu (%s)\n", report.outer_iterations,
                report.converged ? "converged" : "iteration cap reached");
    std::printf("fit wall time: %.3fs\n", report.wall_time_seconds);
}

// The descent guarantee is a hard invariant; a violation beyond slack means a
// solver bug, so commands dump the trace and fail loudly.
void enforce_monotone_trace(const FitReport& report) {
    for (std::size_t i = 1; i < report.objective_trace.size(); ++i) {
        const double prev = report.objective_trace[i - 1];
        const double cur = report.objective_trace[i];
        if (cur > prev + kTraceSlack * std::abs(prev)) {
            std::cerr << "objective trace is not non-increasing at step " << i << ":\n";
            for (std::size_t j = 0; j < report.objective_trace.size(); ++j)
                std::cerr << "  trace[" << j << "] = " << format_double(report.objective_trace[j], 17)
                          << "\n";
            throw NumericalError("monotone descent violated; this is a solver bug");
        }
    }
    std::cout << "monotone descent: confirmed over " << report.objective_trace.size()
              << " trace entries\n";
}

std::string format_seconds(double s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", s);
    return buf;
}

// ---------------------------------------------------------------------------
// subcommands

struct GenDataArgs {
    GenOpts gen;
    std::string out;
};

void run_gen_data(const GenDataArgs& args) {
    std::cout << "gen-data: " << args.gen.describe() << " out=" << args.out << "\n";
    const GeneratedData data = args.gen.generate();
    save_csv(data.dataset, args.out);
    write_truth_file(data, args.out + ".truth.json");
    std::cout << "wrote " << data.dataset.num_tasks() << " tasks, " << data.dataset.total_samples()
              << " samples, " << data.dataset.feature_dim() << " features to " << args.out << "\n";
    std::cout << "wrote truth sidecar to " << args.out << ".truth.json\n";
}

struct TrainArgs {
    std::string data;
    std::string model_out;
    FitOpts fit;
    GridOpts grid;
    double lambda = -1.0; // <0 = not set
    bool use_cv = false;
};

void run_train(const TrainArgs& args) {
    if (args.use_cv == (args.lambda >= 0.0))
        throw ValidationError("train: exactly one of --lambda or --cv is required");
    std::cout << "train: data=" << args.data << " model=" << args.model_out << " "
              << (args.use_cv ? describe_grid(args.grid.spec())
                              : "lambda=" + std::to_string(args.lambda))
              << " " << args.fit.describe() << "\n";

    const TaskDataset data = load_csv(args.data);
    std::cout << "loaded " << data.num_tasks() << " tasks, " << data.total_samples()
              << " samples, " << data.feature_dim() << " features\n";

    FitConfig cfg = args.fit.config();
    if (args.use_cv) {
        const GridSearchResult search =
            grid_search(data, args.grid.spec(), cfg, args.fit.threads);
        for (const auto& w : search.warnings) std::cout << "warning: " << w << "\n";
        std::cout << "cross-validation table (lambda, mean RMSE):\n";
        for (const auto& [lambda, cv_rmse] : search.cv_table)
            std::printf("  %-12g %.6f\n", lambda, cv_rmse);
        std::cout << "selected lambda: " << search.best_lambda << "\n";
        cfg.lambda = search.best_lambda;
    } else {
        cfg.lambda = args.lambda;
    }

    const FitReport report = fit(data, cfg);
    print_fit_log(report);
    enforce_monotone_trace(report);

    Model model;
    model.feature_dim = report.weights.cols();
    model.bias_added = report.bias_added;
    model.lambda = cfg.lambda;
    model.k = cfg.k;
    for (const Task& task : data.tasks()) model.task_ids.push_back(task.id);
    model.weights = report.weights;
    save_model(model, args.model_out);
    std::cout << "model written to " << args.model_out << "\n";
}

struct PredictArgs {
    std::string model;
    std::string data;
    std::string out; // empty for evaluate
};

void run_predict(const PredictArgs& args) {
    std::cout << "predict: model=" << args.model << " data=" << args.data << " out=" << args.out
              << "\n";
    const Model model = load_model(args.model);
    const TaskDataset data = prepare_for_model(model, load_csv(args.data));
    const WeightMatrix weights = align_model_rows(model, data);
    const std::vector<Vector> preds = predict(weights, data);

    AtomicFile file(args.out);
    auto& os = file.stream();
    os << "task_id,y_true,y_pred\n";
    for (std::size_t t = 0; t < data.num_tasks(); ++t) {
        const Task& task = data.task(t);
        for (std::size_t j = 0; j < task.n_samples(); ++j)
            os << task.id << ',' << format_double(task.targets[j], 12) << ','
               << format_double(preds[t][j], 12) << '\n';
    }
    file.commit();
    std::cout << "wrote predictions for " << data.total_samples() << " samples to " << args.out
              << "\n";
}

void run_evaluate(const PredictArgs& args) {
    std::cout << "evaluate: model=" << args.model << " data=" << args.data << "\n";
    const Model model = load_model(args.model);
    const TaskDataset data = prepare_for_model(model, load_csv(args.data));
    const WeightMatrix weights = align_model_rows(model, data);
    std::printf("pooled RMSE: %.6f\n", pooled_rmse(weights, data));
}

struct BenchmarkArgs {
    std::string data; // file path; empty = generate
    GenOpts gen;
    std::vector<double> ratios{0.2};
    std::size_t repeats = 5;
    std::vector<std::string> methods{"ccmtl", "stl", "itl"};
    std::uint64_t split_seed = 0;
    FitOpts fit;
    GridOpts grid;
    std::string out;
};

void run_benchmark(const BenchmarkArgs& args) {
    if (args.data.empty() == args.gen.kind.empty())
        throw ValidationError("benchmark: exactly one of --data or --kind is required");
    std::vector<Method> methods;
    for (const auto& name : args.methods) methods.push_back(parse_method(name));

    std::cout << "benchmark: " << (args.data.empty() ? args.gen.describe() : "data=" + args.data)
              << " ratios=";
    for (std::size_t i = 0; i < args.ratios.size(); ++i)
        std::cout << (i ? "," : "") << args.ratios[i];
    std::cout << " repeats=" << args.repeats << " split_seed=" << args.split_seed << " methods=";
    for (std::size_t i = 0; i < methods.size(); ++i)
        std::cout << (i ? "," : "") << method_name(methods[i]);
    std::cout << " " << describe_grid(args.grid.spec()) << " " << args.fit.describe() << "\n";

    const TaskDataset dataset =
        args.data.empty() ? args.gen.generate().dataset : load_csv(args.data);
    std::cout << "dataset: " << dataset.num_tasks() << " tasks, " << dataset.total_samples()
              << " samples, " << dataset.feature_dim() << " features\n";

    struct RatioBlock {
        double ratio;
        std::vector<MethodResult> results;
    };
    std::vector<RatioBlock> blocks;
    for (const double ratio : args.ratios) {
        SplitSpec split;
        split.train_ratio = ratio;
        split.seed = args.split_seed;
        blocks.push_back({ratio, benchmark(dataset, split, args.repeats, methods,
                                           args.grid.spec(), args.fit.config(),
                                           args.fit.threads)});
    }

    // Aligned summary table: one row per method, mean(std) per ratio.
    std::printf("\n%-8s", "method");
    for (const auto& block : blocks) std::printf("  %16s", ("ratio " + std::to_string(block.ratio).substr(0, 4)).c_str());
    std::printf("\n");
    for (std::size_t m = 0; m < methods.size(); ++m) {
        std::printf("%-8s", method_name(methods[m]).c_str());
        for (const auto& block : blocks) {
            const EvalResult& ev = block.results[m].result;
            char cell[64];
            std::snprintf(cell, sizeof cell, "%.3f(%.3f)", ev.rmse_mean, ev.rmse_std);
            std::printf("  %16s", cell);
        }
        std::printf("\n");
    }

    if (!args.out.empty()) {
        AtomicFile file(args.out);
        auto& os = file.stream();
        os << "method,ratio,lambda,repeat,rmse,seconds\n";
        for (const auto& block : blocks)
            for (const auto& [method, ev] : block.results)
                for (std::size_t r = 0; r < ev.per_run.size(); ++r)
                    os << method_name(method) << ',' << format_double(block.ratio, 12) << ','
                       << format_double(ev.lambdas[r], 12) << ',' << r << ','
                       << format_double(ev.per_run[r], 12) << ',' << format_seconds(ev.runtime_seconds[r])
                       << '\n';
        for (const auto& block : blocks)
            for (const auto& [method, ev] : block.results)
                os << "# summary method=" << method_name(method) << " ratio="
                   << format_double(block.ratio, 12) << " rmse_mean=" << format_double(ev.rmse_mean, 12)
                   << " rmse_std=" << format_double(ev.rmse_std, 12) << '\n';
        file.commit();
        std::cout << "report written to " << args.out << "\n";
    }
}

struct ScaleBenchArgs {
    std::vector<std::size_t> task_counts{1000, 2000, 4000, 8000};
    GenOpts gen;
    double lambda = -1.0; // <0 = tune at the smallest count
    FitOpts fit;
    GridOpts grid;
    std::string out;
};

void run_scale_bench(const ScaleBenchArgs& args) {
    ScaleBenchSpec spec;
    spec.task_counts = args.task_counts;
    spec.base.group_size = args.gen.group_size;
    spec.base.feature_dim = args.gen.features == 0 ? 10 : args.gen.features;
    spec.base.samples_per_task = args.gen.samples;
    spec.base.center_std = args.gen.center_std;
    spec.base.within_std = args.gen.within_std;
    spec.base.noise_std = args.gen.noise_std;
    spec.base.seed = args.gen.seed;
    spec.grid = args.grid.spec();
    spec.fit = args.fit.config();
    if (args.lambda >= 0.0) spec.lambda_override = args.lambda;
    spec.threads = args.fit.threads;

    std::cout << "scale-bench: task_counts=";
    for (std::size_t i = 0; i < args.task_counts.size(); ++i)
        std::cout << (i ? "," : "") << args.task_counts[i];
    std::cout << " seed=" << spec.base.seed << " group_size=" << spec.base.group_size
              << " features=" << spec.base.feature_dim << " samples=" << spec.base.samples_per_task
              << " lambda=" << (args.lambda >= 0.0 ? std::to_string(args.lambda) : "cv-at-smallest")
              << " " << describe_grid(spec.grid) << " " << args.fit.describe() << "\n";

    const ScaleBenchResult result = scale_bench(spec);
    std::cout << "lambda used: " << result.lambda << "\n";
    for (std::size_t i = 0; i < result.task_counts.size(); ++i)
        std::printf("tasks %zu: fit %.3fs, outer %zu, cg %zu\n", result.task_counts[i],
                    result.seconds[i], result.outer_iterations[i],
                    result.total_cg_iterations[i]);
    if (result.slope)
        std::printf("log-log slope of fit time vs tasks: %.4f\n", *result.slope);
    else
        std::cout << "log-log slope: n/a (single task count)\n";

    if (!args.out.empty()) {
        AtomicFile file(args.out);
        auto& os = file.stream();
        os << "tasks,seconds,outer_iterations,total_cg_iterations\n";
        for (std::size_t i = 0; i < result.task_counts.size(); ++i)
            os << result.task_counts[i] << ',' << format_seconds(result.seconds[i]) << ','
               << result.outer_iterations[i] << ',' << result.total_cg_iterations[i] << '\n';
        os << "# lambda=" << format_double(result.lambda, 12) << '\n';
        if (result.slope) os << "# slope=" << format_double(*result.slope, 12) << '\n';
        file.commit();
        std::cout << "runtime report written to " << args.out << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-task linear regression via convex clustering on a task graph"};
    app.require_subcommand(1);

    GenDataArgs gen_args;
    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset CSV");
    add_gen_flags(gen, gen_args.gen);
    gen->add_option("--out", gen_args.out, "Output CSV path")->required();

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Fit a model on a dataset CSV");
    train->add_option("--data", train_args.data, "Training CSV")->required();
    train->add_option("--model", train_args.model_out, "Output model path")->required();
    train->add_option("--lambda", train_args.lambda, "Fusion strength (skips cross-validation)");
    train->add_flag("--cv", train_args.use_cv, "Select lambda by cross-validation grid search");
    add_fit_flags(train, train_args.fit);
    add_grid_flags(train, train_args.grid);

    PredictArgs predict_args;
    auto* pred = app.add_subcommand("predict", "Write per-sample predictions for a dataset");
    pred->add_option("--model", predict_args.model, "Model path")->required();
    pred->add_option("--data", predict_args.data, "Dataset CSV")->required();
    pred->add_option("--out", predict_args.out, "Output predictions CSV")->required();

    PredictArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "Print pooled RMSE of a model on a dataset");
    eval->add_option("--model", eval_args.model, "Model path")->required();
    eval->add_option("--data", eval_args.data, "Dataset CSV")->required();

    BenchmarkArgs bench_args;
    auto* bench = app.add_subcommand("benchmark", "Split/fit/score methods over repeated shuffles");
    bench->add_option("--data", bench_args.data, "Dataset CSV (alternative to --kind)");
    bench->add_option("--kind", bench_args.gen.kind, "Generate the dataset: syn or scalesyn");
    add_gen_flags(bench, bench_args.gen, /*with_kind=*/false);
    bench->add_option("--ratios", bench_args.ratios, "Training ratios")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--repeats", bench_args.repeats, "Shuffle repetitions")
        ->capture_default_str();
    bench->add_option("--methods", bench_args.methods, "Methods: ccmtl,stl,itl")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--split-seed", bench_args.split_seed, "Base split seed (repeat r uses seed+r)")
        ->capture_default_str();
    bench->add_option("--out", bench_args.out, "Report CSV path");
    add_fit_flags(bench, bench_args.fit);
    add_grid_flags(bench, bench_args.grid);

    ScaleBenchArgs scale_args;
    auto* scale = app.add_subcommand("scale-bench", "Fit wall time vs task count on ScaleSyn");
    scale->add_option("--task-counts", scale_args.task_counts, "Ascending task counts")
        ->delimiter(',')
        ->capture_default_str();
    scale->add_option("--lambda", scale_args.lambda,
                      "Fusion strength (default: cross-validate at the smallest count)");
    scale->add_option("--out", scale_args.out, "Runtime CSV path");
    add_gen_flags(scale, scale_args.gen, /*with_kind=*/false);
    add_fit_flags(scale, scale_args.fit);
    add_grid_flags(scale, scale_args.grid);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) run_gen_data(gen_args);
        if (train->parsed()) run_train(train_args);
        if (pred->parsed()) run_predict(predict_args);
        if (eval->parsed()) run_evaluate(eval_args);
        if (bench->parsed()) run_benchmark(bench_args);
        if (scale->parsed()) run_scale_bench(scale_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
