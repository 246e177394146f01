// fnapprox: train and evaluate MLP function approximators with and without
// constant-padded input expansion.
//
//   fnapprox run --fn F1 --config exp5 --seed 42 --out run.json
//   fnapprox suite --seeds 1,2,3,4,5 --out results/
//   fnapprox ablate-consts --k 2 --seeds 1,2,3 --out results/
//   fnapprox eval --fn F9 --x 0.0
//
// Exit codes: 0 success, 1 invalid arguments, 2 suite finished with failed runs.

#include "fnapprox/benchmark_functions.hpp"
#include "fnapprox/harness.hpp"
#include "fnapprox/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace fnapprox;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailedRuns = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        std::size_t pos = 0;
        try {
            seeds.push_back(std::stoull(item, &pos));
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size()) {
            throw UsageError("invalid seed '" + item + "'");
        }
    }
    if (seeds.empty()) {
        throw UsageError("--seeds needs at least one seed");
    }
    return seeds;
}

std::vector<FunctionId> parse_functions(const std::string& text)
{
    if (text.empty() || text == "all") {
        return {kAllFunctions.begin(), kAllFunctions.end()};
    }
    std::vector<FunctionId> fns;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto fn = parse_function_id(item);
        if (!fn) {
            throw UsageError("unknown function '" + item + "'");
        }
        fns.push_back(*fn);
    }
    return fns;
}

FunctionId require_function(const std::string& text)
{
    const auto fn = parse_function_id(text);
    if (!fn) {
        throw UsageError("unknown function '" + text + "' (expected F1..F10)");
    }
    return *fn;
}

struct TrainingFlags {
    std::size_t max_iter = 500;
    double target_mse = 1e-5;
    double lr = 1.0;
    double tol = 1e-10;
    bool relative_tol = false;
    std::size_t history = 10;
    std::size_t train_points = 1000;
    std::size_t test_points = 100;

    void add_to(CLI::App& app)
    {
        app.add_option("--max-iter", max_iter, "Maximum LBFGS iterations")->capture_default_str();
        app.add_option("--target-mse", target_mse, "Training MSE target for iterations-to-target")
            ->capture_default_str();
        app.add_option("--lr", lr, "Initial line-search step")->capture_default_str();
        app.add_option("--grad-tol", tol, "Gradient infinity-norm tolerance")->capture_default_str();
        app.add_flag("--relative-tol", relative_tol, "Scale the tolerance by the initial gradient norm");
        app.add_option("--history", history, "LBFGS curvature pairs kept")->capture_default_str();
        app.add_option("--train-points", train_points)->capture_default_str();
        app.add_option("--test-points", test_points)->capture_default_str();
    }

    ExperimentSettings settings() const
    {
        ExperimentSettings s;
        s.train_points = train_points;
        s.test_points = test_points;
        s.target_mse = target_mse;
        s.lbfgs.max_iterations = max_iter;
        s.lbfgs.learning_rate = lr;
        s.lbfgs.grad_tolerance = tol;
        s.lbfgs.tolerance_mode = relative_tol ? ToleranceMode::RelativeToInitial : ToleranceMode::Absolute;
        s.lbfgs.history_size = history;
        if (train_points < 1 || test_points < 2) {
            throw UsageError("need --train-points >= 1 and --test-points >= 2");
        }
        try {
            validate(s.lbfgs);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return s;
    }
};

void print_progress(const RunResult& r, std::size_t done, std::size_t total)
{
    std::fprintf(stderr, "[%zu/%zu] %s %s seed=%llu iters_to_target=%zu test_mse=%.3e (%s)\n", done,
                 total, to_string(r.function).c_str(), r.config.c_str(),
                 static_cast<unsigned long long>(r.seed), r.iterations_to_target, r.final_test_mse,
                 r.stop_reason.c_str());
}

void print_configs(const SuiteReport& report)
{
    std::printf("%-10s %7s %12s %14s %12s\n", "config", "params", "iters", "test_mse", "conv_rate");
    for (const auto& c : report.configs) {
        std::printf("%-10s %7zu %12.1f %14.4e %12s\n", c.config.c_str(), c.params, c.iters_mean,
                    c.test_mse_mean,
                    c.conv_rate_mean ? format_double(*c.conv_rate_mean).substr(0, 6).c_str() : "-");
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Function approximation with constant-padded input expansion"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "Train one model on one function");
    std::string run_fn = "F1", run_config = "standard", run_out, run_trace, run_ckpt;
    std::uint64_t run_seed = 42;
    TrainingFlags run_flags;
    run_cmd->add_option("--fn", run_fn, "Benchmark function F1..F10")->capture_default_str();
    run_cmd->add_option("--config", run_config, "standard | exp3 | exp5 | exp7 | adjusted")
        ->capture_default_str();
    run_cmd->add_option("--seed", run_seed)->capture_default_str();
    run_cmd->add_option("--out", run_out, "Run JSON path (trace CSV is written alongside)");
    run_cmd->add_option("--trace", run_trace, "Trace CSV path (default: <out stem>_trace.csv)");
    run_cmd->add_option("--checkpoint", run_ckpt, "Write the trained model checkpoint here");
    run_flags.add_to(*run_cmd);

    // suite
    auto* suite_cmd = app.add_subcommand("suite", "Dimension ablation over all five model configs");
    std::string suite_seeds = "1,2,3,4,5", suite_fns = "all", suite_out = "results";
    std::size_t suite_jobs = 1;
    bool suite_smoke = false, suite_clamp = false, suite_ckpt = false;
    TrainingFlags suite_flags;
    suite_cmd->add_option("--seeds", suite_seeds, "Comma-separated seeds")->capture_default_str();
    suite_cmd->add_option("--functions", suite_fns, "Comma-separated functions or 'all'")
        ->capture_default_str();
    suite_cmd->add_option("--out", suite_out, "Output directory")->capture_default_str();
    suite_cmd->add_option("--jobs", suite_jobs, "Worker threads")->capture_default_str();
    suite_cmd->add_flag("--smoke", suite_smoke, "150 iterations on F1, F5, F6");
    suite_cmd->add_flag("--clamp-nonnegative", suite_clamp,
                        "Report negative category iteration reductions as 0");
    suite_cmd->add_flag("--checkpoints", suite_ckpt, "Write a model checkpoint per run");
    suite_flags.add_to(*suite_cmd);

    // ablate-consts
    auto* consts_cmd = app.add_subcommand("ablate-consts", "Constant-scheme ablation");
    std::string consts_seeds = "1,2,3", consts_fns = "all", consts_out = "results";
    int consts_k = 2;
    std::size_t consts_jobs = 1;
    TrainingFlags consts_flags;
    consts_cmd->add_option("--k", consts_k, "Expansion factor (mixed needs k = 2)")->capture_default_str();
    consts_cmd->add_option("--seeds", consts_seeds)->capture_default_str();
    consts_cmd->add_option("--functions", consts_fns)->capture_default_str();
    consts_cmd->add_option("--out", consts_out)->capture_default_str();
    consts_cmd->add_option("--jobs", consts_jobs)->capture_default_str();
    consts_flags.add_to(*consts_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Print a benchmark function value");
    std::string eval_fn;
    double eval_x = 0.0;
    eval_cmd->add_option("--fn", eval_fn)->required();
    eval_cmd->add_option("--x", eval_x)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*eval_cmd) {
            const auto fn = require_function(eval_fn);
            double y = 0.0;
            try {
                y = eval_function(fn, eval_x);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            std::printf("%s\n", format_double(y).c_str());
            return kExitOk;
        }

        if (*run_cmd) {
            const auto fn = require_function(run_fn);
            const auto cfg = parse_model_config(run_config);
            if (!cfg) {
                throw UsageError("unknown config '" + run_config + "'");
            }
            const auto settings = run_flags.settings();
            const RunResult r = run_experiment(fn, *cfg, run_seed, settings);
            const std::string json = run_json(r, settings);
            if (run_out.empty()) {
                std::cout << json;
            } else {
                write_text_file(run_out, json);
                std::filesystem::path trace_path = run_trace;
                if (trace_path.empty()) {
                    std::filesystem::path p(run_out);
                    trace_path = p.parent_path() / (p.stem().string() + "_trace.csv");
                }
                std::ostringstream trace;
                write_trace_csv(trace, r.trace);
                write_text_file(trace_path, trace.str());
            }
            if (!run_ckpt.empty() && !r.final_params.empty()) {
                Checkpoint ckpt;
                ckpt.architecture = model_spec(*cfg).architecture();
                ckpt.seed = run_seed;
                ckpt.expansion = r.expansion;
                ckpt.params = r.final_params;
                std::ostringstream os;
                write_checkpoint(os, ckpt);
                write_text_file(run_ckpt, os.str());
            }
            std::fprintf(stderr, "%s %s seed=%llu params=%zu iters_to_target=%zu train_mse=%.4e "
                                 "test_mse=%.4e stop=%s\n",
                         to_string(fn).c_str(), r.config.c_str(),
                         static_cast<unsigned long long>(run_seed), r.params, r.iterations_to_target,
                         r.final_train_mse, r.final_test_mse, r.stop_reason.c_str());
            return r.failed() ? kExitFailedRuns : kExitOk;
        }

        if (*suite_cmd) {
            SuiteOptions opt;
            opt.seeds = parse_seeds(suite_seeds);
            if (suite_smoke) {
                suite_flags.max_iter = 150;
                opt.functions = {FunctionId::F1, FunctionId::F5, FunctionId::F6};
            } else {
                opt.functions = parse_functions(suite_fns);
            }
            opt.settings = suite_flags.settings();
            opt.jobs = suite_jobs;
            opt.out_dir = suite_out;
            opt.clamp_nonnegative = suite_clamp;
            opt.write_checkpoints = suite_ckpt;
            opt.on_run_done = print_progress;
            const auto report = run_dimension_ablation(opt);
            print_configs(report);
            return report.failed_runs ? kExitFailedRuns : kExitOk;
        }

        if (*consts_cmd) {
            if (consts_k < 1) {
                throw UsageError("--k must be >= 1");
            }
            SuiteOptions opt;
            opt.seeds = parse_seeds(consts_seeds);
            opt.functions = parse_functions(consts_fns);
            opt.settings = consts_flags.settings();
            opt.jobs = consts_jobs;
            opt.out_dir = consts_out;
            opt.on_run_done = print_progress;
            const auto report = run_constant_ablation(opt, consts_k);
            print_configs(report);
            std::printf("\n%-8s %5s %12s\n", "scheme", "rank", "relative");
            for (const auto& r : report.constant_ranking) {
                std::printf("%-8s %5zu %12.4f\n", r.scheme.c_str(), r.rank, r.relative_mse);
            }
            return report.failed_runs ? kExitFailedRuns : kExitOk;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailedRuns;
    }
    return kExitUsage;
}
