#pragma once

#include "fnapprox/benchmark_functions.hpp"
#include "fnapprox/expansion.hpp"
#include "fnapprox/lbfgs.hpp"
#include "fnapprox/mlp.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fnapprox {

/// The five controlled model configurations.
enum class ModelConfigId { Standard, Exp3, Exp5, Exp7, Adjusted };

inline constexpr std::array<ModelConfigId, 5> kAllModelConfigs{
    ModelConfigId::Standard, ModelConfigId::Exp3, ModelConfigId::Exp5, ModelConfigId::Exp7,
    ModelConfigId::Adjusted};

/// "standard", "exp3", "exp5", "exp7", "adjusted"
std::string_view to_string(ModelConfigId id);
std::optional<ModelConfigId> parse_model_config(std::string_view text);

/// A concrete model: how inputs are expanded and the hidden widths.
struct ModelSpec {
    std::string name;
    ExpansionConfig expansion;
    std::vector<std::size_t> hidden_widths{100, 100, 50, 50};

    MlpArchitecture architecture() const;
};

ModelSpec model_spec(ModelConfigId id);

/// Expansion with k = 2 and the given scheme on the default widths; named
/// after the scheme ("pi", "zero", ...).
ModelSpec constant_ablation_spec(ConstantScheme scheme, int k = 2);

struct ExperimentSettings {
    std::size_t train_points = 1000;
    std::size_t test_points = 100;
    double target_mse = 1e-5;
    LbfgsConfig lbfgs{};
    /// Also evaluate test MSE after every iteration.
    bool record_test_trace = true;
};

struct RunResult {
    FunctionId function = FunctionId::F1;
    std::string config;
    std::uint64_t seed = 0;
    std::size_t params = 0;
    ExpansionConfig expansion;
    std::vector<std::size_t> hidden_widths;
    ConvergenceTrace trace;
    /// Test MSE after each completed iteration (empty unless requested).
    std::vector<double> test_trace;
    double initial_test_mse = 0.0;
    std::size_t iterations_to_target = 0;
    double final_train_mse = 0.0;
    double final_test_mse = 0.0;
    std::size_t total_evaluations = 0;
    /// GradTol, MaxIter, LineSearchFail, or Error when the run threw.
    std::string stop_reason;
    std::string error;
    FlatVector final_params;

    bool failed() const noexcept { return stop_reason == "Error"; }
};

/// Sub-stream tags for seed derivation. Training data depends only on
/// (seed, function), so every model sees the same samples for a given seed.
inline constexpr std::uint64_t kTrainStreamTag = 0x747261696e;   // "train"
inline constexpr std::uint64_t kInitStreamTag = 0x696e6974;      // "init"

Dataset training_set(FunctionId fn, std::uint64_t seed, std::size_t n);

/// Full pipeline for one (function, model, seed). Never throws for optimizer
/// trouble; failures are reported through stop_reason.
RunResult run_experiment(FunctionId fn, const ModelSpec& model, std::uint64_t seed,
                         const ExperimentSettings& settings);
RunResult run_experiment(FunctionId fn, ModelConfigId model, std::uint64_t seed,
                         const ExperimentSettings& settings);

/// Smallest 1-based iteration whose training MSE is <= target; returns
/// max_iterations when the target is never reached. Throws on an empty trace.
std::size_t iterations_to_target(const ConvergenceTrace& trace, double target,
                                 std::size_t max_iterations);

/// (standard - expanded) / standard * 100. Throws if standard_mse <= 0.
double mse_improvement(double standard_mse, double expanded_mse);

/// standard_iters / model_iters. Throws if either is zero.
double convergence_rate(std::size_t standard_iters, std::size_t model_iters);

/// One line of summary.csv; every table is computed from these rows alone.
struct SummaryRow {
    FunctionId function = FunctionId::F1;
    std::string config;
    std::uint64_t seed = 0;
    std::size_t params = 0;
    std::size_t iters_to_target = 0;
    double final_train_mse = 0.0;
    double final_test_mse = 0.0;
};

SummaryRow summarize(const RunResult& run);

/// Header: function,config,seed,params,iters_to_target,final_train_mse,final_test_mse
std::string summary_csv(std::span<const SummaryRow> rows);
std::vector<SummaryRow> parse_summary_csv(std::string_view text);

struct CategoryRow {
    std::string category; // category name or "Overall"
    std::vector<FunctionId> functions;
    double mse_improvement_pct = 0.0;
    double iteration_reduction_pct = 0.0;
    std::size_t pairs = 0;
};

/// Per-(function, seed) paired improvements of `expanded` over `standard`,
/// averaged within each category and overall. Requires both configs to cover
/// all ten functions with matching seeds. Iteration reduction is signed
/// unless `clamp_nonnegative` is set.
std::vector<CategoryRow> aggregate_by_category(std::span<const SummaryRow> rows,
                                               std::string_view standard_config,
                                               std::string_view expanded_config,
                                               bool clamp_nonnegative = false);

std::string category_csv(std::span<const CategoryRow> rows);

struct ConfigSummary {
    std::string config;
    std::size_t params = 0;
    std::size_t runs = 0;
    double iters_mean = 0.0;
    double iters_sd_functions = 0.0;
    double iters_sd_seeds = 0.0;
    double test_mse_mean = 0.0;
    double test_mse_sd_functions = 0.0;
    double test_mse_sd_seeds = 0.0;
    double train_mse_mean = 0.0;
    /// Only set when a baseline config is present.
    std::optional<double> conv_rate_mean;
    std::optional<double> conv_rate_sd_functions;
    std::optional<double> conv_rate_sd_seeds;
    std::optional<double> mse_improvement_pct;
};

/// Table-1 style summary. Means are over all (function, seed) runs. The
/// "_sd_functions" columns are the spread of per-function means, the
/// "_sd_seeds" columns the spread of per-seed means. Convergence rate is the
/// per-(function, seed) ratio baseline_iters / config_iters.
std::vector<ConfigSummary> summarize_configs(std::span<const SummaryRow> rows,
                                             std::span<const std::string> config_order,
                                             std::string_view baseline_config);

std::string config_summary_csv(std::span<const ConfigSummary> rows);

struct FunctionDetailRow {
    std::string config;
    double iters_mean = 0.0;
    double iters_median = 0.0;
    double test_mse_mean = 0.0;
    double test_mse_median = 0.0;
};

/// Per-config detail for one function (Table-3 style).
std::vector<FunctionDetailRow> function_detail(std::span<const SummaryRow> rows, FunctionId fn,
                                               std::span<const std::string> config_order);
std::string function_detail_csv(std::span<const FunctionDetailRow> rows);

struct ConstantRankRow {
    std::string scheme;
    double mean_test_mse = 0.0;
    /// Mean over functions of (scheme mean MSE / reference mean MSE).
    double relative_mse = 0.0;
    /// Functions where the scheme's mean MSE is <= the reference's.
    std::size_t functions_at_or_below_reference = 0;
    std::size_t rank = 0;
};

/// Table-4 style ranking, normalized so the reference scheme reads 1.00.
std::vector<ConstantRankRow> rank_constants(std::span<const SummaryRow> rows,
                                            std::span<const std::string> schemes,
                                            std::string_view reference);
std::string constant_ranking_csv(std::span<const ConstantRankRow> rows);

/// Mean of `final_test_mse` over seeds for (function, config); nullopt when
/// there are no finite entries.
std::optional<double> mean_test_mse(std::span<const SummaryRow> rows, FunctionId fn,
                                    std::string_view config);

struct SuiteOptions {
    std::vector<std::uint64_t> seeds{1};
    std::vector<FunctionId> functions{kAllFunctions.begin(), kAllFunctions.end()};
    std::vector<ModelSpec> models;
    ExperimentSettings settings{};
    std::size_t jobs = 1;
    /// Where to write per-run files and tables; empty means no output.
    std::filesystem::path out_dir;
    bool clamp_nonnegative = false;
    bool write_checkpoints = false;
    /// Progress hook, called from worker threads after each run.
    std::function<void(const RunResult&, std::size_t done, std::size_t total)> on_run_done;
};

struct SuiteReport {
    /// Ordered by (function, model order, seed) regardless of scheduling.
    std::vector<RunResult> runs;
    std::vector<SummaryRow> summary;
    std::vector<ConfigSummary> configs;
    std::vector<CategoryRow> categories;          // dimension ablation only
    std::vector<FunctionDetailRow> f1_detail;     // when F1 is included
    std::vector<ConstantRankRow> constant_ranking; // constant ablation only
    std::size_t failed_runs = 0;
};

/// Runs every (function, model, seed) task on `jobs` worker threads.
std::vector<RunResult> run_all(const SuiteOptions& options);

/// All five model configurations; writes per-run files, summary.csv,
/// table1_convergence.csv, table2_categories.csv (full coverage only) and
/// table3_f1.csv.
SuiteReport run_dimension_ablation(SuiteOptions options);

/// The five constant schemes at expansion factor k; writes per-run files,
/// summary.csv and table4_constants.csv.
SuiteReport run_constant_ablation(SuiteOptions options, int k = 2);

/// Per-run JSON document (config fingerprint, metrics, stop reason).
std::string run_json(const RunResult& run, const ExperimentSettings& settings);

/// Base file name for a run, e.g. "F1_exp5_s42".
std::string run_stem(const RunResult& run);

void write_run_files(const RunResult& run, const ExperimentSettings& settings,
                     const std::filesystem::path& dir, bool write_checkpoint);

} // namespace fnapprox
