#include "fnapprox/harness.hpp"

#include "fnapprox/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fnapprox {

namespace {

using ordered_json = nlohmann::ordered_json;

double mean(std::span<const double> v)
{
    if (v.empty()) {
        return std::nan("");
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for fewer than two values.
double stddev(std::span<const double> v)
{
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v)
{
    if (v.empty()) {
        return std::nan("");
    }
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Means of `value` grouped by `key`, in key order.
template <class Key, class Row, class KeyFn, class ValueFn>
std::vector<double> group_means(std::span<const Row> rows, KeyFn key, ValueFn value)
{
    std::map<Key, std::vector<double>> groups;
    for (const auto& r : rows) {
        groups[key(r)].push_back(value(r));
    }
    std::vector<double> out;
    for (const auto& [k, vals] : groups) {
        out.push_back(mean(vals));
    }
    return out;
}

std::string join_widths(const std::vector<std::size_t>& widths)
{
    std::string s;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        s += (i ? "-" : "") + std::to_string(widths[i]);
    }
    return s;
}

std::string canonical_config(const RunResult& run, const ExperimentSettings& s)
{
    std::ostringstream os;
    os << "fn=" << to_string(run.function) << ";config=" << run.config << ";seed=" << run.seed
       << ";widths=" << join_widths(run.hidden_widths) << ";k=" << run.expansion.k()
       << ";scheme=" << to_string(run.expansion.scheme()) << ";constants=";
    for (double c : run.expansion.constants()) {
        os << format_double(c) << ' ';
    }
    os << ";train=" << s.train_points << ";test=" << s.test_points
       << ";target=" << format_double(s.target_mse) << ";lr=" << format_double(s.lbfgs.learning_rate)
       << ";max_iter=" << s.lbfgs.max_iterations << ";tol=" << format_double(s.lbfgs.grad_tolerance)
       << ";tol_mode=" << (s.lbfgs.tolerance_mode == ToleranceMode::Absolute ? "abs" : "rel")
       << ";history=" << s.lbfgs.history_size << ";c1=" << format_double(s.lbfgs.wolfe_c1)
       << ";c2=" << format_double(s.lbfgs.wolfe_c2) << ";ls_evals=" << s.lbfgs.max_line_search_evals;
    return os.str();
}

bool covers_all_functions(std::span<const SummaryRow> rows, std::string_view config)
{
    std::set<FunctionId> seen;
    for (const auto& r : rows) {
        if (r.config == config) {
            seen.insert(r.function);
        }
    }
    return seen.size() == kAllFunctions.size();
}

bool has_function(std::span<const FunctionId> fns, FunctionId fn)
{
    return std::find(fns.begin(), fns.end(), fn) != fns.end();
}

void write_suite_tables(const SuiteReport& report, const SuiteOptions& options)
{
    const auto& dir = options.out_dir;
    for (const auto& run : report.runs) {
        write_run_files(run, options.settings, dir / "runs", options.write_checkpoints);
    }
    write_text_file(dir / "summary.csv", summary_csv(report.summary));
    write_text_file(dir / "table1_convergence.csv", config_summary_csv(report.configs));
    if (!report.categories.empty()) {
        write_text_file(dir / "table2_categories.csv", category_csv(report.categories));
    }
    if (!report.f1_detail.empty()) {
        write_text_file(dir / "table3_f1.csv", function_detail_csv(report.f1_detail));
    }
    if (!report.constant_ranking.empty()) {
        write_text_file(dir / "table4_constants.csv", constant_ranking_csv(report.constant_ranking));
    }
}

std::vector<std::string> model_names(const std::vector<ModelSpec>& models)
{
    std::vector<std::string> names;
    for (const auto& m : models) {
        names.push_back(m.name);
    }
    return names;
}

} // namespace

std::string_view to_string(ModelConfigId id)
{
    switch (id) {
    case ModelConfigId::Standard: return "standard";
    case ModelConfigId::Exp3: return "exp3";
    case ModelConfigId::Exp5: return "exp5";
    case ModelConfigId::Exp7: return "exp7";
    case ModelConfigId::Adjusted: return "adjusted";
    }
    throw std::invalid_argument("unknown model config");
}

std::optional<ModelConfigId> parse_model_config(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    lower.erase(std::remove(lower.begin(), lower.end(), '-'), lower.end());
    for (auto id : kAllModelConfigs) {
        if (lower == to_string(id)) {
            return id;
        }
    }
    return std::nullopt;
}

MlpArchitecture ModelSpec::architecture() const
{
    MlpArchitecture arch;
    arch.input_dim = expansion.output_dim();
    arch.hidden_widths = hidden_widths;
    arch.activation = Activation::Tanh;
    return arch;
}

ModelSpec model_spec(ModelConfigId id)
{
    ModelSpec spec;
    spec.name = std::string(to_string(id));
    switch (id) {
    case ModelConfigId::Standard: break;
    case ModelConfigId::Exp3: spec.expansion = ExpansionConfig(1, ConstantScheme::AllPi); break;
    case ModelConfigId::Exp5: spec.expansion = ExpansionConfig(2, ConstantScheme::AllPi); break;
    case ModelConfigId::Exp7: spec.expansion = ExpansionConfig(3, ConstantScheme::AllPi); break;
    case ModelConfigId::Adjusted: spec.hidden_widths = {102, 102, 52, 52}; break;
    }
    return spec;
}

ModelSpec constant_ablation_spec(ConstantScheme scheme, int k)
{
    ModelSpec spec;
    spec.name = std::string(to_string(scheme));
    spec.expansion = ExpansionConfig(k, scheme);
    return spec;
}

Dataset training_set(FunctionId fn, std::uint64_t seed, std::size_t n)
{
    Prng prng(derive_seed(seed, kTrainStreamTag, static_cast<std::uint64_t>(fn)));
    return sample_train(fn, n, prng);
}

RunResult run_experiment(FunctionId fn, const ModelSpec& model, std::uint64_t seed,
                         const ExperimentSettings& settings)
{
    RunResult run;
    run.function = fn;
    run.config = model.name;
    run.seed = seed;
    run.expansion = model.expansion;
    run.hidden_widths = model.hidden_widths;
    run.iterations_to_target = settings.lbfgs.max_iterations;
    try {
        const MlpArchitecture arch = model.architecture();
        run.params = param_count(arch);

        const Dataset train = training_set(fn, seed, settings.train_points);
        const Dataset test = sample_test(fn, settings.test_points);
        const Matrix x_train = expand_dataset(train, model.expansion);
        const Matrix x_test = expand_dataset(test, model.expansion);

        Prng init_prng(derive_seed(seed, kInitStreamTag, static_cast<std::uint64_t>(fn)));
        const MlpModel initial = init_xavier(arch, init_prng);
        run.initial_test_mse = mse_loss(arch, initial.params(), x_test, test.ys);

        const Objective objective = [&](std::span<const double> p, std::span<double> g) {
            return mse_loss_and_grad(arch, p, x_train, train.ys, g);
        };
        IterationCallback on_iteration;
        if (settings.record_test_trace) {
            on_iteration = [&](const IterationRecord&, std::span<const double> p) {
                run.test_trace.push_back(mse_loss(arch, p, x_test, test.ys));
            };
        }

        FlatVector x0(initial.params().begin(), initial.params().end());
        MinimizeResult res = minimize(objective, std::move(x0), settings.lbfgs, on_iteration);

        run.trace = std::move(res.trace);
        run.stop_reason = std::string(to_string(res.stop_reason));
        run.total_evaluations = res.total_evaluations;
        if (!run.trace.records.empty()) {
            run.iterations_to_target =
                iterations_to_target(run.trace, settings.target_mse, settings.lbfgs.max_iterations);
        }
        run.final_train_mse = res.value;
        run.final_test_mse = mse_loss(arch, res.x, x_test, test.ys);
        run.final_params = std::move(res.x);
    } catch (const std::exception& e) {
        run.stop_reason = "Error";
        run.error = e.what();
        run.final_train_mse = std::nan("");
        run.final_test_mse = std::nan("");
    }
    return run;
}

RunResult run_experiment(FunctionId fn, ModelConfigId model, std::uint64_t seed,
                         const ExperimentSettings& settings)
{
    return run_experiment(fn, model_spec(model), seed, settings);
}

std::size_t iterations_to_target(const ConvergenceTrace& trace, double target,
                                 std::size_t max_iterations)
{
    if (trace.records.empty()) {
        throw std::invalid_argument("iterations_to_target: empty trace");
    }
    for (const auto& r : trace.records) {
        if (r.loss <= target) {
            return std::min(r.iteration, max_iterations);
        }
    }
    return max_iterations;
}

double mse_improvement(double standard_mse, double expanded_mse)
{
    if (!(standard_mse > 0.0)) {
        throw std::invalid_argument("mse_improvement: standard MSE must be positive");
    }
    return (standard_mse - expanded_mse) / standard_mse * 100.0;
}

double convergence_rate(std::size_t standard_iters, std::size_t model_iters)
{
    if (standard_iters == 0 || model_iters == 0) {
        throw std::invalid_argument("convergence_rate: iteration counts must be >= 1");
    }
    return static_cast<double>(standard_iters) / static_cast<double>(model_iters);
}

SummaryRow summarize(const RunResult& run)
{
    return {run.function,         run.config,          run.seed,          run.params,
            run.iterations_to_target, run.final_train_mse, run.final_test_mse};
}

std::string summary_csv(std::span<const SummaryRow> rows)
{
    std::ostringstream os;
    os << "function,config,seed,params,iters_to_target,final_train_mse,final_test_mse\n";
    for (const auto& r : rows) {
        os << to_string(r.function) << ',' << r.config << ',' << r.seed << ',' << r.params << ','
           << r.iters_to_target << ',' << format_double(r.final_train_mse) << ','
           << format_double(r.final_test_mse) << '\n';
    }
    return os.str();
}

std::vector<SummaryRow> parse_summary_csv(std::string_view text)
{
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line)
        || line != "function,config,seed,params,iters_to_target,final_train_mse,final_test_mse") {
        throw std::invalid_argument("summary CSV has an unexpected header");
    }
    std::vector<SummaryRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) {
            f.push_back(field);
        }
        if (f.size() != 7) {
            throw std::invalid_argument("summary row must have 7 fields: " + line);
        }
        const auto fn = parse_function_id(f[0]);
        if (!fn) {
            throw std::invalid_argument("unknown function '" + f[0] + "'");
        }
        SummaryRow r;
        r.function = *fn;
        r.config = f[1];
        r.seed = std::stoull(f[2]);
        r.params = std::stoull(f[3]);
        r.iters_to_target = std::stoull(f[4]);
        r.final_train_mse = parse_double(f[5]);
        r.final_test_mse = parse_double(f[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<CategoryRow> aggregate_by_category(std::span<const SummaryRow> rows,
                                               std::string_view standard_config,
                                               std::string_view expanded_config,
                                               bool clamp_nonnegative)
{
    using Key = std::pair<FunctionId, std::uint64_t>;
    std::map<Key, const SummaryRow*> std_rows;
    std::map<Key, const SummaryRow*> exp_rows;
    for (const auto& r : rows) {
        if (r.config == standard_config) {
            std_rows[{r.function, r.seed}] = &r;
        } else if (r.config == expanded_config) {
            exp_rows[{r.function, r.seed}] = &r;
        }
    }
    for (auto fn : kAllFunctions) {
        std::set<std::uint64_t> s_seeds, e_seeds;
        for (const auto& [k, r] : std_rows) {
            if (k.first == fn) s_seeds.insert(k.second);
        }
        for (const auto& [k, r] : exp_rows) {
            if (k.first == fn) e_seeds.insert(k.second);
        }
        if (s_seeds.empty() || s_seeds != e_seeds) {
            throw std::invalid_argument("aggregate_by_category: " + to_string(fn)
                                        + " lacks paired results for both configs");
        }
    }

    struct Pair {
        FunctionId fn;
        double mse_gain;
        double iter_cut;
    };
    std::vector<Pair> pairs;
    for (const auto& [key, s] : std_rows) {
        const SummaryRow* e = exp_rows.at(key);
        if (!std::isfinite(s->final_test_mse) || !std::isfinite(e->final_test_mse)
            || !(s->final_test_mse > 0.0)) {
            continue;
        }
        const double iter_cut = (static_cast<double>(s->iters_to_target)
                                 - static_cast<double>(e->iters_to_target))
                                / static_cast<double>(s->iters_to_target) * 100.0;
        pairs.push_back({key.first, mse_improvement(s->final_test_mse, e->final_test_mse), iter_cut});
    }

    auto make_row = [&](std::string name, std::vector<FunctionId> fns) {
        CategoryRow row;
        row.category = std::move(name);
        row.functions = std::move(fns);
        std::vector<double> gains, cuts;
        for (const auto& p : pairs) {
            if (has_function(row.functions, p.fn)) {
                gains.push_back(p.mse_gain);
                cuts.push_back(p.iter_cut);
            }
        }
        row.pairs = gains.size();
        row.mse_improvement_pct = mean(gains);
        row.iteration_reduction_pct = mean(cuts);
        if (clamp_nonnegative && row.iteration_reduction_pct < 0.0) {
            row.iteration_reduction_pct = 0.0;
        }
        return row;
    };

    std::vector<CategoryRow> out;
    for (auto cat : kAllCategories) {
        out.push_back(make_row(std::string(to_string(cat)), functions_in(cat)));
    }
    out.push_back(make_row("Overall", {kAllFunctions.begin(), kAllFunctions.end()}));
    return out;
}

std::string category_csv(std::span<const CategoryRow> rows)
{
    std::ostringstream os;
    os << "category,functions,mse_improvement_pct,iteration_reduction_pct,pairs\n";
    for (const auto& r : rows) {
        os << r.category << ',';
        for (std::size_t i = 0; i < r.functions.size(); ++i) {
            os << (i ? " " : "") << to_string(r.functions[i]);
        }
        os << ',' << format_double(r.mse_improvement_pct) << ','
           << format_double(r.iteration_reduction_pct) << ',' << r.pairs << '\n';
    }
    return os.str();
}

std::optional<double> mean_test_mse(std::span<const SummaryRow> rows, FunctionId fn,
                                    std::string_view config)
{
    std::vector<double> v;
    for (const auto& r : rows) {
        if (r.function == fn && r.config == config && std::isfinite(r.final_test_mse)) {
            v.push_back(r.final_test_mse);
        }
    }
    if (v.empty()) {
        return std::nullopt;
    }
    return mean(v);
}

std::vector<ConfigSummary> summarize_configs(std::span<const SummaryRow> rows,
                                             std::span<const std::string> config_order,
                                             std::string_view baseline_config)
{
    std::map<std::pair<FunctionId, std::uint64_t>, std::size_t> baseline_iters;
    for (const auto& r : rows) {
        if (r.config == baseline_config && std::isfinite(r.final_test_mse)) {
            baseline_iters[{r.function, r.seed}] = r.iters_to_target;
        }
    }

    std::vector<ConfigSummary> out;
    for (const auto& name : config_order) {
        std::vector<SummaryRow> sel;
        for (const auto& r : rows) {
            if (r.config == name && std::isfinite(r.final_test_mse)) {
                sel.push_back(r);
            }
        }
        if (sel.empty()) {
            continue;
        }
        const std::span<const SummaryRow> s(sel);
        ConfigSummary c;
        c.config = name;
        c.params = sel.front().params;
        c.runs = sel.size();

        auto by_fn = [](const SummaryRow& r) { return r.function; };
        auto by_seed = [](const SummaryRow& r) { return r.seed; };
        auto iters = [](const SummaryRow& r) { return static_cast<double>(r.iters_to_target); };
        auto test = [](const SummaryRow& r) { return r.final_test_mse; };
        auto train = [](const SummaryRow& r) { return r.final_train_mse; };

        std::vector<double> all_iters, all_test, all_train;
        for (const auto& r : sel) {
            all_iters.push_back(iters(r));
            all_test.push_back(test(r));
            all_train.push_back(train(r));
        }
        c.iters_mean = mean(all_iters);
        c.test_mse_mean = mean(all_test);
        c.train_mse_mean = mean(all_train);
        c.iters_sd_functions = stddev(group_means<FunctionId>(s, by_fn, iters));
        c.iters_sd_seeds = stddev(group_means<std::uint64_t>(s, by_seed, iters));
        c.test_mse_sd_functions = stddev(group_means<FunctionId>(s, by_fn, test));
        c.test_mse_sd_seeds = stddev(group_means<std::uint64_t>(s, by_seed, test));

        struct Rate {
            FunctionId fn;
            std::uint64_t seed;
            double rate;
        };
        std::vector<Rate> rates;
        for (const auto& r : sel) {
            const auto it = baseline_iters.find({r.function, r.seed});
            if (it != baseline_iters.end()) {
                rates.push_back({r.function, r.seed, convergence_rate(it->second, r.iters_to_target)});
            }
        }
        if (!rates.empty()) {
            std::vector<double> all;
            for (const auto& q : rates) {
                all.push_back(q.rate);
            }
            const std::span<const Rate> rs(rates);
            auto rate = [](const Rate& q) { return q.rate; };
            c.conv_rate_mean = mean(all);
            c.conv_rate_sd_functions =
                stddev(group_means<FunctionId>(rs, [](const Rate& q) { return q.fn; }, rate));
            c.conv_rate_sd_seeds =
                stddev(group_means<std::uint64_t>(rs, [](const Rate& q) { return q.seed; }, rate));
        }
        out.push_back(std::move(c));
    }

    const auto base = std::find_if(out.begin(), out.end(),
                                   [&](const ConfigSummary& c) { return c.config == baseline_config; });
    if (base != out.end() && base->test_mse_mean > 0.0) {
        for (auto& c : out) {
            c.mse_improvement_pct = mse_improvement(base->test_mse_mean, c.test_mse_mean);
        }
    }
    return out;
}

std::string config_summary_csv(std::span<const ConfigSummary> rows)
{
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::ostringstream os;
    os << "config,params,runs,iters_mean,iters_sd_functions,iters_sd_seeds,test_mse_mean,"
          "test_mse_sd_functions,test_mse_sd_seeds,train_mse_mean,conv_rate_mean,"
          "conv_rate_sd_functions,conv_rate_sd_seeds,mse_improvement_pct\n";
    for (const auto& c : rows) {
        os << c.config << ',' << c.params << ',' << c.runs << ',' << format_double(c.iters_mean) << ','
           << format_double(c.iters_sd_functions) << ',' << format_double(c.iters_sd_seeds) << ','
           << format_double(c.test_mse_mean) << ',' << format_double(c.test_mse_sd_functions) << ','
           << format_double(c.test_mse_sd_seeds) << ',' << format_double(c.train_mse_mean) << ','
           << opt(c.conv_rate_mean) << ',' << opt(c.conv_rate_sd_functions) << ','
           << opt(c.conv_rate_sd_seeds) << ',' << opt(c.mse_improvement_pct) << '\n';
    }
    return os.str();
}

std::vector<FunctionDetailRow> function_detail(std::span<const SummaryRow> rows, FunctionId fn,
                                               std::span<const std::string> config_order)
{
    std::vector<FunctionDetailRow> out;
    for (const auto& name : config_order) {
        std::vector<double> iters, mses;
        for (const auto& r : rows) {
            if (r.function == fn && r.config == name && std::isfinite(r.final_test_mse)) {
                iters.push_back(static_cast<double>(r.iters_to_target));
                mses.push_back(r.final_test_mse);
            }
        }
        if (iters.empty()) {
            continue;
        }
        out.push_back({name, mean(iters), median(iters), mean(mses), median(mses)});
    }
    return out;
}

std::string function_detail_csv(std::span<const FunctionDetailRow> rows)
{
    std::ostringstream os;
    os << "config,iters_mean,iters_median,test_mse_mean,test_mse_median\n";
    for (const auto& r : rows) {
        os << r.config << ',' << format_double(r.iters_mean) << ',' << format_double(r.iters_median)
           << ',' << format_double(r.test_mse_mean) << ',' << format_double(r.test_mse_median) << '\n';
    }
    return os.str();
}

std::vector<ConstantRankRow> rank_constants(std::span<const SummaryRow> rows,
                                            std::span<const std::string> schemes,
                                            std::string_view reference)
{
    std::vector<ConstantRankRow> out;
    for (const auto& scheme : schemes) {
        ConstantRankRow row;
        row.scheme = scheme;
        std::vector<double> all, ratios;
        for (const auto& r : rows) {
            if (r.config == scheme && std::isfinite(r.final_test_mse)) {
                all.push_back(r.final_test_mse);
            }
        }
        if (all.empty()) {
            continue;
        }
        row.mean_test_mse = mean(all);
        for (auto fn : kAllFunctions) {
            const auto mine = mean_test_mse(rows, fn, scheme);
            const auto ref = mean_test_mse(rows, fn, reference);
            if (!mine || !ref) {
                continue;
            }
            if (*mine <= *ref) {
                ++row.functions_at_or_below_reference;
            }
            if (*ref > 0.0) {
                ratios.push_back(*mine / *ref);
            }
        }
        row.relative_mse = scheme == reference ? 1.0 : mean(ratios);
        out.push_back(std::move(row));
    }
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out[a].relative_mse < out[b].relative_mse;
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
        out[order[i]].rank = i + 1;
    }
    return out;
}

std::string constant_ranking_csv(std::span<const ConstantRankRow> rows)
{
    std::ostringstream os;
    os << "scheme,rank,relative_mse,mean_test_mse,functions_at_or_below_reference\n";
    for (const auto& r : rows) {
        os << r.scheme << ',' << r.rank << ',' << format_double(r.relative_mse) << ','
           << format_double(r.mean_test_mse) << ',' << r.functions_at_or_below_reference << '\n';
    }
    return os.str();
}

std::vector<RunResult> run_all(const SuiteOptions& options)
{
    if (options.seeds.empty()) {
        throw std::invalid_argument("at least one seed is required");
    }
    if (options.models.empty() || options.functions.empty()) {
        throw std::invalid_argument("at least one model and one function are required");
    }
    validate(options.settings.lbfgs);

    struct Task {
        FunctionId fn;
        const ModelSpec* model;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (auto fn : options.functions) {
        for (const auto& m : options.models) {
            for (auto seed : options.seeds) {
                tasks.push_back({fn, &m, seed});
            }
        }
    }

    std::vector<RunResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex progress_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto& t = tasks[i];
            results[i] = run_experiment(t.fn, *t.model, t.seed, options.settings);
            if (options.on_run_done) {
                std::lock_guard lock(progress_mutex);
                options.on_run_done(results[i], ++done, tasks.size());
            }
        }
    };

    const std::size_t n_threads = std::clamp<std::size_t>(options.jobs, 1, tasks.size());
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    return results;
}

SuiteReport run_dimension_ablation(SuiteOptions options)
{
    if (options.models.empty()) {
        for (auto id : kAllModelConfigs) {
            options.models.push_back(model_spec(id));
        }
    }
    SuiteReport report;
    report.runs = run_all(options);
    for (const auto& r : report.runs) {
        report.summary.push_back(summarize(r));
        report.failed_runs += r.failed() ? 1 : 0;
    }
    const auto names = model_names(options.models);
    const std::string baseline(to_string(ModelConfigId::Standard));
    const std::string expanded(to_string(ModelConfigId::Exp5));
    report.configs = summarize_configs(report.summary, names, baseline);
    if (covers_all_functions(report.summary, baseline) && covers_all_functions(report.summary, expanded)) {
        report.categories =
            aggregate_by_category(report.summary, baseline, expanded, options.clamp_nonnegative);
    }
    if (has_function(options.functions, FunctionId::F1)) {
        report.f1_detail = function_detail(report.summary, FunctionId::F1, names);
    }
    if (!options.out_dir.empty()) {
        write_suite_tables(report, options);
    }
    return report;
}

SuiteReport run_constant_ablation(SuiteOptions options, int k)
{
    if (options.models.empty()) {
        for (auto scheme : {ConstantScheme::AllPi, ConstantScheme::AllZero, ConstantScheme::AllOne,
                            ConstantScheme::AllE, ConstantScheme::Mixed}) {
            if (scheme == ConstantScheme::Mixed && k != 2) {
                continue;
            }
            options.models.push_back(constant_ablation_spec(scheme, k));
        }
    }
    SuiteReport report;
    report.runs = run_all(options);
    for (const auto& r : report.runs) {
        report.summary.push_back(summarize(r));
        report.failed_runs += r.failed() ? 1 : 0;
    }
    const auto names = model_names(options.models);
    const std::string reference(to_string(ConstantScheme::AllPi));
    report.configs = summarize_configs(report.summary, names, reference);
    report.constant_ranking = rank_constants(report.summary, names, reference);
    if (!options.out_dir.empty()) {
        write_suite_tables(report, options);
    }
    return report;
}

std::string run_stem(const RunResult& run)
{
    return to_string(run.function) + "_" + run.config + "_s" + std::to_string(run.seed);
}

std::string run_json(const RunResult& run, const ExperimentSettings& settings)
{
    ordered_json j;
    j["function"] = to_string(run.function);
    j["function_name"] = description(run.function);
    j["category"] = to_string(category_of(run.function));
    j["config"] = run.config;
    j["seed"] = run.seed;
    j["fingerprint"] = fingerprint(canonical_config(run, settings));
    j["model"] = {
        {"input_dim", run.expansion.output_dim()},
        {"hidden_widths", run.hidden_widths},
        {"params", run.params},
        {"expansion", {{"k", run.expansion.k()},
                       {"scheme", to_string(run.expansion.scheme())},
                       {"constants", run.expansion.constants()}}},
    };
    j["settings"] = {
        {"train_points", settings.train_points},
        {"test_points", settings.test_points},
        {"target_mse", settings.target_mse},
        {"learning_rate", settings.lbfgs.learning_rate},
        {"max_iterations", settings.lbfgs.max_iterations},
        {"grad_tolerance", settings.lbfgs.grad_tolerance},
        {"tolerance_mode",
         settings.lbfgs.tolerance_mode == ToleranceMode::Absolute ? "absolute" : "relative"},
        {"history_size", settings.lbfgs.history_size},
        {"wolfe_c1", settings.lbfgs.wolfe_c1},
        {"wolfe_c2", settings.lbfgs.wolfe_c2},
        {"max_line_search_evals", settings.lbfgs.max_line_search_evals},
    };
    j["metrics"] = {
        {"iterations_run", run.trace.records.size()},
        {"iterations_to_target", run.iterations_to_target},
        {"initial_train_mse", run.trace.initial_loss},
        {"initial_test_mse", run.initial_test_mse},
        {"final_train_mse", run.final_train_mse},
        {"final_test_mse", run.final_test_mse},
        {"function_evaluations", run.total_evaluations},
    };
    j["stop_reason"] = run.stop_reason;
    if (!run.error.empty()) {
        j["error"] = run.error;
    }
    return j.dump(2) + "\n";
}

void write_run_files(const RunResult& run, const ExperimentSettings& settings,
                     const std::filesystem::path& dir, bool write_checkpoint_file)
{
    const auto stem = run_stem(run);
    write_text_file(dir / (stem + ".json"), run_json(run, settings));

    std::ostringstream trace;
    write_trace_csv(trace, run.trace);
    write_text_file(dir / (stem + "_trace.csv"), trace.str());

    if (!run.test_trace.empty()) {
        std::ostringstream os;
        os << "iter,test_mse\n";
        for (std::size_t i = 0; i < run.test_trace.size(); ++i) {
            os << (i + 1) << ',' << format_double(run.test_trace[i]) << '\n';
        }
        write_text_file(dir / (stem + "_test_trace.csv"), os.str());
    }
    if (write_checkpoint_file && !run.final_params.empty()) {
        Checkpoint ckpt;
        ckpt.architecture.input_dim = run.expansion.output_dim();
        ckpt.architecture.hidden_widths = run.hidden_widths;
        ckpt.seed = run.seed;
        ckpt.expansion = run.expansion;
        ckpt.params = run.final_params;
        std::ostringstream os;
        write_checkpoint(os, ckpt);
        write_text_file(dir / (stem + "_model.json"), os.str());
    }
}

} // namespace fnapprox
