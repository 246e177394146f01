#pragma once

#include "fnapprox/numerics.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace fnapprox {

/// Objective oracle: returns f(x) and writes the gradient into `grad`.
/// Non-finite return values are treated as a failed evaluation.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

enum class ToleranceMode {
    /// Stop when ||g||_inf <= grad_tolerance.
    Absolute,
    /// Stop when ||g||_inf <= grad_tolerance * max(1, ||g0||_inf).
    RelativeToInitial,
};

struct LbfgsConfig {
    /// Initial trial step of every line search.
    double learning_rate = 1.0;
    std::size_t max_iterations = 500;
    double grad_tolerance = 1e-10;
    ToleranceMode tolerance_mode = ToleranceMode::Absolute;
    std::size_t history_size = 10;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    std::size_t max_line_search_evals = 25;
};

/// Throws std::invalid_argument unless 0 < c1 < c2 < 1, history_size >= 1,
/// max_iterations >= 1, learning_rate > 0 and max_line_search_evals >= 1.
void validate(const LbfgsConfig& cfg);

struct CurvaturePair {
    FlatVector s;
    FlatVector y;
    double rho; // 1 / s'y
};

/// Limited-memory curvature history. Only pairs with s'y > 0 are accepted;
/// the oldest pair is evicted when the history is full.
class CurvatureHistory {
public:
    explicit CurvatureHistory(std::size_t capacity);

    /// Returns false (and stores nothing) when s'y <= 0 or non-finite.
    bool push(FlatVector s, FlatVector y);
    void clear() noexcept { pairs_.clear(); }

    std::size_t size() const noexcept { return pairs_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return pairs_.empty(); }
    const std::deque<CurvaturePair>& pairs() const noexcept { return pairs_; }

private:
    std::size_t capacity_;
    std::deque<CurvaturePair> pairs_;
};

/// d = -H g using the two-loop recursion, with H0 = gamma I and
/// gamma = s'y / y'y from the newest pair (1 when the history is empty).
FlatVector two_loop_direction(const CurvatureHistory& history, std::span<const double> grad);

enum class LineSearchStatus {
    /// Both strong Wolfe conditions hold at the returned step.
    Converged,
    /// Evaluation budget spent; the best sufficient-decrease point is returned.
    MaxEvaluations,
    /// No decrease could be found.
    Failed,
};

struct LineSearchResult {
    LineSearchStatus status = LineSearchStatus::Failed;
    double step = 0.0;
    double value = 0.0;
    FlatVector x;
    FlatVector grad;
    std::size_t evaluations = 0;
};

struct LineSearchOptions {
    double initial_step = 1.0;
    double c1 = 1e-4;
    double c2 = 0.9;
    std::size_t max_evaluations = 25;
};

/// Bracketing line search with cubic-interpolation zoom that looks for a step
/// satisfying the strong Wolfe conditions along `direction` from `x`.
/// `value` and `grad` are f and its gradient at x; throws
/// std::invalid_argument if `direction` is not a descent direction.
LineSearchResult strong_wolfe_search(const Objective& f, std::span<const double> x,
                                     std::span<const double> direction, double value,
                                     std::span<const double> grad,
                                     const LineSearchOptions& options);

struct IterationRecord {
    std::size_t iteration; // 1-based
    double loss;
    double grad_inf_norm;
    double step;
    std::size_t evaluations;
};

struct ConvergenceTrace {
    double initial_loss = 0.0;
    double initial_grad_inf_norm = 0.0;
    std::vector<IterationRecord> records;
};

enum class StopReason { GradTol, MaxIter, LineSearchFail };

std::string_view to_string(StopReason reason);

struct MinimizeResult {
    FlatVector x;
    double value = 0.0;
    FlatVector grad;
    ConvergenceTrace trace;
    StopReason stop_reason = StopReason::MaxIter;
    std::size_t total_evaluations = 0;
};

/// Called after every completed outer iteration with the new iterate.
using IterationCallback = std::function<void(const IterationRecord&, std::span<const double> x)>;

/// Limited-memory BFGS. Throws std::domain_error when the objective is not
/// finite at x0.
MinimizeResult minimize(const Objective& f, FlatVector x0, const LbfgsConfig& cfg,
                        const IterationCallback& callback = {});

} // namespace fnapprox
