#include "fnapprox/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace fnapprox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TrialPoint {
    double step = 0.0;
    double value = 0.0;
    double slope = 0.0; // g(x + step d)' d
    FlatVector x;
    FlatVector grad;
};

// Minimizer of the cubic through (a, fa, ga) and (b, fb, gb), clamped to
// [lo_bound, hi_bound]; falls back to the midpoint of the bounds when the
// cubic has no real minimizer.
double cubic_minimizer(double a, double fa, double ga, double b, double fb, double gb,
                       double lo_bound, double hi_bound)
{
    const double mid = 0.5 * (lo_bound + hi_bound);
    const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
    const double d2_sq = d1 * d1 - ga * gb;
    if (!std::isfinite(d1) || !std::isfinite(d2_sq) || d2_sq < 0.0) {
        return mid;
    }
    const double d2 = std::sqrt(d2_sq);
    double t;
    if (a <= b) {
        t = b - (b - a) * ((gb + d2 - d1) / (gb - ga + 2.0 * d2));
    } else {
        t = a - (a - b) * ((ga + d2 - d1) / (ga - gb + 2.0 * d2));
    }
    if (!std::isfinite(t)) {
        return mid;
    }
    return std::clamp(t, lo_bound, hi_bound);
}

class LineSearch {
public:
    LineSearch(const Objective& f, std::span<const double> x, std::span<const double> d,
               double f0, double slope0, const LineSearchOptions& opt)
        : f_(f), x_(x), d_(d), f0_(f0), slope0_(slope0), opt_(opt),
          d_norm_(norm_inf(d)), x_norm_(norm_inf(x))
    {
    }

    LineSearchResult run()
    {
        TrialPoint prev{0.0, f0_, slope0_, {}, {}};
        double step = opt_.initial_step;

        for (std::size_t i = 0; evals_ < opt_.max_evaluations; ++i) {
            TrialPoint cur = evaluate(step);
            if (!armijo(cur) || (i > 0 && cur.value >= prev.value)) {
                return zoom(std::move(prev), std::move(cur));
            }
            note_candidate(cur);
            if (std::fabs(cur.slope) <= -opt_.c2 * slope0_) {
                return finish(LineSearchStatus::Converged, std::move(cur));
            }
            if (cur.slope >= 0.0) {
                return zoom(std::move(cur), std::move(prev));
            }
            const double min_step = cur.step + 0.01 * (cur.step - prev.step);
            const double max_step = cur.step * 10.0;
            const double next = cubic_minimizer(prev.step, prev.value, prev.slope, cur.step,
                                                cur.value, cur.slope, min_step, max_step);
            prev = std::move(cur);
            step = next;
        }
        return exhausted();
    }

private:
    bool armijo(const TrialPoint& p) const
    {
        return std::isfinite(p.value) && p.value <= f0_ + opt_.c1 * p.step * slope0_;
    }

    TrialPoint evaluate(double step)
    {
        TrialPoint p;
        p.step = step;
        p.x = axpy(step, d_, x_);
        p.grad.assign(x_.size(), 0.0);
        ++evals_;
        double value = f_(p.x, p.grad);
        double slope = dot(p.grad, d_);
        if (!std::isfinite(value) || !std::isfinite(slope)) {
            value = kInf;
            slope = kInf;
        }
        p.value = value;
        p.slope = slope;
        return p;
    }

    void note_candidate(const TrialPoint& p)
    {
        if (p.step > 0.0 && armijo(p) && p.value < f0_ && (!best_ || p.value < best_->value)) {
            best_ = p;
        }
    }

    // `lo` satisfies sufficient decrease with the lowest value seen in the
    // bracket; `hi` is the other end. The bracket contains a strong Wolfe step.
    LineSearchResult zoom(TrialPoint lo, TrialPoint hi)
    {
        note_candidate(lo);
        while (evals_ < opt_.max_evaluations) {
            const double width = std::fabs(hi.step - lo.step);
            if (width * d_norm_ <= 4.0 * std::numeric_limits<double>::epsilon()
                                       * std::max(1.0, x_norm_)) {
                break;
            }
            const double left = std::min(lo.step, hi.step);
            const double right = std::max(lo.step, hi.step);
            double step = std::isfinite(hi.value)
                              ? cubic_minimizer(lo.step, lo.value, lo.slope, hi.step, hi.value,
                                                hi.slope, left, right)
                              : 0.5 * (left + right);
            // Keep trial steps away from the bracket ends.
            const double margin = 0.1 * width;
            step = std::clamp(step, left + margin, right - margin);

            TrialPoint cur = evaluate(step);
            if (!armijo(cur) || cur.value >= lo.value) {
                hi = std::move(cur);
                continue;
            }
            note_candidate(cur);
            if (std::fabs(cur.slope) <= -opt_.c2 * slope0_) {
                return finish(LineSearchStatus::Converged, std::move(cur));
            }
            if (cur.slope * (hi.step - lo.step) >= 0.0) {
                hi = std::move(lo);
            }
            lo = std::move(cur);
        }
        return exhausted();
    }

    LineSearchResult exhausted()
    {
        if (best_) {
            return finish(LineSearchStatus::MaxEvaluations, std::move(*best_));
        }
        LineSearchResult r;
        r.status = LineSearchStatus::Failed;
        r.step = 0.0;
        r.value = f0_;
        r.evaluations = evals_;
        return r;
    }

    LineSearchResult finish(LineSearchStatus status, TrialPoint p)
    {
        LineSearchResult r;
        r.status = status;
        r.step = p.step;
        r.value = p.value;
        r.x = std::move(p.x);
        r.grad = std::move(p.grad);
        r.evaluations = evals_;
        return r;
    }

    const Objective& f_;
    std::span<const double> x_;
    std::span<const double> d_;
    double f0_;
    double slope0_;
    LineSearchOptions opt_;
    double d_norm_;
    double x_norm_;
    std::size_t evals_ = 0;
    std::optional<TrialPoint> best_;
};

} // namespace

void validate(const LbfgsConfig& cfg)
{
    if (!(cfg.wolfe_c1 > 0.0 && cfg.wolfe_c1 < cfg.wolfe_c2 && cfg.wolfe_c2 < 1.0)) {
        throw std::invalid_argument("Wolfe constants must satisfy 0 < c1 < c2 < 1");
    }
    if (cfg.history_size < 1) {
        throw std::invalid_argument("history_size must be >= 1");
    }
    if (cfg.max_iterations < 1) {
        throw std::invalid_argument("max_iterations must be >= 1");
    }
    if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
        throw std::invalid_argument("learning_rate must be positive and finite");
    }
    if (cfg.max_line_search_evals < 1) {
        throw std::invalid_argument("max_line_search_evals must be >= 1");
    }
    if (!(cfg.grad_tolerance >= 0.0)) {
        throw std::invalid_argument("grad_tolerance must be non-negative");
    }
}

CurvatureHistory::CurvatureHistory(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0) {
        throw std::invalid_argument("history capacity must be >= 1");
    }
}

bool CurvatureHistory::push(FlatVector s, FlatVector y)
{
    const double sy = dot(s, y);
    if (!(sy > 0.0) || !std::isfinite(sy) || !std::isfinite(dot(y, y))) {
        return false;
    }
    if (pairs_.size() == capacity_) {
        pairs_.pop_front();
    }
    pairs_.push_back({std::move(s), std::move(y), 1.0 / sy});
    return true;
}

FlatVector two_loop_direction(const CurvatureHistory& history, std::span<const double> grad)
{
    if (!all_finite(grad)) {
        throw std::invalid_argument("two_loop_direction: gradient must be finite");
    }
    const auto& pairs = history.pairs();
    FlatVector q(grad.begin(), grad.end());
    std::vector<double> alpha(pairs.size());
    for (std::size_t i = pairs.size(); i-- > 0;) {
        alpha[i] = pairs[i].rho * dot(pairs[i].s, q);
        axpy_inplace(-alpha[i], pairs[i].y, q);
    }
    double gamma = 1.0;
    if (!pairs.empty()) {
        const auto& newest = pairs.back();
        gamma = dot(newest.s, newest.y) / dot(newest.y, newest.y);
    }
    for (double& v : q) {
        v *= gamma;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double beta = pairs[i].rho * dot(pairs[i].y, q);
        axpy_inplace(alpha[i] - beta, pairs[i].s, q);
    }
    for (double& v : q) {
        v = -v;
    }
    return q;
}

LineSearchResult strong_wolfe_search(const Objective& f, std::span<const double> x,
                                     std::span<const double> direction, double value,
                                     std::span<const double> grad,
                                     const LineSearchOptions& options)
{
    if (x.size() != direction.size() || x.size() != grad.size()) {
        throw std::invalid_argument("strong_wolfe_search: length mismatch");
    }
    if (!(options.c1 > 0.0 && options.c1 < options.c2 && options.c2 < 1.0)) {
        throw std::invalid_argument("strong_wolfe_search: need 0 < c1 < c2 < 1");
    }
    if (!(options.initial_step > 0.0) || options.max_evaluations == 0) {
        throw std::invalid_argument("strong_wolfe_search: bad step or evaluation budget");
    }
    const double slope0 = dot(grad, direction);
    if (!(slope0 < 0.0)) {
        throw std::invalid_argument("strong_wolfe_search: direction is not a descent direction");
    }
    return LineSearch(f, x, direction, value, slope0, options).run();
}

std::string_view to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::GradTol: return "GradTol";
    case StopReason::MaxIter: return "MaxIter";
    case StopReason::LineSearchFail: return "LineSearchFail";
    }
    return "Unknown";
}

MinimizeResult minimize(const Objective& f, FlatVector x0, const LbfgsConfig& cfg,
                        const IterationCallback& callback)
{
    validate(cfg);
    MinimizeResult res;
    res.x = std::move(x0);
    res.grad.assign(res.x.size(), 0.0);
    res.value = f(res.x, res.grad);
    res.total_evaluations = 1;
    if (!std::isfinite(res.value) || !all_finite(res.grad)) {
        throw std::domain_error("minimize: objective is not finite at the starting point");
    }

    const double g0 = norm_inf(res.grad);
    res.trace.initial_loss = res.value;
    res.trace.initial_grad_inf_norm = g0;
    const double tol = cfg.tolerance_mode == ToleranceMode::Absolute
                           ? cfg.grad_tolerance
                           : cfg.grad_tolerance * std::max(1.0, g0);
    if (g0 <= tol) {
        res.stop_reason = StopReason::GradTol;
        return res;
    }

    const LineSearchOptions ls_opt{cfg.learning_rate, cfg.wolfe_c1, cfg.wolfe_c2,
                                   cfg.max_line_search_evals};
    CurvatureHistory history(cfg.history_size);
    res.stop_reason = StopReason::MaxIter;

    for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
        FlatVector d = two_loop_direction(history, res.grad);
        if (!(dot(d, res.grad) < 0.0)) {
            history.clear();
            d = axpy(-1.0, res.grad, FlatVector(res.grad.size(), 0.0));
        }

        auto ls = strong_wolfe_search(f, res.x, d, res.value, res.grad, ls_opt);
        res.total_evaluations += ls.evaluations;
        if (ls.status == LineSearchStatus::Failed) {
            res.stop_reason = StopReason::LineSearchFail;
            break;
        }

        FlatVector s = axpy(-1.0, res.x, ls.x);
        FlatVector y = axpy(-1.0, res.grad, ls.grad);
        history.push(std::move(s), std::move(y));
        res.x = std::move(ls.x);
        res.grad = std::move(ls.grad);
        res.value = ls.value;

        const IterationRecord rec{iter, res.value, norm_inf(res.grad), ls.step, ls.evaluations};
        res.trace.records.push_back(rec);
        if (callback) {
            callback(rec, res.x);
        }
        if (rec.grad_inf_norm <= tol) {
            res.stop_reason = StopReason::GradTol;
            break;
        }
    }
    return res;
}

} // namespace fnapprox
