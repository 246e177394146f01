#include "fnapprox/lbfgs.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fnapprox;

namespace {

Objective diagonal_quadratic(std::vector<double> lambda)
{
    return [lambda = std::move(lambda)](std::span<const double> x, std::span<double> g) {
        double f = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            f += lambda[i] * x[i] * x[i];
            g[i] = 2.0 * lambda[i] * x[i];
        }
        return f;
    };
}

double rosenbrock(std::span<const double> x, std::span<double> g)
{
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
}

void expect_monotone(const ConvergenceTrace& trace)
{
    double prev = trace.initial_loss;
    for (const auto& r : trace.records) {
        EXPECT_LE(r.loss, prev) << "iteration " << r.iteration;
        prev = r.loss;
    }
}

} // namespace

TEST(LbfgsConfig, Validation)
{
    LbfgsConfig cfg;
    EXPECT_NO_THROW(validate(cfg));
    cfg.wolfe_c1 = 0.95;
    EXPECT_THROW(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.wolfe_c2 = 1.0;
    EXPECT_THROW(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.history_size = 0;
    EXPECT_THROW(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.max_iterations = 0;
    EXPECT_THROW(validate(cfg), std::invalid_argument);
}

TEST(CurvatureHistory, RejectsNonPositiveCurvatureAndEvictsOldest)
{
    CurvatureHistory h(2);
    EXPECT_FALSE(h.push({1.0}, {-1.0}));
    EXPECT_FALSE(h.push({1.0}, {0.0}));
    EXPECT_TRUE(h.push({1.0}, {1.0}));
    EXPECT_TRUE(h.push({2.0}, {1.0}));
    EXPECT_TRUE(h.push({3.0}, {1.0}));
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h.pairs().front().s[0], 2.0);
    EXPECT_EQ(h.pairs().back().s[0], 3.0);
    EXPECT_DOUBLE_EQ(h.pairs().back().rho, 1.0 / 3.0);
}

TEST(TwoLoop, EmptyHistoryIsSteepestDescent)
{
    const CurvatureHistory h(5);
    const FlatVector g{1.5, -2.0, 0.25};
    EXPECT_EQ(two_loop_direction(h, g), (FlatVector{-1.5, 2.0, -0.25}));
}

TEST(TwoLoop, OnePairOnQuadraticGivesNewtonDirection)
{
    // f(w) = a w^2 / 2: one step from w0 to w1 gives s = w1 - w0, y = a s.
    const double a = 4.0, w0 = 3.0, w1 = 1.0;
    CurvatureHistory h(5);
    ASSERT_TRUE(h.push({w1 - w0}, {a * (w1 - w0)}));
    const FlatVector g{a * w1};
    const auto d = two_loop_direction(h, g);
    EXPECT_DOUBLE_EQ(d[0], -g[0] / a);
}

TEST(TwoLoop, DescentDirectionForPositiveCurvatureHistories)
{
    Prng p(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 7;
        CurvatureHistory h(1 + trial % 6);
        for (int k = 0; k < 8; ++k) {
            FlatVector s(n), y(n);
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = p.uniform(-1, 1);
                y[i] = p.uniform(0.1, 10.0) * s[i]; // y = D s with D > 0
            }
            h.push(s, y);
        }
        FlatVector g(n);
        for (auto& v : g) v = p.uniform(-1, 1);
        EXPECT_LT(dot(two_loop_direction(h, g), g), 0.0);
    }
}

TEST(TwoLoop, RejectsNonFiniteGradient)
{
    const CurvatureHistory h(3);
    EXPECT_THROW(two_loop_direction(h, FlatVector{1.0, NAN}), std::invalid_argument);
}

TEST(TwoLoop, ExactLineSearchTerminatesWithinDimension)
{
    // BFGS with exact line search on a strictly convex quadratic reaches the
    // minimizer in at most n steps.
    Prng p(19);
    for (std::size_t n = 1; n <= 5; ++n) {
        std::vector<double> lambda(n);
        for (auto& v : lambda) v = p.uniform(1.0, 10.0);
        FlatVector x(n);
        for (auto& v : x) v = p.uniform(-3, 3);
        auto grad = [&](const FlatVector& z) {
            FlatVector g(n);
            for (std::size_t i = 0; i < n; ++i) g[i] = lambda[i] * z[i];
            return g;
        };
        CurvatureHistory h(100);
        FlatVector g = grad(x);
        std::size_t iters = 0;
        while (norm_inf(g) > 1e-9 && iters < n) {
            const auto d = two_loop_direction(h, g);
            double dad = 0.0;
            for (std::size_t i = 0; i < n; ++i) dad += d[i] * lambda[i] * d[i];
            const double alpha = -dot(g, d) / dad;
            FlatVector xn = axpy(alpha, d, x);
            FlatVector gn = grad(xn);
            h.push(axpy(-1.0, x, xn), axpy(-1.0, g, gn));
            x = std::move(xn);
            g = std::move(gn);
            ++iters;
        }
        EXPECT_LE(norm_inf(g), 1e-9) << "n = " << n;
        EXPECT_LE(iters, n);
    }
}

TEST(StrongWolfe, QuadraticSliceSatisfiesBothConditions)
{
    // phi(alpha) = alpha^2 / 2 - alpha along d = 1 from x = 0.
    const Objective f = [](std::span<const double> x, std::span<double> g) -> double {
        g[0] = x[0] - 1.0;
        return 0.5 * x[0] * x[0] - x[0];
    };
    const FlatVector x{0.0}, d{1.0}, g0{-1.0};
    LineSearchOptions opt;
    for (double initial : {0.01, 0.5, 1.0, 3.0, 50.0}) {
        opt.initial_step = initial;
        const auto r = strong_wolfe_search(f, x, d, 0.0, g0, opt);
        ASSERT_EQ(r.status, LineSearchStatus::Converged) << initial;
        const double a = r.step;
        EXPECT_LE(0.5 * a * a - a, opt.c1 * a * -1.0);
        EXPECT_LE(std::fabs(a - 1.0), opt.c2 * 1.0);
        EXPECT_EQ(r.x[0], a);
    }
}

TEST(StrongWolfe, AcceptsUnitStepWithOneEvaluation)
{
    std::size_t calls = 0;
    const Objective f = [&](std::span<const double> x, std::span<double> g) {
        ++calls;
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            v += 0.5 * x[i] * x[i];
            g[i] = x[i];
        }
        return v;
    };
    const FlatVector x{1.0, 2.0}, g{1.0, 2.0}, d{-1.0, -2.0};
    const auto r = strong_wolfe_search(f, x, d, 2.5, g, LineSearchOptions{});
    EXPECT_EQ(r.status, LineSearchStatus::Converged);
    EXPECT_EQ(r.step, 1.0);
    EXPECT_EQ(r.evaluations, 1u);
    EXPECT_EQ(calls, 1u);
}

TEST(StrongWolfe, RejectsAscentDirection)
{
    const Objective f = [](std::span<const double> x, std::span<double> g) -> double {
        g[0] = x[0];
        return 0.5 * x[0] * x[0];
    };
    EXPECT_THROW(strong_wolfe_search(f, FlatVector{1.0}, FlatVector{1.0}, 0.5, FlatVector{1.0}, {}),
                 std::invalid_argument);
}

TEST(StrongWolfe, ShrinksPastNonFiniteRegion)
{
    const Objective f = [](std::span<const double> x, std::span<double> g) -> double {
        if (x[0] > 0.5) {
            g[0] = NAN;
            return NAN;
        }
        g[0] = 2.0 * (x[0] - 3.0);
        return (x[0] - 3.0) * (x[0] - 3.0);
    };
    const auto r = strong_wolfe_search(f, FlatVector{0.0}, FlatVector{1.0}, 9.0, FlatVector{-6.0}, {});
    EXPECT_NE(r.status, LineSearchStatus::Failed);
    EXPECT_LE(r.x[0], 0.5);
    EXPECT_LT(r.value, 9.0);
}

TEST(Minimize, DiagonalQuadraticConverges)
{
    Prng p(10);
    std::vector<double> lambda(10);
    for (auto& v : lambda) v = p.uniform(1.0, 10.0);
    FlatVector x0(10);
    for (auto& v : x0) v = p.uniform(-5, 5);
    const auto res = minimize(diagonal_quadratic(lambda), x0, LbfgsConfig{});
    EXPECT_EQ(res.stop_reason, StopReason::GradTol);
    EXPECT_LE(norm_inf(res.grad), 1e-10);
    EXPECT_LE(res.trace.records.size(), 2u * 10u + 5u);
    EXPECT_LE(norm_inf(res.x), 1e-10);
    expect_monotone(res.trace);
}

TEST(Minimize, Rosenbrock)
{
    LbfgsConfig cfg;
    cfg.max_iterations = 200;
    const auto res = minimize(rosenbrock, FlatVector{-1.2, 1.0}, cfg);
    EXPECT_LT(res.value, 1e-12);
    EXPECT_NEAR(res.x[0], 1.0, 1e-6);
    EXPECT_NEAR(res.x[1], 1.0, 1e-6);
    expect_monotone(res.trace);
}

TEST(Minimize, TraceHasOneRecordPerIteration)
{
    LbfgsConfig cfg;
    cfg.max_iterations = 7;
    std::size_t callbacks = 0;
    const auto res = minimize(rosenbrock, FlatVector{-1.2, 1.0}, cfg,
                              [&](const IterationRecord& r, std::span<const double>) {
                                  ++callbacks;
                                  EXPECT_EQ(r.iteration, callbacks);
                              });
    EXPECT_EQ(res.stop_reason, StopReason::MaxIter);
    EXPECT_EQ(res.trace.records.size(), 7u);
    EXPECT_EQ(callbacks, 7u);
    std::size_t evals = 1;
    for (const auto& r : res.trace.records) {
        EXPECT_GE(r.evaluations, 1u);
        EXPECT_GT(r.step, 0.0);
        evals += r.evaluations;
    }
    EXPECT_EQ(evals, res.total_evaluations);
}

TEST(Minimize, Deterministic)
{
    const auto a = minimize(rosenbrock, FlatVector{-1.2, 1.0}, LbfgsConfig{});
    const auto b = minimize(rosenbrock, FlatVector{-1.2, 1.0}, LbfgsConfig{});
    ASSERT_EQ(a.trace.records.size(), b.trace.records.size());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
        EXPECT_EQ(a.trace.records[i].loss, b.trace.records[i].loss);
        EXPECT_EQ(a.trace.records[i].step, b.trace.records[i].step);
    }
    EXPECT_EQ(a.x, b.x);
}

TEST(Minimize, RejectsNonFiniteStart)
{
    const Objective f = [](std::span<const double>, std::span<double> g) {
        g[0] = 0.0;
        return NAN;
    };
    EXPECT_THROW(minimize(f, FlatVector{1.0}, LbfgsConfig{}), std::domain_error);
}

TEST(Minimize, NonFiniteRegionEndsInLineSearchFailure)
{
    // Minimum at 3 lies inside a region where the objective is undefined.
    const Objective f = [](std::span<const double> x, std::span<double> g) -> double {
        if (x[0] > 1.0) {
            g[0] = INFINITY;
            return INFINITY;
        }
        g[0] = 2.0 * (x[0] - 3.0);
        return (x[0] - 3.0) * (x[0] - 3.0);
    };
    const auto res = minimize(f, FlatVector{0.0}, LbfgsConfig{});
    EXPECT_EQ(res.stop_reason, StopReason::LineSearchFail);
    EXPECT_LE(res.x[0], 1.0);
    EXPECT_TRUE(std::isfinite(res.value));
    expect_monotone(res.trace);
}

TEST(Minimize, RelativeToleranceStopsEarlier)
{
    LbfgsConfig cfg;
    cfg.grad_tolerance = 1e-3;
    cfg.tolerance_mode = ToleranceMode::RelativeToInitial;
    const auto res = minimize(diagonal_quadratic({1, 2, 3}), FlatVector{100, 100, 100}, cfg);
    EXPECT_EQ(res.stop_reason, StopReason::GradTol);
    EXPECT_LE(norm_inf(res.grad), 1e-3 * res.trace.initial_grad_inf_norm);
    EXPECT_GT(norm_inf(res.grad), 1e-10);
}

TEST(Minimize, AlreadyOptimalStopsImmediately)
{
    const auto res = minimize(diagonal_quadratic({1, 1}), FlatVector{0, 0}, LbfgsConfig{});
    EXPECT_EQ(res.stop_reason, StopReason::GradTol);
    EXPECT_TRUE(res.trace.records.empty());
}
