#include "fnapprox/expansion.hpp"
#include "fnapprox/mlp.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace fnapprox;
using fnapprox::testing::central_difference;
using fnapprox::testing::close_relative;
using fnapprox::testing::reference_forward;

namespace {

MlpArchitecture arch_of(std::size_t d, std::vector<std::size_t> widths = {100, 100, 50, 50})
{
    MlpArchitecture a;
    a.input_dim = d;
    a.hidden_widths = std::move(widths);
    return a;
}

// Xavier weights plus non-zero biases so bias paths are exercised too.
MlpModel random_model(const MlpArchitecture& arch, std::uint64_t seed)
{
    Prng p(seed);
    const auto base = init_xavier(arch, p);
    FlatVector params(base.params().begin(), base.params().end());
    for (const auto& s : layer_slices(arch)) {
        for (std::size_t i = 0; i < s.fan_out; ++i) {
            params[s.bias_offset + i] = p.uniform(-0.5, 0.5);
        }
    }
    return MlpModel(arch, std::move(params));
}

Matrix random_batch(std::size_t n, std::size_t d, Prng& p)
{
    Matrix m(n, d);
    for (auto& v : m.data) {
        v = p.uniform(0.0, kTwoPi);
    }
    return m;
}

} // namespace

TEST(ParamCount, PublishedConfigurations)
{
    EXPECT_EQ(param_count(arch_of(1)), 17951u);
    EXPECT_EQ(param_count(arch_of(3)), 18151u);
    EXPECT_EQ(param_count(arch_of(5)), 18351u);
    EXPECT_EQ(param_count(arch_of(7)), 18551u);
    EXPECT_EQ(param_count(arch_of(1, {102, 102, 52, 52})), 18875u);
}

TEST(ParamCount, MatchesLayerSlices)
{
    const auto arch = arch_of(3, {4, 6});
    const auto slices = layer_slices(arch);
    ASSERT_EQ(slices.size(), 3u);
    EXPECT_EQ(slices[0].weight_offset, 0u);
    EXPECT_EQ(slices[0].bias_offset, 12u);
    EXPECT_EQ(slices[1].weight_offset, 16u);
    EXPECT_EQ(slices[2].fan_out, 1u);
    EXPECT_EQ(slices[2].bias_offset + 1, param_count(arch));
}

TEST(ParamCount, RejectsInvalidArchitecture)
{
    EXPECT_THROW(param_count(arch_of(1, {})), std::invalid_argument);
    EXPECT_THROW(param_count(arch_of(0)), std::invalid_argument);
    EXPECT_THROW(param_count(arch_of(1, {3, 0})), std::invalid_argument);
}

TEST(InitXavier, WeightsWithinGlorotBoundAndZeroBiases)
{
    const auto arch = arch_of(5);
    Prng p(1);
    const auto model = init_xavier(arch, p);
    for (const auto& s : layer_slices(arch)) {
        const double bound = std::sqrt(6.0 / static_cast<double>(s.fan_in + s.fan_out));
        double max_abs = 0.0;
        for (std::size_t i = 0; i < s.fan_in * s.fan_out; ++i) {
            max_abs = std::max(max_abs, std::fabs(model.params()[s.weight_offset + i]));
        }
        EXPECT_LE(max_abs, bound);
        EXPECT_GT(max_abs, 0.9 * bound) << "weights should fill the range";
        for (std::size_t i = 0; i < s.fan_out; ++i) {
            EXPECT_EQ(model.params()[s.bias_offset + i], 0.0);
        }
    }
    EXPECT_NEAR(std::sqrt(6.0 / 200.0), 0.173205, 1e-6);
}

TEST(InitXavier, Deterministic)
{
    Prng a(9), b(9);
    const auto arch = arch_of(1);
    const auto m1 = init_xavier(arch, a);
    const auto m2 = init_xavier(arch, b);
    EXPECT_TRUE(std::equal(m1.params().begin(), m1.params().end(), m2.params().begin()));
}

TEST(MlpModel, RejectsBadParameters)
{
    const auto arch = arch_of(1, {2});
    EXPECT_THROW(MlpModel(arch, FlatVector(3, 0.0)), std::invalid_argument);
    FlatVector p(param_count(arch), 0.0);
    p[0] = NAN;
    EXPECT_THROW(MlpModel(arch, p), std::invalid_argument);
}

TEST(Forward, ZeroParametersGiveZero)
{
    const auto model = MlpModel::zeros(arch_of(5));
    EXPECT_EQ(forward(model, expand(3.0, ExpansionConfig(2, ConstantScheme::AllPi))), 0.0);
}

TEST(Forward, SingleTanhNeuron)
{
    const auto model = MlpModel(arch_of(1, {1}), {1.0, 0.0, 1.0, 0.0});
    EXPECT_EQ(forward(model, FlatVector{0.0}), 0.0);
    EXPECT_DOUBLE_EQ(forward(model, FlatVector{0.7}), std::tanh(0.7));
}

TEST(Forward, MatchesLoopNestOracle)
{
    for (std::size_t d : {1u, 5u}) {
        const auto arch = arch_of(d);
        const auto model = random_model(arch, 100 + d);
        const auto input = expand(1.0, ExpansionConfig(static_cast<int>(d / 2), ConstantScheme::AllPi));
        EXPECT_NEAR(forward(model, input), reference_forward(arch, model.params(), input), 1e-12);
    }
}

TEST(Forward, BatchPredictMatchesSingle)
{
    const auto arch = arch_of(3, {7, 5});
    const auto model = random_model(arch, 4);
    Prng p(4);
    const auto batch = random_batch(9, 3, p);
    const auto out = predict(model, batch);
    for (std::size_t r = 0; r < batch.rows; ++r) {
        EXPECT_NEAR(out[r], forward(model, batch.row(r)), 1e-13);
    }
}

TEST(Forward, DimensionMismatchRejected)
{
    const auto model = MlpModel::zeros(arch_of(5));
    EXPECT_THROW(forward(model, FlatVector{1.0}), std::invalid_argument);
    EXPECT_THROW(loss_and_grad(model, Matrix(2, 1), FlatVector{0, 0}), std::invalid_argument);
    EXPECT_THROW(loss_and_grad(model, Matrix(2, 5), FlatVector{0}), std::invalid_argument);
}

TEST(LossAndGrad, PerfectFitHasZeroLossAndGradient)
{
    const auto arch = arch_of(1, {3});
    const auto model = random_model(arch, 2);
    Prng p(2);
    const auto x = random_batch(6, 1, p);
    const auto y = predict(model, x);
    const auto lg = loss_and_grad(model, x, y);
    EXPECT_EQ(lg.mse, 0.0);
    EXPECT_EQ(norm_inf(lg.grad), 0.0);
}

TEST(LossAndGrad, LinearToyByHand)
{
    // y_hat = w2 * (w1 * x + b1) + b2 with identity activation.
    MlpArchitecture arch = arch_of(1, {1});
    arch.activation = Activation::Identity;
    const MlpModel model(arch, {1.0, 0.0, 1.0, 0.0});
    Matrix x(1, 1);
    x(0, 0) = 2.0;
    const auto lg = loss_and_grad(model, x, FlatVector{6.0});
    EXPECT_DOUBLE_EQ(lg.mse, 16.0);
    EXPECT_DOUBLE_EQ(lg.grad[0], -16.0); // dL/dw1 = 2 (y_hat - y) w2 x
    EXPECT_DOUBLE_EQ(lg.grad[1], -8.0);  // dL/db1
    EXPECT_DOUBLE_EQ(lg.grad[2], -16.0); // dL/dw2 = 2 (y_hat - y) h
    EXPECT_DOUBLE_EQ(lg.grad[3], -8.0);  // dL/db2
}

TEST(LossAndGrad, MatchesCentralDifferencesOnSmallNetworks)
{
    Prng p(77);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + 2 * (trial % 4);
        const auto arch = arch_of(d, {6, 5, 4});
        const auto model = random_model(arch, 500 + trial);
        const auto x = random_batch(8, d, p);
        FlatVector y(8);
        for (auto& v : y) v = p.uniform(-1, 1);

        const auto lg = loss_and_grad(model, x, y);
        EXPECT_NEAR(lg.mse, mse_loss(arch, model.params(), x, y), 1e-15);
        FlatVector params(model.params().begin(), model.params().end());
        auto f = [&](std::span<const double> q) { return mse_loss(arch, q, x, y); };
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double fd = central_difference(f, params, i, 1e-5);
            ASSERT_TRUE(close_relative(lg.grad[i], fd, 1e-6, 1e-10))
                << "trial " << trial << " coord " << i << ": " << lg.grad[i] << " vs " << fd;
        }
    }
}

TEST(LossAndGrad, DefaultArchitectureSpotCheck)
{
    const auto arch = arch_of(5);
    const auto model = random_model(arch, 31);
    Prng p(31);
    const auto x = random_batch(8, 5, p);
    FlatVector y(8);
    for (auto& v : y) v = p.uniform(-1, 1);
    const auto lg = loss_and_grad(model, x, y);
    FlatVector params(model.params().begin(), model.params().end());
    auto f = [&](std::span<const double> q) { return mse_loss(arch, q, x, y); };
    for (int k = 0; k < 400; ++k) {
        const auto i = static_cast<std::size_t>(p.next_u64() % params.size());
        const double fd = central_difference(f, params, i, 1e-5);
        ASSERT_TRUE(close_relative(lg.grad[i], fd, 1e-6, 1e-10)) << "coord " << i;
    }
}

TEST(Permutation, IdentityLeavesModelUnchanged)
{
    const auto model = random_model(arch_of(3, {4, 3}), 8);
    const std::vector<std::size_t> id{0, 1, 2, 3};
    const auto same = permute_hidden_neurons(model, 0, id);
    EXPECT_TRUE(std::equal(same.params().begin(), same.params().end(), model.params().begin()));
}

TEST(Permutation, FullPermutationPreservesOutput)
{
    const auto arch = arch_of(5);
    const auto model = random_model(arch, 12);
    Prng p(12);
    for (std::size_t layer = 0; layer < arch.hidden_widths.size(); ++layer) {
        std::vector<std::size_t> perm(arch.hidden_widths[layer]);
        std::iota(perm.begin(), perm.end(), 0);
        std::reverse(perm.begin(), perm.end());
        std::swap(perm[0], perm[3]);
        const auto permuted = permute_hidden_neurons(model, layer, perm);
        EXPECT_FALSE(std::equal(permuted.params().begin(), permuted.params().end(),
                                model.params().begin()));
        for (int t = 0; t < 20; ++t) {
            const auto in = expand(p.uniform(0, kTwoPi), ExpansionConfig(2, ConstantScheme::AllPi));
            EXPECT_NEAR(forward(permuted, in), forward(model, in), 1e-12);
        }
    }
}

TEST(Permutation, RejectsNonBijection)
{
    const auto model = random_model(arch_of(1, {3, 2}), 1);
    EXPECT_THROW(permute_hidden_neurons(model, 0, std::vector<std::size_t>{0, 0, 1}),
                 std::invalid_argument);
    EXPECT_THROW(permute_hidden_neurons(model, 0, std::vector<std::size_t>{0, 1}),
                 std::invalid_argument);
    EXPECT_THROW(permute_hidden_neurons(model, 0, std::vector<std::size_t>{0, 1, 3}),
                 std::invalid_argument);
    EXPECT_THROW(permute_hidden_neurons(model, 2, std::vector<std::size_t>{0}),
                 std::invalid_argument);
}

TEST(PartialSwap, ConstantChannelSwapChangesOutput)
{
    const auto arch = arch_of(5);
    const auto model = random_model(arch, 21);
    const auto in = expand(1.3, ExpansionConfig(2, ConstantScheme::AllPi));
    const auto swapped = swap_first_layer_input_weights(model, 0, 1, 0);
    EXPECT_NE(model.weight(0, 0, 0), model.weight(0, 1, 0));
    EXPECT_EQ(swapped.weight(0, 0, 0), model.weight(0, 1, 0));
    EXPECT_GT(std::fabs(forward(swapped, in) - forward(model, in)), 1e-9);
}

TEST(PartialSwap, EqualWeightsMeanNoChange)
{
    const auto arch = arch_of(3, {4});
    auto base = random_model(arch, 5);
    FlatVector p(base.params().begin(), base.params().end());
    p[0 * 3 + 0] = p[1 * 3 + 0]; // neurons 0 and 1 share the constant-channel weight
    const MlpModel model(arch, p);
    const auto swapped = swap_first_layer_input_weights(model, 0, 1, 0);
    const auto in = expand(0.4, ExpansionConfig(1, ConstantScheme::AllPi));
    EXPECT_EQ(forward(swapped, in), forward(model, in));
}

TEST(Oracles, PerturbedLossAgreesWithReferenceForward)
{
    MlpArchitecture arch;
    arch.input_dim = 3;
    arch.hidden_widths = {5, 4, 3};
    Prng p(31);
    const auto model = init_xavier(arch, p);
    std::vector<double> params(model.params().begin(), model.params().end());
    std::vector<std::vector<double>> inputs{{0.1, -0.7, 2.0}, {1.5, 0.3, -0.2}};
    const std::vector<double> targets{0.4, -0.9};
    const fnapprox::testing::PerturbedLoss oracle(arch, params, inputs, targets);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto nudged = params;
        nudged[i] += 0.01;
        double expected = 0.0;
        for (std::size_t n = 0; n < inputs.size(); ++n) {
            const double r = fnapprox::testing::reference_forward(arch, nudged, inputs[n]) - targets[n];
            expected += r * r / 2.0;
        }
        EXPECT_NEAR(oracle.loss(i, 0.01), expected, 1e-14) << i;
    }
}
