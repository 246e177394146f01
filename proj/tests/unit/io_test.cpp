#include "fnapprox/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

using namespace fnapprox;

TEST(FormatDouble, RoundTripsArbitraryBitPatterns)
{
    Prng p(123);
    for (int i = 0; i < 20000; ++i) {
        double v;
        const std::uint64_t bits = p.next_u64();
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) continue;
        ASSERT_EQ(parse_double(format_double(v)), v) << format_double(v);
    }
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(INFINITY), "inf");
    EXPECT_TRUE(std::isnan(parse_double("nan")));
    EXPECT_THROW(parse_double("1.0abc"), std::invalid_argument);
    EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(DatasetCsv, RoundTrip)
{
    Prng p(4);
    const auto ds = sample_train(FunctionId::F6, 50, p);
    std::stringstream ss;
    write_dataset_csv(ss, ds);
    EXPECT_EQ(ss.str().substr(0, 4), "x,y\n");
    const auto back = read_dataset_csv(ss, FunctionId::F6, DatasetKind::Train);
    EXPECT_EQ(back.xs, ds.xs);
    EXPECT_EQ(back.ys, ds.ys);

    std::stringstream bad("a,b\n1,2\n");
    EXPECT_THROW(read_dataset_csv(bad, FunctionId::F1, DatasetKind::Test), std::invalid_argument);
}

TEST(TraceCsv, HeaderAndRoundTrip)
{
    ConvergenceTrace t;
    t.records = {{1, 0.5, 0.25, 1.0, 1}, {2, 1.0 / 3.0, 1e-9, 0.015625, 4}};
    std::stringstream ss;
    write_trace_csv(ss, t);
    EXPECT_EQ(ss.str(), "iter,train_mse,grad_inf_norm,step_len,fevals\n"
                        "1,0.5,0.25,1,1\n"
                        "2,0.33333333333333331,1.0000000000000001e-09,0.015625,4\n");
    const auto back = read_trace_csv(ss);
    ASSERT_EQ(back.records.size(), 2u);
    EXPECT_EQ(back.records[1].loss, 1.0 / 3.0);
    EXPECT_EQ(back.records[1].evaluations, 4u);
}

TEST(Checkpoint, RoundTripIsBitExact)
{
    MlpArchitecture arch;
    arch.input_dim = 5;
    arch.hidden_widths = {6, 4};
    Prng p(8);
    const auto model = init_xavier(arch, p);
    Checkpoint ckpt{arch, 42, ExpansionConfig(2, ConstantScheme::Mixed),
                    FlatVector(model.params().begin(), model.params().end())};
    std::stringstream ss;
    write_checkpoint(ss, ckpt);
    const auto back = read_checkpoint(ss);
    EXPECT_EQ(back.architecture, arch);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.expansion, ckpt.expansion);
    EXPECT_EQ(back.params, ckpt.params);
}

TEST(Checkpoint, CustomConstantsAndValidation)
{
    MlpArchitecture arch;
    arch.input_dim = 3;
    arch.hidden_widths = {2};
    Checkpoint ckpt{arch, 1, ExpansionConfig::with_constants({0.1, -7.0}),
                    FlatVector(param_count(arch), 0.5)};
    std::stringstream ss;
    write_checkpoint(ss, ckpt);
    EXPECT_EQ(read_checkpoint(ss).expansion, ckpt.expansion);

    ckpt.params.pop_back();
    std::stringstream out;
    EXPECT_THROW(write_checkpoint(out, ckpt), std::invalid_argument);
    std::stringstream junk("{\"format\":\"other\"}");
    EXPECT_THROW(read_checkpoint(junk), std::invalid_argument);
    std::stringstream broken("{not json");
    EXPECT_THROW(read_checkpoint(broken), std::invalid_argument);
}

TEST(Fingerprint, Fnv1aVectors)
{
    EXPECT_EQ(fingerprint(""), "cbf29ce484222325");
    EXPECT_EQ(fingerprint("a"), "af63dc4c8601ec8c");
    EXPECT_NE(fingerprint("seed=1"), fingerprint("seed=2"));
}
