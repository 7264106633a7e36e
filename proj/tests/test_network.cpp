#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "xray/network.hpp"

using namespace xray;

namespace {

NetworkSpec tiny_spec(Head head = Head::sigmoid) {
    NetworkSpec s;
    s.input_side = 16;
    s.conv_blocks = {{4, 3, 2}, {6, 3, 2}};
    s.dense_widths = {8, 6, 4};
    s.head = head;
    return s;
}

Tensor random_batch(std::size_t b, std::size_t side, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const auto v = oracle::random_vector(b * side * side, gen, 0.0, 1.0);
    return Tensor64({b, 1, side, side}, v).cast<float>();
}

}  // namespace

TEST(NetworkSpec, DefaultShapesFollowValidConvAndFloorPool) {
    const NetworkSpec spec;
    EXPECT_EQ(spec.spatial_sides(), (std::vector<std::size_t>{64, 62, 31, 29, 14}));
    EXPECT_EQ(spec.flatten_length(), 256u * 14 * 14);
    EXPECT_EQ(spec.flatten_length(), 50176u);
}

TEST(NetworkSpec, ShapeRuleHoldsForRandomSpecs) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        NetworkSpec spec;
        spec.input_side = 8 + gen() % 60;
        spec.conv_blocks.clear();
        const std::size_t blocks = 1 + gen() % 3;
        for (std::size_t i = 0; i < blocks; ++i) spec.conv_blocks.push_back({1 + gen() % 4, 3, 2});
        std::size_t side = spec.input_side;
        bool valid = true;
        std::vector<std::size_t> expected{side};
        for (std::size_t i = 0; i < blocks && valid; ++i) {
            if (side < 3) { valid = false; break; }
            side -= 2;
            expected.push_back(side);
            side /= 2;
            expected.push_back(side);
            if (side < 1) valid = false;
        }
        if (!valid) {
            EXPECT_THROW(spec.validate(), Error) << "input " << spec.input_side << " blocks " << blocks;
            continue;
        }
        EXPECT_EQ(spec.spatial_sides(), expected);
        EXPECT_EQ(spec.flatten_length(), spec.conv_blocks.back().kernel_count * side * side);

        // the forward pass agrees with the rule
        const auto params = init_params<float>(spec, trial);
        Rng rng(1);
        const auto fwd = forward(spec, params, random_batch(1, spec.input_side, trial), true, rng);
        const auto& s = fwd.trace.samples[0];
        for (std::size_t i = 0; i < blocks; ++i) {
            EXPECT_EQ(s.conv_pre[i].dim(1), expected[2 * i + 1]);
            EXPECT_EQ(s.pools[i].output.dim(1), expected[2 * i + 2]);
        }
        EXPECT_EQ(s.dense_inputs[0].size(), spec.flatten_length());
    }
}

TEST(NetworkSpec, RejectsNonBinaryOutput) {
    NetworkSpec spec;
    spec.output_units = 3;
    EXPECT_THROW(spec.validate(), Error);
}

TEST(NetworkSpec, ParamOrderIsDeclarationOrder) {
    const auto names = tiny_spec().param_names();
    const std::vector<std::string> expected{"conv1.weight",  "conv1.bias",  "conv2.weight",  "conv2.bias",
                                            "dense1.weight", "dense1.bias", "dense2.weight", "dense2.bias",
                                            "dense3.weight", "dense3.bias", "output.weight", "output.bias"};
    EXPECT_EQ(names, expected);
}

TEST(InitParams, SameSeedSameBytes) {
    const NetworkSpec spec = tiny_spec();
    EXPECT_EQ(init_params<float>(spec, 7), init_params<float>(spec, 7));
    EXPECT_NE(init_params<float>(spec, 7), init_params<float>(spec, 8));
}

TEST(InitParams, BiasesAreZero) {
    const auto p = init_params<float>(tiny_spec(), 3);
    for (std::size_t t = 1; t < p.tensors.size(); t += 2)
        for (float v : p.tensors[t].data()) EXPECT_EQ(v, 0.0f);
}

TEST(InitParams, WeightsRespectGlorotBoundPerLayer) {
    const NetworkSpec spec;  // default widths
    const auto p = init_params<float>(spec, 11);
    // fan_in / fan_out per weight tensor, derived from the layer dimensions
    const std::vector<std::pair<std::size_t, std::size_t>> fans{
        {1 * 9, 128 * 9}, {128 * 9, 256 * 9}, {50176, 64}, {64, 32}, {32, 16}, {16, 2}};
    for (std::size_t l = 0; l < fans.size(); ++l) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fans[l].first + fans[l].second));
        EXPECT_DOUBLE_EQ(glorot_bound(fans[l].first, fans[l].second), bound);
        double max_abs = 0.0;
        for (float v : p.tensors[2 * l].data()) max_abs = std::max(max_abs, std::abs(static_cast<double>(v)));
        EXPECT_LE(max_abs, bound) << "layer " << l;
        EXPECT_GT(max_abs, 0.5 * bound) << "layer " << l;
    }
}

TEST(Forward, InferenceIsBitIdenticalOnRepeat) {
    const NetworkSpec spec = tiny_spec();
    const auto p = init_params<float>(spec, 1);
    const auto batch = random_batch(3, spec.input_side, 2);
    EXPECT_EQ(predict(spec, p, batch), predict(spec, p, batch));
    Rng a(5), b(99);
    EXPECT_EQ(forward(spec, p, batch, false, a).outputs, forward(spec, p, batch, false, b).outputs);
}

TEST(Forward, SigmoidHeadInUnitIntervalSvmHeadRaw) {
    const auto batch = random_batch(4, 16, 3);
    const auto sig = predict(tiny_spec(Head::sigmoid), init_params<float>(tiny_spec(), 4), batch);
    for (float v : sig.data()) {
        EXPECT_GT(v, 0.0f);
        EXPECT_LT(v, 1.0f);
    }
    auto p = init_params<float>(tiny_spec(Head::svm), 4);
    for (auto& v : p.tensors.back().data()) v = 5.0f;  // push raw margins past 1
    const auto svm = predict(tiny_spec(Head::svm), p, batch);
    EXPECT_GT(svm.at(0, 0), 1.0f);
}

TEST(Forward, RejectsWrongInputSide) {
    const NetworkSpec spec = tiny_spec();
    EXPECT_THROW(predict(spec, init_params<float>(spec, 1), random_batch(1, 20, 1)), Error);
}

TEST(Backward, ZeroOutputGradGivesZeroGradient) {
    const NetworkSpec spec = tiny_spec();
    const auto p = init_params<float>(spec, 1);
    Rng rng(2);
    const auto fwd = forward(spec, p, random_batch(2, spec.input_side, 3), true, rng);
    const auto g = backward(spec, p, fwd.trace, Tensor({2, 2}));
    for (const auto& t : g.tensors)
        for (float v : t.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Backward, DuplicatingRowsKeepsTheAverage) {
    const NetworkSpec spec = tiny_spec();
    const auto p = init_params<double>(spec, 3);
    const auto one = random_batch(2, spec.input_side, 4).cast<double>();
    Tensor64 two({4, 1, spec.input_side, spec.input_side});
    const std::size_t plane = spec.input_side * spec.input_side;
    for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t i = 0; i < plane; ++i) two[b * plane + i] = one[(b / 2) * plane + i];
    const Tensor64 g1({2, 2}, std::vector<double>{0.3, -0.7, 1.1, 0.2});
    const Tensor64 g2({4, 2}, std::vector<double>{0.3, -0.7, 0.3, -0.7, 1.1, 0.2, 1.1, 0.2});
    Rng rng(0);
    const auto f1 = forward(spec, p, one, false, rng);
    const auto f2 = forward(spec, p, two, false, rng);
    const auto a = backward(spec, p, f1.trace, g1), b = backward(spec, p, f2.trace, g2);
    for (std::size_t t = 0; t < a.tensors.size(); ++t)
        for (std::size_t i = 0; i < a.tensors[t].size(); ++i)
            EXPECT_TRUE(oracle::rel_close(a.tensors[t][i], b.tensors[t][i], 1e-12, 1e-15));
}

TEST(Backward, FloatAndDoubleAgree) {
    const NetworkSpec spec = tiny_spec();
    const auto p = init_params<double>(spec, 9);
    const auto batch = random_batch(2, spec.input_side, 10).cast<double>();
    const Tensor64 og({2, 2}, std::vector<double>{0.5, -0.25, -1.0, 0.75});
    Rng r1(3), r2(3);
    const auto fd = forward(spec, p, batch, true, r1);
    const auto pf = p.cast<float>();
    const auto ff = forward(spec, pf, batch.cast<float>(), true, r2);
    const auto gd = backward(spec, p, fd.trace, og);
    const auto gf = backward(spec, pf, ff.trace, og.cast<float>());
    for (std::size_t t = 0; t < gd.tensors.size(); ++t)
        for (std::size_t i = 0; i < gd.tensors[t].size(); ++i)
            EXPECT_TRUE(oracle::rel_close(gd.tensors[t][i], gf.tensors[t][i], 1e-3, 1e-6));
}
