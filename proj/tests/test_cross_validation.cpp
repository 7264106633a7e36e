#include <gtest/gtest.h>

#include <set>

#include "xray/cross_validation.hpp"
#include "xray/synthetic.hpp"

using namespace xray;

namespace {

// 12 originals per class, each followed by three fake variants sharing its source_id.
LabeledDataset augmented_toy() {
    LabeledDataset ds;
    ds.input_side = 16;
    SynthOptions o;
    o.side = 16;
    const auto base = synthetic_dataset(12, 12, 3, o);
    for (const auto& s : base.samples) {
        ds.samples.push_back(s);
        for (Lineage l : {Lineage::shift_x, Lineage::shift_y, Lineage::rotation}) {
            LabeledSample v = s;
            v.lineage = l;
            ds.samples.push_back(v);
        }
    }
    return ds;
}

NetworkSpec tiny_spec(std::size_t side) {
    NetworkSpec s;
    s.input_side = side;
    s.conv_blocks = {{4, 3, 2}, {8, 3, 2}};
    s.dense_widths = {16, 8, 8};
    return s;
}

}  // namespace

TEST(FoldSplits, LeakFreeKeepsSiblingsOutOfTraining) {
    const auto ds = augmented_toy();
    TrainConfig cfg;
    cfg.folds = 4;
    cfg.leakage = LeakageMode::leak_free;
    std::set<std::size_t> tested;
    for (const auto& split : make_fold_splits(ds, cfg)) {
        std::set<std::string> test_sources;
        for (auto i : split.test) {
            EXPECT_EQ(ds.samples[i].lineage, Lineage::original);
            test_sources.insert(ds.samples[i].source_id);
            tested.insert(i);
        }
        for (auto i : split.train) EXPECT_FALSE(test_sources.contains(ds.samples[i].source_id));
        EXPECT_EQ(split.train.size() + 4 * split.test.size(), ds.samples.size());
    }
    EXPECT_EQ(tested.size(), 24u);  // every original tested once
}

TEST(FoldSplits, PaperFaithfulFoldsCoverEverySample) {
    const auto ds = augmented_toy();
    TrainConfig cfg;
    cfg.folds = 4;
    cfg.leakage = LeakageMode::paper_faithful;
    std::vector<int> seen(ds.samples.size(), 0);
    bool siblings_straddle = false;
    for (const auto& split : make_fold_splits(ds, cfg)) {
        EXPECT_EQ(split.train.size() + split.test.size(), ds.samples.size());
        std::set<std::string> train_sources;
        for (auto i : split.train) train_sources.insert(ds.samples[i].source_id);
        for (auto i : split.test) {
            ++seen[i];
            siblings_straddle |= train_sources.contains(ds.samples[i].source_id);
        }
    }
    for (int s : seen) EXPECT_EQ(s, 1);
    EXPECT_TRUE(siblings_straddle);  // the leakage this mode reproduces
}

TEST(FoldSplits, StratifiedFoldsHoldBothClasses) {
    const auto ds = augmented_toy();
    TrainConfig cfg;
    cfg.folds = 6;
    for (const auto& split : make_fold_splits(ds, cfg)) {
        std::size_t pos = 0;
        for (auto i : split.test) pos += ds.samples[i].label == Label::positive;
        EXPECT_EQ(pos, 2u);
        EXPECT_EQ(split.test.size(), 4u);
    }
}

TEST(CrossValidate, PooledCountsAreTheSumOfFolds) {
    const auto ds = augmented_toy();
    TrainConfig cfg;
    cfg.folds = 3;
    cfg.epochs = 2;
    cfg.batch_size = 16;
    std::size_t callbacks = 0;
    const auto r = cross_validate(tiny_spec(16), cfg, ds, [&](std::size_t f, const FoldOutput&) {
        EXPECT_EQ(f, callbacks);
        ++callbacks;
    });
    EXPECT_EQ(callbacks, 3u);
    ConfusionMatrix sum;
    std::size_t tests = 0;
    for (const auto& f : r.folds) {
        sum += f.metrics.counts;
        tests += f.test_indices.size();
        EXPECT_EQ(f.history.size(), 2u);
    }
    EXPECT_EQ(r.pooled.counts, sum);
    EXPECT_EQ(r.pooled.counts.total(), tests);
    EXPECT_EQ(tests, 24u);
}

TEST(CrossValidate, Deterministic) {
    const auto ds = augmented_toy();
    TrainConfig cfg;
    cfg.folds = 2;
    cfg.epochs = 2;
    const auto a = cross_validate(tiny_spec(16), cfg, ds), b = cross_validate(tiny_spec(16), cfg, ds);
    for (std::size_t f = 0; f < 2; ++f) {
        EXPECT_EQ(a.folds[f].scores, b.folds[f].scores);
        EXPECT_EQ(a.folds[f].history, b.folds[f].history);
    }
}

TEST(CrossValidate, SeparableSyntheticSetIsLearned) {
    SynthOptions o;
    o.side = 32;
    const auto ds = synthetic_dataset(20, 20, 77, o);
    TrainConfig cfg;
    cfg.folds = 4;
    cfg.epochs = 50;
    cfg.batch_size = 8;
    cfg.learning_rate = 0.003;
    cfg.seed = 5;
    const auto r = cross_validate(tiny_spec(32), cfg, ds);
    EXPECT_GE(r.pooled.accuracy, 0.9);
}

TEST(FoldMetrics, SingleClassFoldFlagsAuc) {
    const std::vector<Label> y{Label::negative, Label::negative};
    const std::vector<double> s{0.1, 0.7};
    const auto m = fold_metrics(y, y, s, 0.3);
    EXPECT_TRUE(m.is_degenerate("auc"));
    EXPECT_EQ(m.auc, 0.0);
    EXPECT_EQ(m.loss, 0.3);
}
