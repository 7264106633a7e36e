#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "xray/metrics.hpp"

using namespace xray;

namespace {

constexpr Label P = Label::positive, N = Label::negative;

std::vector<int> ints(const std::vector<Label>& v) {
    std::vector<int> out;
    for (Label l : v) out.push_back(l == P);
    return out;
}

}  // namespace

TEST(Confusion, PerfectClassifier) {
    std::vector<Label> y{P, P, P, P, P, N, N, N, N, N};
    EXPECT_EQ(confusion(y, y), (ConfusionMatrix{5, 5, 0, 0}));
}

TEST(Confusion, ConstantNegativeClassifier) {
    std::vector<Label> actual{P, P, P, N, N, N, N, N, N, N};
    std::vector<Label> pred(10, N);
    const auto cm = confusion(pred, actual);
    EXPECT_EQ(cm.tp, 0u);
    EXPECT_EQ(cm.fn, 3u);
    EXPECT_EQ(cm.tn, 7u);
    EXPECT_EQ(cm.fp, 0u);
}

TEST(Confusion, FourPairs) {
    EXPECT_EQ(confusion(std::vector<Label>{P, P, N, N}, std::vector<Label>{P, N, P, N}), (ConfusionMatrix{1, 1, 1, 1}));
}

TEST(Confusion, RejectsLengthMismatchAndEmpty) {
    EXPECT_THROW(confusion(std::vector<Label>{P}, std::vector<Label>{P, N}), Error);
    EXPECT_THROW(confusion(std::vector<Label>{}, std::vector<Label>{}), Error);
}

TEST(Metrics, PerfectCountsGiveOnes) {
    const auto r = metrics({5, 5, 0, 0});
    for (double v : {r.accuracy, r.sensitivity, r.precision, r.f1, r.specificity}) EXPECT_EQ(v, 1.0);
    EXPECT_TRUE(r.degenerate.empty());
}

TEST(Metrics, NoNegativesFlagsSpecificity) {
    const auto r = metrics({8, 0, 0, 2});
    EXPECT_DOUBLE_EQ(r.sensitivity, 0.8);
    EXPECT_EQ(r.specificity, 0.0);
    EXPECT_TRUE(r.is_degenerate("specificity"));
    EXPECT_FALSE(r.is_degenerate("sensitivity"));
}

TEST(Metrics, HandFractions) {
    const auto r = metrics({77, 244, 12, 0});
    EXPECT_DOUBLE_EQ(r.accuracy, 321.0 / 333.0);
    EXPECT_DOUBLE_EQ(r.precision, 77.0 / 89.0);
    EXPECT_DOUBLE_EQ(r.f1, 154.0 / 166.0);
    EXPECT_NEAR(r.accuracy, 0.9640, 5e-5);
    EXPECT_NEAR(r.precision, 0.8652, 5e-5);
    EXPECT_NEAR(r.f1, 0.9277, 5e-5);
    EXPECT_EQ(r.sensitivity, 1.0);
}

TEST(Metrics, MatchExactRecountOnRandomPairs) {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + gen() % 60;
        std::vector<Label> pred(n), actual(n);
        const double bias = (gen() % 101) / 100.0;
        std::bernoulli_distribution coin(bias);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = coin(gen) ? P : N;
            actual[i] = gen() % 2 ? P : N;
        }
        const auto r = metrics(confusion(pred, actual));
        const auto e = oracle::exact_metrics(oracle::recount(ints(pred), ints(actual)));
        const std::pair<double, oracle::Ratio> pairs[] = {{r.accuracy, e.accuracy},
                                                          {r.sensitivity, e.sensitivity},
                                                          {r.precision, e.precision},
                                                          {r.f1, e.f1},
                                                          {r.specificity, e.specificity}};
        const char* names[] = {"accuracy", "sensitivity", "precision", "f1", "specificity"};
        for (int m = 0; m < 5; ++m) {
            EXPECT_NEAR(pairs[m].first, pairs[m].second.value(), 1e-12);
            EXPECT_EQ(r.is_degenerate(names[m]), !pairs[m].second.defined) << names[m];
        }
    }
}

TEST(Metrics, PermutationInvariant) {
    std::mt19937_64 gen(7);
    std::vector<Label> pred(40), actual(40);
    std::vector<double> scores(40);
    for (std::size_t i = 0; i < 40; ++i) {
        pred[i] = gen() % 2 ? P : N;
        actual[i] = gen() % 2 ? P : N;
        scores[i] = (gen() % 10) / 10.0;
    }
    std::vector<std::size_t> perm(40);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<Label> p2, a2;
    std::vector<double> s2;
    for (auto i : perm) {
        p2.push_back(pred[i]);
        a2.push_back(actual[i]);
        s2.push_back(scores[i]);
    }
    EXPECT_EQ(confusion(pred, actual), confusion(p2, a2));
    EXPECT_EQ(roc_auc(scores, actual), roc_auc(s2, a2));
}

TEST(RocAuc, PerfectSeparationIsOne) {
    EXPECT_EQ(roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<Label>{P, P, N, N}), 1.0);
}

TEST(RocAuc, AllTiesIsHalf) {
    EXPECT_EQ(roc_auc(std::vector<double>(6, 0.3), std::vector<Label>{P, N, P, N, N, P}), 0.5);
}

TEST(RocAuc, ThreeOfFourPairs) {
    EXPECT_EQ(roc_auc(std::vector<double>{0.9, 0.4, 0.6, 0.1}, std::vector<Label>{P, P, N, N}), 0.75);
}

TEST(RocAuc, MatchesPairwiseOracleWithTies) {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + gen() % 150;
        const int levels = 1 + static_cast<int>(gen() % 12);  // few levels force ties
        std::vector<double> scores(n);
        std::vector<Label> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(gen() % levels) / levels;
            labels[i] = gen() % 3 == 0 ? P : N;
        }
        labels[0] = P;
        labels[1] = N;
        EXPECT_NEAR(roc_auc(scores, labels), oracle::pairwise_auc(scores, ints(labels)), 1e-12);
    }
}

TEST(RocAuc, InvariantUnderMonotoneTransform) {
    std::mt19937_64 gen(5);
    std::vector<double> s(50);
    std::vector<Label> y(50);
    for (std::size_t i = 0; i < 50; ++i) {
        s[i] = (gen() % 20) / 7.0 - 1.0;
        y[i] = gen() % 2 ? P : N;
    }
    std::vector<double> t;
    for (double v : s) t.push_back(std::exp(3 * v) + 2);
    EXPECT_EQ(roc_auc(s, y), roc_auc(t, y));
}

TEST(RocAuc, SingleClassIsAnError) {
    EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<Label>{P, P}), Error);
}

TEST(StratifiedKfold, TenSamplesTenFoldsAreSingletons) {
    const std::vector<Label> y(10, N);
    const auto folds = stratified_kfold(y, 10, 1);
    ASSERT_EQ(folds.size(), 10u);
    for (const auto& f : folds) EXPECT_EQ(f.size(), 1u);
    // a mixed set of ten leaves each class short of ten members
    EXPECT_THROW(stratified_kfold(std::vector<Label>{P, P, P, P, N, N, N, N, N, N}, 10, 1), Error);
}

TEST(StratifiedKfold, ImbalancedCountsSpreadEvenly) {
    std::vector<Label> y(77, P);
    y.insert(y.end(), 256, N);
    const auto folds = stratified_kfold(y, 10, 2024);
    for (const auto& f : folds) {
        const auto pos = std::count_if(f.begin(), f.end(), [&](auto i) { return y[i] == P; });
        const auto neg = static_cast<long>(f.size()) - pos;
        EXPECT_TRUE(pos == 7 || pos == 8) << pos;
        EXPECT_TRUE(neg == 25 || neg == 26) << neg;
    }
}

TEST(StratifiedKfold, PartitionAndDeterminismOnRandomLabels) {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + gen() % 9;
        std::vector<Label> y;
        for (std::size_t i = 0; i < k; ++i) y.push_back(P);
        for (std::size_t i = 0; i < k; ++i) y.push_back(N);
        const std::size_t extra = gen() % 100;
        for (std::size_t i = 0; i < extra; ++i) y.push_back(gen() % 2 ? P : N);
        std::shuffle(y.begin(), y.end(), gen);
        const auto folds = stratified_kfold(y, k, trial);
        EXPECT_EQ(folds, stratified_kfold(y, k, trial));
        std::vector<int> seen(y.size(), 0);
        for (const auto& f : folds)
            for (auto i : f) ++seen[i];
        for (int s : seen) EXPECT_EQ(s, 1);
    }
}

TEST(StratifiedKfold, TooFewMembersIsAnError) {
    std::vector<Label> y{P, P, N, N, N, N};
    try {
        stratified_kfold(y, 3, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::too_few_samples);
    }
    EXPECT_THROW(stratified_kfold(y, 1, 1), Error);
}

TEST(PlainKfold, PartitionsAllIndices) {
    const auto folds = plain_kfold(23, 4, 3);
    std::vector<int> seen(23, 0);
    for (const auto& f : folds) {
        EXPECT_GE(f.size(), 5u);
        for (auto i : f) ++seen[i];
    }
    for (int s : seen) EXPECT_EQ(s, 1);
}
