#pragma once

#include <functional>
#include <vector>

#include "xray/dataset.hpp"
#include "xray/metrics.hpp"
#include "xray/trainer.hpp"

namespace xray {

struct FoldReport {
    std::size_t fold = 0;
    MetricsReport metrics;
    RunHistory history;
    std::size_t train_count = 0;
    /// Dataset indices of the test samples, with their predictions and scores.
    std::vector<std::size_t> test_indices;
    std::vector<Label> predicted;
    std::vector<double> scores;
};

struct CvResult {
    NetworkSpec spec;
    TrainConfig config;
    std::vector<FoldReport> folds;
    /// Confusion counts summed over folds; AUC over all pooled test scores;
    /// loss is the test-count-weighted mean of fold losses.
    MetricsReport pooled;
};

/// Index sets for one fold.
struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Train/test index sets per fold.
/// paper-faithful: folds over every sample, augmented variants included.
/// leak-free: folds over originals; a fold trains on every sample whose
/// source_id belongs to a training original and tests on originals only.
std::vector<FoldSplit> make_fold_splits(const LabeledDataset& dataset, const TrainConfig& config);

/// Per-fold metrics; AUC is flagged degenerate when the test fold has one class.
MetricsReport fold_metrics(std::span<const Label> predicted, std::span<const Label> actual,
                           std::span<const double> scores, double loss);

using FoldCallback = std::function<void(std::size_t fold, const FoldOutput&)>;

/// Runs train_fold for each split in order, with fold seed = config.seed + fold index.
/// `on_fold` sees each trained model (used for checkpointing).
CvResult cross_validate(const NetworkSpec& spec, const TrainConfig& config, const LabeledDataset& dataset,
                        const FoldCallback& on_fold = {});

}  // namespace xray
