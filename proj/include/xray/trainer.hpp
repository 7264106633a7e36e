#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "xray/adam.hpp"
#include "xray/dataset.hpp"
#include "xray/losses.hpp"
#include "xray/network.hpp"

namespace xray {

enum class LeakageMode { paper_faithful, leak_free };

std::string to_string(LeakageMode mode);
LeakageMode parse_leakage_mode(const std::string& text);

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-7;
    double validation_fraction = 0.2;
    Head head = Head::sigmoid;
    bool sobel = false;
    std::uint64_t seed = 0;
    std::size_t folds = 10;
    LeakageMode leakage = LeakageMode::leak_free;
    bool stratified = true;

    /// Throws ErrorCode::usage for out-of-range values.
    void validate() const;
    AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_epsilon}; }

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochRecord {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;

    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// One record per completed epoch.
using RunHistory = std::vector<EpochRecord>;

struct Evaluation {
    std::vector<Label> predicted;
    /// Positive-unit output: sigmoid probability or raw SVM margin.
    std::vector<double> scores;
    double loss = 0.0;
};

struct FoldOutput {
    ParamSet params;
    RunHistory history;
    Evaluation test;
};

/// Splits `labels` into (fit, validation) index sets: per class, a seeded
/// shuffle then round(fraction * count) validation members, never taking the
/// last member of a class.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_validation(std::span<const Label> labels,
                                                                             double fraction, Rng& rng);

/// Consecutive batches of `order`; the last one may be shorter.
std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order, std::size_t batch_size);

/// Loss of the configured head against `labels`.
LossResult<float> head_loss(Head head, const Tensor& outputs, std::span<const Label> labels);

/// Inference-mode predictions for preprocessed inputs.
Evaluation evaluate_inputs(const NetworkSpec& spec, const ParamSet& params, const std::vector<Tensor>& inputs,
                           std::span<const Label> labels, std::size_t batch_size = 32);

/// Trains one model from scratch on `train` and scores `test`.
///
/// A stratified `validation_fraction` of `train` is held out (seeded); inputs
/// get the configured Sobel arm and /255 normalization; each epoch visits the
/// remaining samples once in seeded shuffled order, in batches of
/// `batch_size` with the last partial batch kept, doing forward, backward and
/// an Adam step per batch. All randomness derives from `config.seed`.
/// Throws ErrorCode::single_class if `train` lacks a class and
/// ErrorCode::diverged on a non-finite loss.
FoldOutput train_fold(const NetworkSpec& spec, const TrainConfig& config, const std::vector<LabeledSample>& train,
                      const std::vector<LabeledSample>& test);

}  // namespace xray
