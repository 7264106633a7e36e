#include "xray/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace xray {

std::string to_string(LeakageMode mode) { return mode == LeakageMode::leak_free ? "leak-free" : "paper-faithful"; }

LeakageMode parse_leakage_mode(const std::string& text) {
    if (text == "leak-free") return LeakageMode::leak_free;
    if (text == "paper-faithful") return LeakageMode::paper_faithful;
    throw Error(ErrorCode::usage, "unknown mode '" + text + "' (expected paper-faithful or leak-free)");
}

void TrainConfig::validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::usage, m); };
    if (batch_size < 1) fail("batch size must be at least 1");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) fail("validation fraction must lie in [0,1)");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning rate must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        fail("adam betas must lie in [0,1)");
    }
    if (!(adam_epsilon > 0.0)) fail("adam epsilon must be positive");
    if (folds < 2) fail("at least 2 folds are required");
}

namespace {

// Independent random streams derived from one seed.
enum Stream : std::uint64_t { init_stream = 1, split_stream = 2, shuffle_stream = 3, dropout_stream = 4 };

Rng stream(std::uint64_t seed, Stream s) { return Rng(Rng::mix(seed) ^ Rng::mix(s)); }

std::vector<Tensor> preprocess(const std::vector<LabeledSample>& samples, bool apply_sobel,
                               std::size_t input_side) {
    std::vector<Tensor> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.image.width != input_side || s.image.height != input_side) {
            throw Error(ErrorCode::spec_mismatch, "sample " + s.source_id + " is " + std::to_string(s.image.width) +
                                                      "x" + std::to_string(s.image.height) +
                                                      " but the network expects input size " +
                                                      std::to_string(input_side));
        }
        out.push_back(to_tensor(s.image, apply_sobel));
    }
    return out;
}

std::vector<Label> labels_of(const std::vector<LabeledSample>& samples) {
    std::vector<Label> out;
    for (const auto& s : samples) out.push_back(s.label);
    return out;
}

template <typename V>
std::vector<V> pick(const std::vector<V>& all, const std::vector<std::size_t>& idx) {
    std::vector<V> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(all[i]);
    return out;
}

}  // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_validation(std::span<const Label> labels,
                                                                             double fraction, Rng& rng) {
    std::vector<std::size_t> fit, val;
    for (Label cls : {Label::positive, Label::negative}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        if (members.empty()) continue;
        rng.shuffle(members);
        auto n_val = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(members.size())));
        n_val = std::min(n_val, members.size() - 1);
        val.insert(val.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_val));
        fit.insert(fit.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val), members.end());
    }
    std::sort(fit.begin(), fit.end());
    std::sort(val.begin(), val.end());
    return {fit, val};
}

std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order, std::size_t batch_size) {
    if (batch_size < 1) throw Error(ErrorCode::usage, "batch size must be at least 1");
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(order.size(), start + batch_size);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

LossResult<float> head_loss(Head head, const Tensor& outputs, std::span<const Label> labels) {
    return head == Head::sigmoid ? bce_loss(outputs, one_hot<float>(labels))
                                 : hinge_loss(outputs, signed_targets<float>(labels));
}

Evaluation evaluate_inputs(const NetworkSpec& spec, const ParamSet& params, const std::vector<Tensor>& inputs,
                           std::span<const Label> labels, std::size_t batch_size) {
    expect_extent(labels.size(), inputs.size(), "label count");
    Evaluation ev;
    if (inputs.empty()) return ev;
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);
    double loss_sum = 0.0;
    for (const auto& batch : make_batches(order, batch_size)) {
        const Tensor outputs = predict(spec, params, make_batch(inputs, batch));
        const auto batch_labels = pick(std::vector<Label>(labels.begin(), labels.end()), batch);
        loss_sum += head_loss(spec.head, outputs, batch_labels).loss * static_cast<double>(batch.size());
        for (std::size_t b = 0; b < batch.size(); ++b) {
            ev.predicted.push_back(predicted_label(outputs, b));
            ev.scores.push_back(outputs.at(b, positive_unit));
        }
    }
    ev.loss = loss_sum / static_cast<double>(inputs.size());
    return ev;
}

FoldOutput train_fold(const NetworkSpec& base_spec, const TrainConfig& config,
                      const std::vector<LabeledSample>& train, const std::vector<LabeledSample>& test) {
    config.validate();
    NetworkSpec spec = base_spec;
    spec.head = config.head;
    spec.validate();

    const auto train_labels = labels_of(train);
    const auto pos = std::count(train_labels.begin(), train_labels.end(), Label::positive);
    if (pos == 0 || static_cast<std::size_t>(pos) == train_labels.size()) {
        throw Error(ErrorCode::single_class, "training data must contain both classes (" + std::to_string(pos) +
                                                 " positive of " + std::to_string(train_labels.size()) + ")");
    }

    const auto train_inputs = preprocess(train, config.sobel, spec.input_side);
    const auto test_inputs = preprocess(test, config.sobel, spec.input_side);

    Rng split_rng = stream(config.seed, split_stream);
    const auto [fit_idx, val_idx] = split_validation(train_labels, config.validation_fraction, split_rng);
    const auto fit_inputs = pick(train_inputs, fit_idx);
    const auto fit_labels = pick(train_labels, fit_idx);
    const auto val_inputs = pick(train_inputs, val_idx);
    const auto val_labels = pick(train_labels, val_idx);

    FoldOutput out;
    out.params = init_params<float>(spec, Rng::mix(config.seed ^ Rng::mix(init_stream)));
    auto adam_state = AdamState<float>::zeros_like(out.params);
    const AdamConfig adam = config.adam();
    Rng shuffle_rng = stream(config.seed, shuffle_stream);
    Rng dropout_rng = stream(config.seed, dropout_stream);

    std::vector<std::size_t> order(fit_inputs.size());
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (const auto& batch : make_batches(order, config.batch_size)) {
            const Tensor inputs = make_batch(fit_inputs, batch);
            const auto labels = pick(fit_labels, batch);
            auto fwd = forward(spec, out.params, inputs, true, dropout_rng);
            auto loss = head_loss(spec.head, fwd.outputs, labels);
            if (!std::isfinite(loss.loss) || !fwd.outputs.all_finite()) {
                std::ostringstream msg;
                msg << "training diverged at epoch " << epoch << ": loss " << loss.loss;
                throw Error(ErrorCode::diverged, msg.str());
            }
            // the loss gradient carries 1/B; backward averages per sample itself
            for (auto& g : loss.grad.data()) g *= static_cast<float>(batch.size());
            const auto grads = backward(spec, out.params, fwd.trace, loss.grad);
            adam_step(out.params, grads, adam_state, adam);

            loss_sum += loss.loss * static_cast<double>(batch.size());
            for (std::size_t b = 0; b < batch.size(); ++b) correct += predicted_label(fwd.outputs, b) == labels[b];
        }
        EpochRecord rec;
        rec.train_loss = loss_sum / static_cast<double>(fit_inputs.size());
        rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(fit_inputs.size());
        if (!val_inputs.empty()) {
            const auto val = evaluate_inputs(spec, out.params, val_inputs, val_labels);
            std::size_t val_correct = 0;
            for (std::size_t i = 0; i < val_labels.size(); ++i) val_correct += val.predicted[i] == val_labels[i];
            rec.val_loss = val.loss;
            rec.val_accuracy = static_cast<double>(val_correct) / static_cast<double>(val_labels.size());
        }
        if (!std::isfinite(rec.val_loss)) {
            throw Error(ErrorCode::diverged, "validation loss is not finite at epoch " + std::to_string(epoch));
        }
        out.history.push_back(rec);
    }

    out.test = evaluate_inputs(spec, out.params, test_inputs, labels_of(test));
    return out;
}

}  // namespace xray
