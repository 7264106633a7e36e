#include "xray/network.hpp"

#include <cmath>

namespace xray {

std::string to_string(Head head) { return head == Head::sigmoid ? "sigmoid" : "svm"; }

Head parse_head(const std::string& text) {
    if (text == "sigmoid") return Head::sigmoid;
    if (text == "svm") return Head::svm;
    throw Error(ErrorCode::usage, "unknown head '" + text + "' (expected sigmoid or svm)");
}

void NetworkSpec::validate() const {
    if (input_side < 1) throw Error(ErrorCode::shape, "input_side must be positive");
    if (conv_blocks.empty()) throw Error(ErrorCode::shape, "at least one convolution block is required");
    if (output_units != 2) {
        throw Error(ErrorCode::shape, "output_units must be 2 for the binary task, got " + std::to_string(output_units));
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
        throw Error(ErrorCode::shape, "dropout_rate must lie in [0,1)");
    }
    std::size_t side = input_side;
    for (std::size_t i = 0; i < conv_blocks.size(); ++i) {
        const auto& b = conv_blocks[i];
        const std::string name = "conv block " + std::to_string(i + 1);
        if (b.kernel_count < 1 || b.kernel_side < 1 || b.pool_side < 1) {
            throw Error(ErrorCode::shape, name + ": kernel count, kernel side and pool side must be positive");
        }
        side = conv_extent(side, b.kernel_side);
        if (side < 1) throw Error(ErrorCode::shape, name + ": convolution output would be empty");
        side = pool_extent(side, b.pool_side);
        if (side < 1) throw Error(ErrorCode::shape, name + ": pooling output would be empty");
    }
    for (auto w : dense_widths) {
        if (w < 1) throw Error(ErrorCode::shape, "dense widths must be positive");
    }
}

std::vector<std::size_t> NetworkSpec::spatial_sides() const {
    validate();
    std::vector<std::size_t> sides{input_side};
    std::size_t side = input_side;
    for (const auto& b : conv_blocks) {
        side = conv_extent(side, b.kernel_side);
        sides.push_back(side);
        side = pool_extent(side, b.pool_side);
        sides.push_back(side);
    }
    return sides;
}

std::size_t NetworkSpec::flatten_length() const {
    const std::size_t side = spatial_sides().back();
    return conv_blocks.back().kernel_count * side * side;
}

std::vector<Shape> NetworkSpec::param_shapes() const {
    validate();
    std::vector<Shape> shapes;
    std::size_t channels = 1;
    for (const auto& b : conv_blocks) {
        shapes.push_back({b.kernel_count, channels, b.kernel_side, b.kernel_side});
        shapes.push_back({b.kernel_count});
        channels = b.kernel_count;
    }
    std::size_t width = flatten_length();
    for (auto w : dense_widths) {
        shapes.push_back({w, width});
        shapes.push_back({w});
        width = w;
    }
    shapes.push_back({output_units, width});
    shapes.push_back({output_units});
    return shapes;
}

std::vector<std::string> NetworkSpec::param_names() const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < conv_blocks.size(); ++i) {
        names.push_back("conv" + std::to_string(i + 1) + ".weight");
        names.push_back("conv" + std::to_string(i + 1) + ".bias");
    }
    for (std::size_t i = 0; i < dense_widths.size(); ++i) {
        names.push_back("dense" + std::to_string(i + 1) + ".weight");
        names.push_back("dense" + std::to_string(i + 1) + ".bias");
    }
    names.push_back("output.weight");
    names.push_back("output.bias");
    return names;
}

template <typename T>
BasicParamSet<T> BasicParamSet<T>::zeros(const NetworkSpec& spec) {
    BasicParamSet p;
    for (auto& shape : spec.param_shapes()) p.tensors.emplace_back(shape);
    return p;
}

template <typename T>
std::size_t BasicParamSet<T>::element_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.size();
    return n;
}

template <typename T>
void BasicParamSet<T>::check(const NetworkSpec& spec) const {
    const auto shapes = spec.param_shapes();
    const auto names = spec.param_names();
    expect_extent(tensors.size(), shapes.size(), "parameter tensor count");
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (tensors[i].shape() != shapes[i]) {
            throw Error(ErrorCode::shape, names[i] + ": expected shape " + shape_string(shapes[i]) + ", got " +
                                              shape_string(tensors[i].shape()));
        }
    }
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

template <typename T>
BasicParamSet<T> init_params(const NetworkSpec& spec, std::uint64_t seed) {
    auto params = BasicParamSet<T>::zeros(spec);
    Rng rng(seed);
    for (std::size_t i = 0; i < params.tensors.size(); i += 2) {
        auto& w = params.tensors[i];
        std::size_t fan_in, fan_out;
        if (w.rank() == 4) {
            const std::size_t area = w.dim(2) * w.dim(3);
            fan_in = w.dim(1) * area;
            fan_out = w.dim(0) * area;
        } else {
            fan_in = w.dim(1);
            fan_out = w.dim(0);
        }
        const double bound = glorot_bound(fan_in, fan_out);
        for (auto& v : w.data()) v = static_cast<T>(rng.uniform(-bound, bound));
    }
    return params;
}

namespace {

template <typename T>
BasicTensor<T> run_sample(const NetworkSpec& spec, const BasicParamSet<T>& params, BasicTensor<T> x,
                          bool training, Rng& rng, SampleTrace<T>* trace) {
    const std::size_t n_conv = spec.conv_blocks.size();
    if (trace) trace->input = x;
    for (std::size_t i = 0; i < n_conv; ++i) {
        auto pre = kernels::conv2d_forward(x, params.tensors[2 * i], params.tensors[2 * i + 1]);
        auto pooled = kernels::maxpool2d_forward(kernels::relu(pre), spec.conv_blocks[i].pool_side);
        x = pooled.output;
        if (trace) {
            trace->conv_pre.push_back(std::move(pre));
            trace->pools.push_back(std::move(pooled));
        }
    }
    x = x.reshaped({x.size()});
    std::size_t layer = 2 * n_conv;
    for (std::size_t j = 0; j < spec.dense_widths.size(); ++j, layer += 2) {
        auto pre = kernels::dense_forward(x, params.tensors[layer], params.tensors[layer + 1]);
        auto dropped = kernels::dropout(kernels::relu(pre), spec.dropout_rate, training, rng);
        if (trace) {
            trace->dense_inputs.push_back(std::move(x));
            trace->dense_pre.push_back(std::move(pre));
            trace->dropout_masks.push_back(std::move(dropped.mask));
        }
        x = std::move(dropped.output);
    }
    auto logits = kernels::dense_forward(x, params.tensors[layer], params.tensors[layer + 1]);
    auto outputs = spec.head == Head::sigmoid ? kernels::sigmoid(logits) : logits;
    if (trace) {
        trace->dense_inputs.push_back(std::move(x));
        trace->logits = std::move(logits);
        trace->outputs = outputs;
    }
    return outputs;
}

template <typename T>
void check_batch(const NetworkSpec& spec, const BasicTensor<T>& batch) {
    expect_rank(batch.shape(), 4, "network input batch");
    expect_extent(batch.dim(1), 1, "network input channels");
    expect_extent(batch.dim(2), spec.input_side, "network input height");
    expect_extent(batch.dim(3), spec.input_side, "network input width");
}

template <typename T>
BasicTensor<T> sample_of(const BasicTensor<T>& batch, std::size_t b) {
    const std::size_t n = batch.size() / batch.dim(0);
    std::vector<T> data(batch.data().begin() + b * n, batch.data().begin() + (b + 1) * n);
    return BasicTensor<T>({1, batch.dim(2), batch.dim(3)}, std::move(data));
}

template <typename T>
void accumulate(BasicTensor<T>& sum, const BasicTensor<T>& g) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
}

}  // namespace

template <typename T>
ForwardResult<T> forward(const NetworkSpec& spec, const BasicParamSet<T>& params, const BasicTensor<T>& batch,
                         bool training, Rng& rng) {
    params.check(spec);
    check_batch(spec, batch);
    const std::size_t batch_size = batch.dim(0);
    ForwardResult<T> r{BasicTensor<T>({batch_size, spec.output_units}), {training, {}}};
    r.trace.samples.resize(batch_size);
    for (std::size_t b = 0; b < batch_size; ++b) {
        auto out = run_sample(spec, params, sample_of(batch, b), training, rng, &r.trace.samples[b]);
        for (std::size_t o = 0; o < spec.output_units; ++o) r.outputs.at(b, o) = out[o];
    }
    return r;
}

template <typename T>
BasicTensor<T> predict(const NetworkSpec& spec, const BasicParamSet<T>& params, const BasicTensor<T>& batch) {
    params.check(spec);
    check_batch(spec, batch);
    Rng unused(0);
    BasicTensor<T> outputs({batch.dim(0), spec.output_units});
    for (std::size_t b = 0; b < batch.dim(0); ++b) {
        auto out = run_sample(spec, params, sample_of(batch, b), false, unused, static_cast<SampleTrace<T>*>(nullptr));
        for (std::size_t o = 0; o < spec.output_units; ++o) outputs.at(b, o) = out[o];
    }
    return outputs;
}

template <typename T>
BasicParamSet<T> backward(const NetworkSpec& spec, const BasicParamSet<T>& params, const ForwardTrace<T>& trace,
                          const BasicTensor<T>& output_grad) {
    params.check(spec);
    const std::size_t batch_size = trace.samples.size();
    if (batch_size == 0) throw Error(ErrorCode::shape, "backward called with an empty trace");
    expect_rank(output_grad.shape(), 2, "output gradient");
    expect_extent(output_grad.dim(0), batch_size, "output gradient rows (trace batch size)");
    expect_extent(output_grad.dim(1), spec.output_units, "output gradient columns");

    const std::size_t n_conv = spec.conv_blocks.size();
    const std::size_t n_dense = spec.dense_widths.size();
    auto sum = BasicParamSet<T>::zeros(spec);

    for (std::size_t b = 0; b < batch_size; ++b) {
        const auto& s = trace.samples[b];
        if (s.conv_pre.size() != n_conv || s.pools.size() != n_conv || s.dense_pre.size() != n_dense ||
            s.dense_inputs.size() != n_dense + 1 || s.dropout_masks.size() != n_dense) {
            throw Error(ErrorCode::shape, "forward trace does not match the network spec");
        }
        BasicTensor<T> g({spec.output_units});
        for (std::size_t o = 0; o < spec.output_units; ++o) {
            g[o] = output_grad.at(b, o);
            if (spec.head == Head::sigmoid) g[o] *= s.outputs[o] * (T{1} - s.outputs[o]);
        }

        std::size_t layer = 2 * (n_conv + n_dense);
        {
            auto dg = kernels::dense_backward(s.dense_inputs[n_dense], params.tensors[layer], g);
            accumulate(sum.tensors[layer], dg.weights);
            accumulate(sum.tensors[layer + 1], dg.bias);
            g = std::move(dg.input);
        }
        for (std::size_t j = n_dense; j-- > 0;) {
            layer -= 2;
            g = kernels::dropout_backward(s.dropout_masks[j], g);
            g = kernels::relu_backward(s.dense_pre[j], g);
            auto dg = kernels::dense_backward(s.dense_inputs[j], params.tensors[layer], g);
            accumulate(sum.tensors[layer], dg.weights);
            accumulate(sum.tensors[layer + 1], dg.bias);
            g = std::move(dg.input);
        }
        g = g.reshaped(s.pools.back().output.shape());
        for (std::size_t i = n_conv; i-- > 0;) {
            layer -= 2;
            g = kernels::maxpool2d_backward(s.pools[i].argmax, s.pools[i].input_shape, g);
            g = kernels::relu_backward(s.conv_pre[i], g);
            const auto& input = i == 0 ? s.input : s.pools[i - 1].output;
            auto cg = kernels::conv2d_backward(input, params.tensors[layer], g, i > 0);
            accumulate(sum.tensors[layer], cg.kernels);
            accumulate(sum.tensors[layer + 1], cg.bias);
            g = std::move(cg.input);
        }
    }

    const T scale = T{1} / static_cast<T>(batch_size);
    for (auto& t : sum.tensors) {
        for (auto& v : t.data()) v *= scale;
    }
    return sum;
}

template struct BasicParamSet<float>;
template struct BasicParamSet<double>;

#define XRAY_INSTANTIATE(T)                                                                                  \
    template BasicParamSet<T> init_params<T>(const NetworkSpec&, std::uint64_t);                              \
    template ForwardResult<T> forward(const NetworkSpec&, const BasicParamSet<T>&, const BasicTensor<T>&, bool, \
                                      Rng&);                                                                  \
    template BasicTensor<T> predict(const NetworkSpec&, const BasicParamSet<T>&, const BasicTensor<T>&);      \
    template BasicParamSet<T> backward(const NetworkSpec&, const BasicParamSet<T>&, const ForwardTrace<T>&,   \
                                       const BasicTensor<T>&);

XRAY_INSTANTIATE(float)
XRAY_INSTANTIATE(double)
#undef XRAY_INSTANTIATE

}  // namespace xray
