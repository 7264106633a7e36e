#include "xray/kernels.hpp"

#include <cmath>

namespace xray {

namespace detail {

template <typename T>
ConvDims check_conv(const BasicTensor<T>& input, const BasicTensor<T>& kernels, const BasicTensor<T>& bias) {
    expect_rank(input.shape(), 3, "conv2d input");
    expect_rank(kernels.shape(), 4, "conv2d kernels");
    expect_rank(bias.shape(), 1, "conv2d bias");
    ConvDims d{};
    d.channels = input.dim(0);
    d.height = input.dim(1);
    d.width = input.dim(2);
    d.kernel_count = kernels.dim(0);
    d.kernel_side = kernels.dim(2);
    expect_extent(kernels.dim(1), d.channels, "conv2d kernel channel count");
    expect_extent(kernels.dim(3), d.kernel_side, "conv2d kernel width");
    expect_extent(bias.dim(0), d.kernel_count, "conv2d bias length");
    if (d.height < d.kernel_side || d.width < d.kernel_side) {
        throw Error(ErrorCode::shape, "conv2d input height/width " + std::to_string(d.height) + "x" +
                                          std::to_string(d.width) + " smaller than kernel side " +
                                          std::to_string(d.kernel_side));
    }
    d.out_height = conv_extent(d.height, d.kernel_side);
    d.out_width = conv_extent(d.width, d.kernel_side);
    return d;
}

template <typename T>
void check_dense(const BasicTensor<T>& input, const BasicTensor<T>& weights, const BasicTensor<T>& bias) {
    expect_rank(input.shape(), 1, "dense input");
    expect_rank(weights.shape(), 2, "dense weights");
    expect_rank(bias.shape(), 1, "dense bias");
    expect_extent(input.dim(0), weights.dim(1), "dense input length");
    expect_extent(bias.dim(0), weights.dim(0), "dense bias length");
}

template ConvDims check_conv(const Tensor&, const Tensor&, const Tensor&);
template ConvDims check_conv(const Tensor64&, const Tensor64&, const Tensor64&);
template void check_dense(const Tensor&, const Tensor&, const Tensor&);
template void check_dense(const Tensor64&, const Tensor64&, const Tensor64&);

}  // namespace detail

namespace kernels {

using detail::ConvDims;
using index_t = std::ptrdiff_t;

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                              const BasicTensor<T>& bias) {
    const ConvDims d = detail::check_conv(input, kernels, bias);
    BasicTensor<T> out({d.kernel_count, d.out_height, d.out_width});
    const std::size_t plane = d.out_height * d.out_width;
    const std::size_t s = d.kernel_side;
    const T* in = input.raw();
    const T* w = kernels.raw();
    T* o = out.raw();

#pragma omp parallel for schedule(static)
    for (index_t k = 0; k < static_cast<index_t>(d.kernel_count); ++k) {
        T* ok = o + k * plane;
        for (std::size_t p = 0; p < plane; ++p) ok[p] = bias[k];
        for (std::size_t c = 0; c < d.channels; ++c) {
            const T* ic = in + c * d.height * d.width;
            const T* wkc = w + (k * d.channels + c) * s * s;
            for (std::size_t u = 0; u < s; ++u) {
                for (std::size_t v = 0; v < s; ++v) {
                    const T wv = wkc[u * s + v];
                    for (std::size_t i = 0; i < d.out_height; ++i) {
                        const T* row = ic + (i + u) * d.width + v;
                        T* orow = ok + i * d.out_width;
                        for (std::size_t j = 0; j < d.out_width; ++j) orow[j] += row[j] * wv;
                    }
                }
            }
        }
    }
    return out;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                               const BasicTensor<T>& upstream, bool need_input_grad) {
    const ConvDims d = detail::check_conv(input, kernels, BasicTensor<T>({kernels.dim(0)}));
    expect_rank(upstream.shape(), 3, "conv2d upstream gradient");
    expect_extent(upstream.dim(0), d.kernel_count, "conv2d upstream channels");
    expect_extent(upstream.dim(1), d.out_height, "conv2d upstream height");
    expect_extent(upstream.dim(2), d.out_width, "conv2d upstream width");

    const std::size_t s = d.kernel_side;
    const std::size_t plane = d.out_height * d.out_width;
    const std::size_t in_plane = d.height * d.width;
    Conv2dGrads<T> g{{}, BasicTensor<T>(kernels.shape()), BasicTensor<T>({d.kernel_count})};
    const T* in = input.raw();
    const T* up = upstream.raw();
    T* gk = g.kernels.raw();
    T* gb = g.bias.raw();

#pragma omp parallel for schedule(static)
    for (index_t k = 0; k < static_cast<index_t>(d.kernel_count); ++k) {
        const T* uk = up + k * plane;
        T acc{0};
        for (std::size_t p = 0; p < plane; ++p) acc += uk[p];
        gb[k] = acc;
        for (std::size_t c = 0; c < d.channels; ++c) {
            const T* ic = in + c * in_plane;
            T* gkc = gk + (k * d.channels + c) * s * s;
            for (std::size_t u = 0; u < s; ++u) {
                for (std::size_t v = 0; v < s; ++v) {
                    T sum{0};
                    for (std::size_t i = 0; i < d.out_height; ++i) {
                        const T* row = ic + (i + u) * d.width + v;
                        const T* urow = uk + i * d.out_width;
                        for (std::size_t j = 0; j < d.out_width; ++j) sum += urow[j] * row[j];
                    }
                    gkc[u * s + v] = sum;
                }
            }
        }
    }

    if (need_input_grad) {
        g.input = BasicTensor<T>(input.shape());
        T* gi = g.input.raw();
        const T* w = kernels.raw();
#pragma omp parallel for schedule(static)
        for (index_t c = 0; c < static_cast<index_t>(d.channels); ++c) {
            T* gic = gi + c * in_plane;
            for (std::size_t k = 0; k < d.kernel_count; ++k) {
                const T* uk = up + k * plane;
                const T* wkc = w + (k * d.channels + c) * s * s;
                for (std::size_t u = 0; u < s; ++u) {
                    for (std::size_t v = 0; v < s; ++v) {
                        const T wv = wkc[u * s + v];
                        for (std::size_t i = 0; i < d.out_height; ++i) {
                            T* row = gic + (i + u) * d.width + v;
                            const T* urow = uk + i * d.out_width;
                            for (std::size_t j = 0; j < d.out_width; ++j) row[j] += urow[j] * wv;
                        }
                    }
                }
            }
        }
    }
    return g;
}

template <typename T>
PoolResult<T> maxpool2d_forward(const BasicTensor<T>& input, std::size_t pool_side) {
    expect_rank(input.shape(), 3, "maxpool input");
    const std::size_t channels = input.dim(0), height = input.dim(1), width = input.dim(2);
    if (pool_side < 1 || height < pool_side || width < pool_side) {
        throw Error(ErrorCode::shape, "maxpool input " + shape_string(input.shape()) +
                                          " smaller than pool side " + std::to_string(pool_side));
    }
    const std::size_t oh = pool_extent(height, pool_side), ow = pool_extent(width, pool_side);
    PoolResult<T> r{BasicTensor<T>({channels, oh, ow}), std::vector<std::uint32_t>(channels * oh * ow),
                    input.shape()};

#pragma omp parallel for schedule(static)
    for (index_t c = 0; c < static_cast<index_t>(channels); ++c) {
        for (std::size_t i = 0; i < oh; ++i) {
            for (std::size_t j = 0; j < ow; ++j) {
                std::size_t best = (c * height + i * pool_side) * width + j * pool_side;
                for (std::size_t u = 0; u < pool_side; ++u) {
                    for (std::size_t v = 0; v < pool_side; ++v) {
                        const std::size_t idx = (c * height + i * pool_side + u) * width + j * pool_side + v;
                        if (input[idx] > input[best]) best = idx;
                    }
                }
                const std::size_t o = (c * oh + i) * ow + j;
                r.output[o] = input[best];
                r.argmax[o] = static_cast<std::uint32_t>(best);
            }
        }
    }
    return r;
}

template <typename T>
BasicTensor<T> maxpool2d_backward(const std::vector<std::uint32_t>& argmax, const Shape& input_shape,
                                  const BasicTensor<T>& upstream) {
    expect_extent(upstream.size(), argmax.size(), "maxpool upstream length");
    BasicTensor<T> grad(input_shape);
    for (std::size_t o = 0; o < argmax.size(); ++o) {
        if (argmax[o] >= grad.size()) {
            throw Error(ErrorCode::shape, "maxpool argmax index " + std::to_string(argmax[o]) +
                                              " out of range for input " + shape_string(input_shape));
        }
        // windows are disjoint, so each input cell receives at most one value
        grad[argmax[o]] += upstream[o];
    }
    return grad;
}

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& bias) {
    detail::check_dense(input, weights, bias);
    const std::size_t m_count = weights.dim(0), n_count = weights.dim(1);
    BasicTensor<T> out({m_count});
    const T* x = input.raw();
#pragma omp parallel for schedule(static)
    for (index_t m = 0; m < static_cast<index_t>(m_count); ++m) {
        const T* row = weights.raw() + m * n_count;
        T acc = bias[m];
        for (std::size_t n = 0; n < n_count; ++n) acc += row[n] * x[n];
        out[m] = acc;
    }
    return out;
}

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& upstream) {
    detail::check_dense(input, weights, upstream);
    const std::size_t m_count = weights.dim(0), n_count = weights.dim(1);
    DenseGrads<T> g{BasicTensor<T>({n_count}), BasicTensor<T>(weights.shape()), upstream};
    const T* x = input.raw();
    const T* up = upstream.raw();
    T* gw = g.weights.raw();
#pragma omp parallel for schedule(static)
    for (index_t m = 0; m < static_cast<index_t>(m_count); ++m) {
        T* row = gw + m * n_count;
        const T um = up[m];
        for (std::size_t n = 0; n < n_count; ++n) row[n] = um * x[n];
    }

    constexpr std::size_t chunk = 1024;
    const std::size_t chunks = (n_count + chunk - 1) / chunk;
    T* gi = g.input.raw();
#pragma omp parallel for schedule(static)
    for (index_t b = 0; b < static_cast<index_t>(chunks); ++b) {
        const std::size_t lo = b * chunk;
        const std::size_t hi = std::min(n_count, lo + chunk);
        for (std::size_t m = 0; m < m_count; ++m) {
            const T* row = weights.raw() + m * n_count;
            const T um = up[m];
            for (std::size_t n = lo; n < hi; ++n) gi[n] += row[n] * um;
        }
    }
    return g;
}

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& input) {
    BasicTensor<T> out = input;
    for (auto& v : out.data()) v = v > T{0} ? v : T{0};
    return out;
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& input, const BasicTensor<T>& upstream) {
    expect_extent(upstream.size(), input.size(), "relu upstream length");
    BasicTensor<T> grad(input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) grad[i] = input[i] > T{0} ? upstream[i] : T{0};
    return grad;
}

template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double rate, bool training, Rng& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw Error(ErrorCode::usage, "dropout rate must lie in [0,1), got " + std::to_string(rate));
    }
    DropoutResult<T> r{input, BasicTensor<T>(input.shape(), T{1})};
    if (!training || rate == 0.0) return r;
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    for (std::size_t i = 0; i < input.size(); ++i) {
        const bool keep = rng.uniform() >= rate;
        r.mask[i] = keep ? scale : T{0};
        r.output[i] = input[i] * r.mask[i];
    }
    return r;
}

template <typename T>
BasicTensor<T> dropout_backward(const BasicTensor<T>& mask, const BasicTensor<T>& upstream) {
    expect_extent(upstream.size(), mask.size(), "dropout upstream length");
    BasicTensor<T> grad = upstream;
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= mask[i];
    return grad;
}

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& input) {
    BasicTensor<T> out = input;
    for (auto& v : out.data()) {
        // split by sign so exp never overflows
        if (v >= T{0}) {
            v = T{1} / (T{1} + std::exp(-v));
        } else {
            const T e = std::exp(v);
            v = e / (T{1} + e);
        }
    }
    return out;
}

#define XRAY_INSTANTIATE(T)                                                                                \
    template BasicTensor<T> conv2d_forward(const BasicTensor<T>&, const BasicTensor<T>&,                    \
                                           const BasicTensor<T>&);                                          \
    template Conv2dGrads<T> conv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,                   \
                                            const BasicTensor<T>&, bool);                                   \
    template PoolResult<T> maxpool2d_forward(const BasicTensor<T>&, std::size_t);                           \
    template BasicTensor<T> maxpool2d_backward(const std::vector<std::uint32_t>&, const Shape&,            \
                                               const BasicTensor<T>&);                                      \
    template BasicTensor<T> dense_forward(const BasicTensor<T>&, const BasicTensor<T>&,                     \
                                          const BasicTensor<T>&);                                           \
    template DenseGrads<T> dense_backward(const BasicTensor<T>&, const BasicTensor<T>&,                     \
                                          const BasicTensor<T>&);                                           \
    template BasicTensor<T> relu(const BasicTensor<T>&);                                                    \
    template BasicTensor<T> relu_backward(const BasicTensor<T>&, const BasicTensor<T>&);                   \
    template DropoutResult<T> dropout(const BasicTensor<T>&, double, bool, Rng&);                           \
    template BasicTensor<T> dropout_backward(const BasicTensor<T>&, const BasicTensor<T>&);                \
    template BasicTensor<T> sigmoid(const BasicTensor<T>&);

XRAY_INSTANTIATE(float)
XRAY_INSTANTIATE(double)
#undef XRAY_INSTANTIATE

}  // namespace kernels

}  // namespace xray
