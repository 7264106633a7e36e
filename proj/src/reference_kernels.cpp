#include "xray/kernels.hpp"

namespace xray::reference {

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                              const BasicTensor<T>& bias) {
    const auto d = detail::check_conv(input, kernels, bias);
    const std::size_t s = d.kernel_side;
    BasicTensor<T> out({d.kernel_count, d.out_height, d.out_width});
    for (std::size_t k = 0; k < d.kernel_count; ++k) {
        for (std::size_t i = 0; i < d.out_height; ++i) {
            for (std::size_t j = 0; j < d.out_width; ++j) {
                T acc = bias[k];
                for (std::size_t c = 0; c < d.channels; ++c) {
                    for (std::size_t u = 0; u < s; ++u) {
                        for (std::size_t v = 0; v < s; ++v) {
                            acc += input.at(c, i + u, j + v) * kernels.at(k, c, u, v);
                        }
                    }
                }
                out.at(k, i, j) = acc;
            }
        }
    }
    return out;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                               const BasicTensor<T>& upstream, bool need_input_grad) {
    const auto d = detail::check_conv(input, kernels, BasicTensor<T>({kernels.dim(0)}));
    expect_extent(upstream.size(), d.kernel_count * d.out_height * d.out_width, "conv2d upstream size");
    const std::size_t s = d.kernel_side;
    Conv2dGrads<T> g{{}, BasicTensor<T>(kernels.shape()), BasicTensor<T>({d.kernel_count})};
    if (need_input_grad) g.input = BasicTensor<T>(input.shape());
    for (std::size_t k = 0; k < d.kernel_count; ++k) {
        for (std::size_t i = 0; i < d.out_height; ++i) {
            for (std::size_t j = 0; j < d.out_width; ++j) {
                const T up = upstream.at(k, i, j);
                g.bias[k] += up;
                for (std::size_t c = 0; c < d.channels; ++c) {
                    for (std::size_t u = 0; u < s; ++u) {
                        for (std::size_t v = 0; v < s; ++v) {
                            g.kernels.at(k, c, u, v) += up * input.at(c, i + u, j + v);
                            if (need_input_grad) g.input.at(c, i + u, j + v) += up * kernels.at(k, c, u, v);
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
    const std::size_t oh = height / pool_side, ow = width / pool_side;
    PoolResult<T> r{BasicTensor<T>({channels, oh, ow}), {}, input.shape()};
    r.argmax.reserve(channels * oh * ow);
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t i = 0; i < oh; ++i) {
            for (std::size_t j = 0; j < ow; ++j) {
                std::size_t best_u = 0, best_v = 0;
                for (std::size_t u = 0; u < pool_side; ++u) {
                    for (std::size_t v = 0; v < pool_side; ++v) {
                        if (input.at(c, i * pool_side + u, j * pool_side + v) >
                            input.at(c, i * pool_side + best_u, j * pool_side + best_v)) {
                            best_u = u;
                            best_v = v;
                        }
                    }
                }
                r.output.at(c, i, j) = input.at(c, i * pool_side + best_u, j * pool_side + best_v);
                r.argmax.push_back(
                    static_cast<std::uint32_t>((c * height + i * pool_side + best_u) * width + j * pool_side + best_v));
            }
        }
    }
    return r;
}

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& bias) {
    detail::check_dense(input, weights, bias);
    BasicTensor<T> out({weights.dim(0)});
    for (std::size_t m = 0; m < weights.dim(0); ++m) {
        T acc = bias[m];
        for (std::size_t n = 0; n < weights.dim(1); ++n) acc += weights.at(m, n) * input[n];
        out[m] = acc;
    }
    return out;
}

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& upstream) {
    detail::check_dense(input, weights, upstream);
    DenseGrads<T> g{BasicTensor<T>({weights.dim(1)}), BasicTensor<T>(weights.shape()), upstream};
    for (std::size_t m = 0; m < weights.dim(0); ++m) {
        for (std::size_t n = 0; n < weights.dim(1); ++n) {
            g.weights.at(m, n) = upstream[m] * input[n];
            g.input[n] += weights.at(m, n) * upstream[m];
        }
    }
    return g;
}

#define XRAY_INSTANTIATE(T)                                                                                \
    template BasicTensor<T> conv2d_forward(const BasicTensor<T>&, const BasicTensor<T>&,                    \
                                           const BasicTensor<T>&);                                          \
    template Conv2dGrads<T> conv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,                   \
                                            const BasicTensor<T>&, bool);                                   \
    template PoolResult<T> maxpool2d_forward(const BasicTensor<T>&, std::size_t);                           \
    template BasicTensor<T> dense_forward(const BasicTensor<T>&, const BasicTensor<T>&,                     \
                                          const BasicTensor<T>&);                                           \
    template DenseGrads<T> dense_backward(const BasicTensor<T>&, const BasicTensor<T>&,                     \
                                          const BasicTensor<T>&);

XRAY_INSTANTIATE(float)
XRAY_INSTANTIATE(double)
#undef XRAY_INSTANTIATE

}  // namespace xray::reference
