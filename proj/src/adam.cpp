#include "xray/adam.hpp"

#include <cmath>

namespace xray {

template <typename T>
AdamState<T> AdamState<T>::zeros_like(const BasicParamSet<T>& params) {
    AdamState s;
    for (const auto& t : params.tensors) {
        s.first_moment.tensors.emplace_back(t.shape());
        s.second_moment.tensors.emplace_back(t.shape());
    }
    return s;
}

template <typename T>
void adam_step(BasicParamSet<T>& params, const BasicParamSet<T>& grads, AdamState<T>& state,
               const AdamConfig& config) {
    const std::size_t n = params.tensors.size();
    expect_extent(grads.tensors.size(), n, "adam gradient tensor count");
    expect_extent(state.first_moment.tensors.size(), n, "adam first moment tensor count");
    expect_extent(state.second_moment.tensors.size(), n, "adam second moment tensor count");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& shape = params.tensors[i].shape();
        if (grads.tensors[i].shape() != shape || state.first_moment.tensors[i].shape() != shape ||
            state.second_moment.tensors[i].shape() != shape) {
            throw Error(ErrorCode::shape, "adam: tensor " + std::to_string(i) + " shape mismatch, parameter is " +
                                              shape_string(shape));
        }
    }

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = params.tensors[i];
        const auto& g = grads.tensors[i];
        auto& m = state.first_moment.tensors[i];
        auto& v = state.second_moment.tensors[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double gj = g[j];
            const double mj = config.beta1 * m[j] + (1.0 - config.beta1) * gj;
            const double vj = config.beta2 * v[j] + (1.0 - config.beta2) * gj * gj;
            m[j] = static_cast<T>(mj);
            v[j] = static_cast<T>(vj);
            const double m_hat = mj / c1;
            const double v_hat = vj / c2;
            p[j] = static_cast<T>(p[j] - config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon));
        }
    }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(ParamSet&, const ParamSet&, AdamState<float>&, const AdamConfig&);
template void adam_step(ParamSet64&, const ParamSet64&, AdamState<double>&, const AdamConfig&);

}  // namespace xray
