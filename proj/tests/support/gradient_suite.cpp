#include "gradient_suite.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "oracles.hpp"
#include "xray/kernels.hpp"
#include "xray/losses.hpp"
#include "xray/network.hpp"

namespace gradcheck {

using xray::Shape;
using xray::Tensor64;

namespace {

Tensor64 random_tensor(Shape shape, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
    const std::size_t n = xray::shape_size(shape);
    return Tensor64(std::move(shape), oracle::random_vector(n, gen, lo, hi));
}

double dot(const Tensor64& a, const Tensor64& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void record(Result& r, double analytic, double numeric) {
    ++r.checked;
    if (!oracle::rel_close(analytic, numeric, r.tolerance, absolute_floor)) ++r.failed;
    if (std::max(std::abs(analytic), std::abs(numeric)) > 1e-6) {
        r.worst = std::max(r.worst, oracle::rel_error(analytic, numeric));
    }
}

/// Compares `analytic` with central differences of `objective` over every element of `x`.
/// `kinked` (optional) reports whether perturbing element i crosses a non-smooth point.
void sweep(Result& r, Tensor64& x, const Tensor64& analytic, const std::function<double()>& objective,
           const std::function<bool(std::size_t)>& kinked = {}) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (kinked && kinked(i)) {
            ++r.skipped;
            continue;
        }
        record(r, analytic[i], oracle::central_difference(objective, x[i], step));
    }
}

}  // namespace

Result conv2d(std::uint64_t seed) {
    Result r{"conv2d_backward", layer_tolerance};
    std::mt19937_64 gen(seed);
    Tensor64 x = random_tensor({2, 6, 7}, gen);
    Tensor64 w = random_tensor({3, 2, 3, 3}, gen);
    Tensor64 b = random_tensor({3}, gen);
    const Tensor64 up = random_tensor({3, 4, 5}, gen);
    auto objective = [&] { return dot(up, xray::kernels::conv2d_forward(x, w, b)); };
    const auto g = xray::kernels::conv2d_backward(x, w, up);
    sweep(r, x, g.input, objective);
    sweep(r, w, g.kernels, objective);
    sweep(r, b, g.bias, objective);
    return r;
}

Result maxpool2d(std::uint64_t seed) {
    Result r{"maxpool2d_backward", layer_tolerance};
    std::mt19937_64 gen(seed);
    Tensor64 x = random_tensor({2, 7, 6}, gen);
    const Tensor64 up = random_tensor({2, 3, 3}, gen);
    const auto base = xray::kernels::maxpool2d_forward(x);
    auto objective = [&] { return dot(up, xray::kernels::maxpool2d_forward(x).output); };
    auto kinked = [&](std::size_t i) {
        const double orig = x[i];
        bool changed = false;
        for (double d : {step, -step}) {
            x[i] = orig + d;
            changed |= xray::kernels::maxpool2d_forward(x).argmax != base.argmax;
        }
        x[i] = orig;
        return changed;
    };
    sweep(r, x, xray::kernels::maxpool2d_backward(base.argmax, base.input_shape, up), objective, kinked);
    return r;
}

Result dense(std::uint64_t seed) {
    Result r{"dense_backward", layer_tolerance};
    std::mt19937_64 gen(seed);
    Tensor64 x = random_tensor({9}, gen);
    Tensor64 w = random_tensor({5, 9}, gen);
    Tensor64 b = random_tensor({5}, gen);
    const Tensor64 up = random_tensor({5}, gen);
    auto objective = [&] { return dot(up, xray::kernels::dense_forward(x, w, b)); };
    const auto g = xray::kernels::dense_backward(x, w, up);
    sweep(r, x, g.input, objective);
    sweep(r, w, g.weights, objective);
    sweep(r, b, g.bias, objective);
    return r;
}

Result relu(std::uint64_t seed) {
    Result r{"relu_backward", layer_tolerance};
    std::mt19937_64 gen(seed);
    Tensor64 x = random_tensor({64}, gen);
    const Tensor64 up = random_tensor({64}, gen);
    auto objective = [&] { return dot(up, xray::kernels::relu(x)); };
    sweep(r, x, xray::kernels::relu_backward(x, up), objective,
          [&](std::size_t i) { return std::abs(x[i]) <= step; });
    return r;
}

Result dropout(std::uint64_t seed) {
    Result r{"dropout_backward", layer_tolerance};
    std::mt19937_64 gen(seed);
    Tensor64 x = random_tensor({40}, gen);
    const Tensor64 up = random_tensor({40}, gen);
    auto run = [&] {
        xray::Rng rng(seed);
        return xray::kernels::dropout(x, 0.3, true, rng);
    };
    auto objective = [&] { return dot(up, run().output); };
    sweep(r, x, xray::kernels::dropout_backward(run().mask, up), objective);
    return r;
}

Result bce(std::uint64_t seed) {
    Result r{"bce_loss", loss_tolerance};
    std::mt19937_64 gen(seed);
    Tensor64 p = random_tensor({4, 2}, gen, 0.05, 0.95);
    const std::vector<xray::Label> labels{xray::Label::positive, xray::Label::negative, xray::Label::negative,
                                          xray::Label::positive};
    const Tensor64 t = xray::one_hot<double>(labels);
    auto objective = [&] { return xray::bce_loss(p, t).loss; };
    sweep(r, p, xray::bce_loss(p, t).grad, objective);
    return r;
}

Result hinge(std::uint64_t seed) {
    Result r{"hinge_loss", loss_tolerance};
    std::mt19937_64 gen(seed);
    Tensor64 s = random_tensor({6, 2}, gen, -2.0, 2.0);
    const std::vector<xray::Label> labels{xray::Label::positive, xray::Label::negative, xray::Label::negative,
                                          xray::Label::positive, xray::Label::positive, xray::Label::negative};
    const Tensor64 t = xray::signed_targets<double>(labels);
    auto objective = [&] { return xray::hinge_loss(s, t).loss; };
    sweep(r, s, xray::hinge_loss(s, t).grad, objective,
          [&](std::size_t i) { return std::abs(1.0 - t[i] * s[i]) <= step; });
    return r;
}

namespace {

/// Signs of every pre-activation and every pooling winner; equal signatures
/// mean the network is locally linear between the two parameter points.
std::vector<std::int64_t> signature(const xray::ForwardTrace<double>& trace) {
    std::vector<std::int64_t> sig;
    for (const auto& s : trace.samples) {
        for (const auto& t : s.conv_pre)
            for (double v : t.data()) sig.push_back(v > 0.0);
        for (const auto& p : s.pools)
            for (auto a : p.argmax) sig.push_back(a);
        for (const auto& t : s.dense_pre)
            for (double v : t.data()) sig.push_back(v > 0.0);
    }
    return sig;
}

struct NetPoint {
    double loss = 0.0;
    std::vector<std::int64_t> signature;
    xray::ForwardTrace<double> trace;
    Tensor64 output_grad;
};

NetPoint evaluate(const xray::NetworkSpec& spec, const xray::ParamSet64& params, const Tensor64& batch,
                  std::span<const xray::Label> labels) {
    xray::Rng rng(2024);  // same dropout masks at every parameter point
    auto fwd = xray::forward(spec, params, batch, true, rng);
    NetPoint p;
    const double B = static_cast<double>(labels.size());
    if (spec.head == xray::Head::sigmoid) {
        auto l = xray::bce_loss(fwd.outputs, xray::one_hot<double>(labels));
        p.loss = l.loss;
        p.output_grad = l.grad;
    } else {
        const Tensor64 t = xray::signed_targets<double>(labels);
        auto l = xray::hinge_loss(fwd.outputs, t);
        p.loss = l.loss;
        p.output_grad = l.grad;
        for (std::size_t i = 0; i < t.size(); ++i) p.signature.push_back(1.0 - t[i] * fwd.outputs[i] > 0.0);
    }
    // backward averages over the batch, so it wants per-sample derivatives
    for (auto& g : p.output_grad.data()) g *= B;
    auto sig = signature(fwd.trace);
    p.signature.insert(p.signature.end(), sig.begin(), sig.end());
    p.trace = std::move(fwd.trace);
    return p;
}

Result network_check(std::string name, const xray::NetworkSpec& spec, std::uint64_t seed, std::size_t per_tensor) {
    Result r{std::move(name), network_tolerance};
    std::mt19937_64 gen(seed);
    xray::ParamSet64 params = xray::init_params<double>(spec, seed);
    // nonzero biases so that every bias gradient path is exercised
    for (std::size_t t = 1; t < params.tensors.size(); t += 2)
        for (auto& v : params.tensors[t].data()) v = oracle::random_vector(1, gen, -0.1, 0.1)[0];
    const Tensor64 batch = random_tensor({2, 1, spec.input_side, spec.input_side}, gen, 0.0, 1.0);
    const std::vector<xray::Label> labels{xray::Label::positive, xray::Label::negative};

    const NetPoint base = evaluate(spec, params, batch, labels);
    const xray::ParamSet64 grads = xray::backward(spec, params, base.trace, base.output_grad);

    for (std::size_t t = 0; t < params.tensors.size(); ++t) {
        auto& tensor = params.tensors[t];
        std::vector<std::size_t> picks(tensor.size());
        std::iota(picks.begin(), picks.end(), std::size_t{0});
        if (per_tensor < picks.size()) {
            std::shuffle(picks.begin(), picks.end(), gen);
            picks.resize(per_tensor);
            std::sort(picks.begin(), picks.end());
        }
        for (std::size_t i : picks) {
            const double orig = tensor[i];
            tensor[i] = orig + step;
            const NetPoint plus = evaluate(spec, params, batch, labels);
            tensor[i] = orig - step;
            const NetPoint minus = evaluate(spec, params, batch, labels);
            tensor[i] = orig;
            if (plus.signature != base.signature || minus.signature != base.signature) {
                ++r.skipped;
                continue;
            }
            record(r, grads.tensors[t][i], (plus.loss - minus.loss) / (2 * step));
        }
    }
    return r;
}

xray::NetworkSpec narrow_spec(xray::Head head) {
    xray::NetworkSpec spec;
    spec.input_side = 12;
    spec.conv_blocks = {{4, 3, 2}, {6, 3, 2}};
    spec.dense_widths = {8, 6, 4};
    spec.head = head;
    return spec;
}

}  // namespace

Result network_sigmoid_bce(std::uint64_t seed) {
    return network_check("network (sigmoid + bce, input 12)", narrow_spec(xray::Head::sigmoid), seed,
                         static_cast<std::size_t>(-1));
}

Result network_svm_hinge(std::uint64_t seed) {
    return network_check("network (svm + hinge, input 12)", narrow_spec(xray::Head::svm), seed,
                         static_cast<std::size_t>(-1));
}

Result network_default_width(std::uint64_t seed, std::size_t per_tensor) {
    xray::NetworkSpec spec;
    spec.input_side = 12;
    return network_check("network (default widths, input 12, sampled)", spec, seed, per_tensor);
}

std::vector<Result> run_all() {
    return {conv2d(11),
            maxpool2d(12),
            dense(13),
            relu(14),
            dropout(15),
            bce(16),
            hinge(17),
            network_sigmoid_bce(18),
            network_svm_hinge(19),
            network_default_width(20, 60)};
}

}  // namespace gradcheck
