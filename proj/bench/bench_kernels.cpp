// Serial reference kernels against the OpenMP kernels on default-network shapes.
// Run with OMP_NUM_THREADS to pick the thread count of the parallel set.

#include <benchmark/benchmark.h>

#include <random>

#include "xray/kernels.hpp"

using namespace xray;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    std::vector<float> v(shape_size(shape));
    for (auto& x : v) x = u(gen);
    return Tensor(std::move(shape), std::move(v));
}

// Second conv block of the default network: 128 x 31 x 31 in, 256 kernels.
// args: input channels, kernels, input side
void conv_args(benchmark::internal::Benchmark* b) {
    b->Args({1, 128, 64})->Args({128, 256, 31})->Unit(benchmark::kMillisecond);
}

template <bool Parallel>
void BM_Conv2dForward(benchmark::State& state) {
    const auto C = static_cast<std::size_t>(state.range(0)), K = static_cast<std::size_t>(state.range(1)),
               S = static_cast<std::size_t>(state.range(2));
    const auto x = random_tensor({C, S, S}, 1), w = random_tensor({K, C, 3, 3}, 2), bias = random_tensor({K}, 3);
    for (auto _ : state) {
        auto y = Parallel ? kernels::conv2d_forward(x, w, bias) : reference::conv2d_forward(x, w, bias);
        benchmark::DoNotOptimize(y.data().data());
    }
    const double out = static_cast<double>(K * (S - 2) * (S - 2));
    state.counters["GFLOP/s"] =
        benchmark::Counter(2.0 * out * C * 9 * state.iterations() * 1e-9, benchmark::Counter::kIsRate);
}

template <bool Parallel>
void BM_Conv2dBackward(benchmark::State& state) {
    const auto C = static_cast<std::size_t>(state.range(0)), K = static_cast<std::size_t>(state.range(1)),
               S = static_cast<std::size_t>(state.range(2));
    const auto x = random_tensor({C, S, S}, 1), w = random_tensor({K, C, 3, 3}, 2),
               up = random_tensor({K, S - 2, S - 2}, 4);
    for (auto _ : state) {
        auto g = Parallel ? kernels::conv2d_backward(x, w, up) : reference::conv2d_backward(x, w, up);
        benchmark::DoNotOptimize(g.kernels.data().data());
    }
}

template <bool Parallel>
void BM_MaxPool(benchmark::State& state) {
    const auto x = random_tensor({256, 29, 29}, 5);
    for (auto _ : state) {
        auto p = Parallel ? kernels::maxpool2d_forward(x) : reference::maxpool2d_forward(x);
        benchmark::DoNotOptimize(p.output.data().data());
    }
}

// First dense layer of the default network: 50176 -> 64.
template <bool Parallel>
void BM_DenseForward(benchmark::State& state) {
    const auto x = random_tensor({50176}, 6), w = random_tensor({64, 50176}, 7), bias = random_tensor({64}, 8);
    for (auto _ : state) {
        auto y = Parallel ? kernels::dense_forward(x, w, bias) : reference::dense_forward(x, w, bias);
        benchmark::DoNotOptimize(y.data().data());
    }
}

template <bool Parallel>
void BM_DenseBackward(benchmark::State& state) {
    const auto x = random_tensor({50176}, 6), w = random_tensor({64, 50176}, 7), up = random_tensor({64}, 9);
    for (auto _ : state) {
        auto g = Parallel ? kernels::dense_backward(x, w, up) : reference::dense_backward(x, w, up);
        benchmark::DoNotOptimize(g.weights.data().data());
    }
}

}  // namespace

BENCHMARK(BM_Conv2dForward<false>)->Name("conv2d_forward/reference")->Apply(conv_args);
BENCHMARK(BM_Conv2dForward<true>)->Name("conv2d_forward/parallel")->Apply(conv_args);
BENCHMARK(BM_Conv2dBackward<false>)->Name("conv2d_backward/reference")->Apply(conv_args);
BENCHMARK(BM_Conv2dBackward<true>)->Name("conv2d_backward/parallel")->Apply(conv_args);
BENCHMARK(BM_MaxPool<false>)->Name("maxpool2d/reference");
BENCHMARK(BM_MaxPool<true>)->Name("maxpool2d/parallel");
BENCHMARK(BM_DenseForward<false>)->Name("dense_forward/reference");
BENCHMARK(BM_DenseForward<true>)->Name("dense_forward/parallel");
BENCHMARK(BM_DenseBackward<false>)->Name("dense_backward/reference");
BENCHMARK(BM_DenseBackward<true>)->Name("dense_backward/parallel");

BENCHMARK_MAIN();
