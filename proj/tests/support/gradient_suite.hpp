#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gradcheck {

/// Outcome of comparing analytic gradients with central finite differences.
struct Result {
    std::string name;
    double tolerance = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;  // components at a ReLU, maxpool or hinge kink
    std::size_t failed = 0;
    double worst = 0.0;       // largest relative error among checked components

    bool pass() const { return failed == 0 && checked > 0; }
};

/// Step and tolerances of the suite.
inline constexpr double step = 1e-4;
inline constexpr double layer_tolerance = 1e-4;
inline constexpr double loss_tolerance = 1e-5;
inline constexpr double network_tolerance = 1e-3;
/// Absolute slack for components whose true value is at round-off level.
inline constexpr double absolute_floor = 1e-9;

Result conv2d(std::uint64_t seed);
Result maxpool2d(std::uint64_t seed);
Result dense(std::uint64_t seed);
Result relu(std::uint64_t seed);
Result dropout(std::uint64_t seed);
Result bce(std::uint64_t seed);
Result hinge(std::uint64_t seed);
/// Narrow-channel network at input side 12, every parameter, both heads with their losses.
Result network_sigmoid_bce(std::uint64_t seed);
Result network_svm_hinge(std::uint64_t seed);
/// Default-width network at input side 12; `per_tensor` sampled components from each parameter tensor.
Result network_default_width(std::uint64_t seed, std::size_t per_tensor);

/// Everything above with fixed seeds.
std::vector<Result> run_all();

}  // namespace gradcheck
