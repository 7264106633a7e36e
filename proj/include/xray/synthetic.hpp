#pragma once

#include <cstdint>
#include <filesystem>

#include "xray/dataset.hpp"
#include "xray/image.hpp"
#include "xray/rng.hpp"

namespace xray {

/// Synthetic two-class images for smoke tests and demos.
///
/// Both classes share a mid-gray background plus a random low-frequency
/// nuisance (a linear ramp and a broad bump, peak-to-peak up to
/// `nuisance_amplitude`). Positive images add a fine high-contrast texture
/// of small squares (dense sharp edges); negative images add a smooth blob of
/// comparable mass and no sharp edges.
struct SynthOptions {
    std::size_t side = 32;
    double texture_contrast = 60.0;
    double nuisance_amplitude = 40.0;
};

GrayImage synth_image(Label label, Rng& rng, const SynthOptions& options = {});

/// Writes <dir>/covid/pos_NNNN.png and <dir>/normal/neg_NNNN.png.
void write_synthetic_dataset(const std::filesystem::path& dir, std::size_t positives, std::size_t negatives,
                             std::uint64_t seed, const SynthOptions& options = {});

/// The same images in memory, resized to `options.side`, lineage original.
LabeledDataset synthetic_dataset(std::size_t positives, std::size_t negatives, std::uint64_t seed,
                                 const SynthOptions& options = {});

}  // namespace xray
