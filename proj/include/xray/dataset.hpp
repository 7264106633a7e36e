#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xray/image.hpp"
#include "xray/tensor.hpp"

namespace xray {

enum class Label : std::uint8_t { negative = 0, positive = 1 };

/// Directory name of each class in a dataset tree: covid/ (positive), normal/ (negative).
const char* class_dir(Label label);

struct LabeledSample {
    /// Resized image on the 0..255 scale. Sobel and normalization are applied
    /// per experiment arm by `to_tensor`.
    GrayImage image;
    Label label = Label::negative;
    /// Originating file, relative to the dataset root (e.g. "covid/0001.png").
    std::string source_id;
    Lineage lineage = Lineage::original;
};

struct ClassCounts {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t total() const { return positive + negative; }
};

struct LabeledDataset {
    std::vector<LabeledSample> samples;
    std::size_t input_side = 0;
    std::uint64_t seed = 0;

    ClassCounts counts() const;
    std::size_t count(Lineage lineage) const;
    std::vector<Label> labels() const;
    /// Throws ErrorCode::single_class unless both classes have samples.
    void require_both_classes() const;
};

struct PrepareOptions {
    std::uint64_t seed = 0;
    bool augment = true;
    std::size_t input_side = 64;
    AugmentRanges ranges{};
};

/// Image files of one class, sorted by path. Throws ErrorCode::empty_class
/// if the class directory is missing or holds no .png/.jpg/.jpeg files.
std::vector<std::filesystem::path> list_class_images(const std::filesystem::path& root, Label label);

/// Loads <root>/covid and <root>/normal. Per original, in path order: load,
/// then (when augmenting) derive shift_x, shift_y and rotation variants from
/// the full-resolution image, then resize everything to input_side.
LabeledDataset prepare_dataset(const std::filesystem::path& root, const PrepareOptions& options);

/// Network input for one sample: optional Sobel, then /255.
Tensor to_tensor(const GrayImage& image, bool apply_sobel);

/// Stacks samples [indices] into a [B,1,S,S] batch.
Tensor make_batch(const std::vector<Tensor>& inputs, const std::vector<std::size_t>& indices);

// Prepared-dataset cache: one IMG1 file per sample plus manifest.json.
// IMG1 layout: "IMG1", u16 side, u8 label, u8 lineage, side*side float32, all little-endian.

void write_sample_file(const std::filesystem::path& path, const LabeledSample& sample);
LabeledSample read_sample_file(const std::filesystem::path& path);

void save_prepared(const LabeledDataset& dataset, const std::filesystem::path& dir, bool augmented);
LabeledDataset load_prepared(const std::filesystem::path& dir);

/// Prepared directory (has manifest.json) or raw class tree (prepared here without augmentation).
LabeledDataset load_any_dataset(const std::filesystem::path& dir, std::size_t input_side, std::uint64_t seed);

}  // namespace xray
