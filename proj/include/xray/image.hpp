#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "xray/tensor.hpp"

namespace xray {

/// Single-channel image, row-major. Pixel values are on the 0..255 scale;
/// decoding yields integers, resampling may produce fractional values.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<float> pixels;

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h, float fill = 0.0f) : width(w), height(h), pixels(w * h, fill) {}

    float& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
    float at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }

    GrayImage transposed() const;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// ITU-R BT.601 luma, rounded to nearest.
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Decodes a PNG or baseline JPEG file to luminance. The format is detected
/// from the file signature, not the extension.
GrayImage load_image(const std::filesystem::path& path);

/// Encoders for 8-bit images with 1 (gray) or 3 (RGB) interleaved channels.
void write_png(const std::filesystem::path& path, std::size_t width, std::size_t height, int channels,
               std::span<const std::uint8_t> samples);
void write_jpeg(const std::filesystem::path& path, std::size_t width, std::size_t height, int channels,
                std::span<const std::uint8_t> samples, int quality = 95);

/// Rounds and clamps to 0..255 and writes an 8-bit grayscale PNG.
void save_png(const GrayImage& image, const std::filesystem::path& path);

/// Bilinear resampling to target_side x target_side with half-pixel centers:
/// output pixel i samples source coordinate (i + 0.5) * in / out - 0.5,
/// clamped to the image.
GrayImage resize_bilinear(const GrayImage& image, std::size_t target_side);

/// Raw Sobel gradient magnitude sqrt(Gx^2 + Gy^2), same size as the input,
/// with mirrored borders (index -1 reads index 1).
GrayImage sobel_magnitude(const GrayImage& image);

/// Sobel magnitude rescaled so its maximum maps to 255; an all-zero magnitude stays zero.
GrayImage sobel(const GrayImage& image);

/// Translation by whole pixels; output(r, c) = input(r - dy, c - dx), with
/// out-of-range reads clamped to the nearest edge.
GrayImage shift_image(const GrayImage& image, int dx, int dy);

/// Rotation about the image center by `degrees`, bilinear sampling, edge replication.
GrayImage rotate_image(const GrayImage& image, double degrees);

struct AugmentRanges {
    double shift_fraction = 0.1;
    double rotation_degrees = 15.0;
};

struct AugmentDraw {
    int shift_x = 0;
    int shift_y = 0;
    double rotation = 0.0;
};

enum class Lineage : std::uint8_t { original = 0, shift_x = 1, shift_y = 2, rotation = 3 };

const char* lineage_name(Lineage lineage);

/// Shift drawn uniformly from the integers within +-shift_fraction of the
/// extent; rotation uniform in +-rotation_degrees.
AugmentDraw draw_augmentation(std::size_t width, std::size_t height, std::uint64_t seed,
                              const AugmentRanges& ranges = {});

/// The three variants of one image in lineage order: shift_x, shift_y, rotation.
std::array<GrayImage, 3> augment(const GrayImage& image, std::uint64_t seed, const AugmentRanges& ranges = {});

/// pixel / 255 as a [1, H, W] tensor.
Tensor normalize(const GrayImage& image);

}  // namespace xray
