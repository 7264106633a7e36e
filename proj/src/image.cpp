#include "xray/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xray/error.hpp"
#include "xray/rng.hpp"

namespace xray {

GrayImage GrayImage::transposed() const {
    GrayImage t(height, width);
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) t.at(c, r) = at(r, c);
    }
    return t;
}

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

namespace {

void check_image(const GrayImage& image, const char* what) {
    if (image.width == 0 || image.height == 0 || image.pixels.size() != image.width * image.height) {
        throw Error(ErrorCode::shape, std::string(what) + ": malformed image (" + std::to_string(image.width) + "x" +
                                          std::to_string(image.height) + ", " +
                                          std::to_string(image.pixels.size()) + " pixels)");
    }
}

std::ptrdiff_t clamp_index(std::ptrdiff_t i, std::size_t n) {
    return std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1);
}

std::size_t mirror_index(std::ptrdiff_t i, std::size_t n) {
    const auto last = static_cast<std::ptrdiff_t>(n) - 1;
    if (i < 0) i = -i;
    if (i > last) i = 2 * last - i;
    return static_cast<std::size_t>(i);
}

/// Bilinear read at fractional (y, x); coordinates are clamped to the image first.
float sample_bilinear(const GrayImage& image, double y, double x) {
    y = std::clamp(y, 0.0, static_cast<double>(image.height - 1));
    x = std::clamp(x, 0.0, static_cast<double>(image.width - 1));
    const auto y0 = static_cast<std::size_t>(std::floor(y));
    const auto x0 = static_cast<std::size_t>(std::floor(x));
    const std::size_t y1 = std::min(y0 + 1, image.height - 1);
    const std::size_t x1 = std::min(x0 + 1, image.width - 1);
    const double fy = y - static_cast<double>(y0);
    const double fx = x - static_cast<double>(x0);
    const double top = image.at(y0, x0) * (1.0 - fx) + image.at(y0, x1) * fx;
    const double bottom = image.at(y1, x0) * (1.0 - fx) + image.at(y1, x1) * fx;
    return static_cast<float>(top * (1.0 - fy) + bottom * fy);
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& image, std::size_t target_side) {
    check_image(image, "resize");
    if (target_side < 2) {
        throw Error(ErrorCode::usage, "resize target side must be at least 2, got " + std::to_string(target_side));
    }
    GrayImage out(target_side, target_side);
    const double sy = static_cast<double>(image.height) / static_cast<double>(target_side);
    const double sx = static_cast<double>(image.width) / static_cast<double>(target_side);
    for (std::size_t r = 0; r < target_side; ++r) {
        const double y = (static_cast<double>(r) + 0.5) * sy - 0.5;
        for (std::size_t c = 0; c < target_side; ++c) {
            const double x = (static_cast<double>(c) + 0.5) * sx - 0.5;
            out.at(r, c) = sample_bilinear(image, y, x);
        }
    }
    return out;
}

GrayImage sobel_magnitude(const GrayImage& image) {
    check_image(image, "sobel");
    if (image.width < 3 || image.height < 3) {
        throw Error(ErrorCode::shape, "sobel needs an image of at least 3x3, got " + std::to_string(image.width) +
                                          "x" + std::to_string(image.height));
    }
    static constexpr int gx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    GrayImage out(image.width, image.height);
    for (std::size_t r = 0; r < image.height; ++r) {
        for (std::size_t c = 0; c < image.width; ++c) {
            double sx = 0.0, sy = 0.0;
            for (int u = 0; u < 3; ++u) {
                const std::size_t rr = mirror_index(static_cast<std::ptrdiff_t>(r) + u - 1, image.height);
                for (int v = 0; v < 3; ++v) {
                    const std::size_t cc = mirror_index(static_cast<std::ptrdiff_t>(c) + v - 1, image.width);
                    const double p = image.at(rr, cc);
                    sx += gx[u][v] * p;
                    sy += gx[v][u] * p;
                }
            }
            out.at(r, c) = static_cast<float>(std::sqrt(sx * sx + sy * sy));
        }
    }
    return out;
}

GrayImage sobel(const GrayImage& image) {
    GrayImage mag = sobel_magnitude(image);
    const float peak = *std::max_element(mag.pixels.begin(), mag.pixels.end());
    if (peak <= 0.0f) return mag;
    const double scale = 255.0 / peak;
    for (auto& p : mag.pixels) p = static_cast<float>(p * scale);
    return mag;
}

GrayImage shift_image(const GrayImage& image, int dx, int dy) {
    check_image(image, "shift");
    GrayImage out(image.width, image.height);
    for (std::size_t r = 0; r < image.height; ++r) {
        const auto sr = clamp_index(static_cast<std::ptrdiff_t>(r) - dy, image.height);
        for (std::size_t c = 0; c < image.width; ++c) {
            const auto sc = clamp_index(static_cast<std::ptrdiff_t>(c) - dx, image.width);
            out.at(r, c) = image.at(sr, sc);
        }
    }
    return out;
}

GrayImage rotate_image(const GrayImage& image, double degrees) {
    check_image(image, "rotate");
    GrayImage out(image.width, image.height);
    const double theta = degrees * std::numbers::pi / 180.0;
    const double cs = std::cos(theta), sn = std::sin(theta);
    const double cy = (static_cast<double>(image.height) - 1.0) / 2.0;
    const double cx = (static_cast<double>(image.width) - 1.0) / 2.0;
    for (std::size_t r = 0; r < image.height; ++r) {
        const double dy = static_cast<double>(r) - cy;
        for (std::size_t c = 0; c < image.width; ++c) {
            const double dx = static_cast<double>(c) - cx;
            // inverse map: rotate the output coordinate back by -theta
            const double x = cx + cs * dx + sn * dy;
            const double y = cy - sn * dx + cs * dy;
            out.at(r, c) = sample_bilinear(image, y, x);
        }
    }
    return out;
}

const char* lineage_name(Lineage lineage) {
    switch (lineage) {
    case Lineage::original: return "original";
    case Lineage::shift_x: return "shift_x";
    case Lineage::shift_y: return "shift_y";
    case Lineage::rotation: return "rotation";
    }
    return "unknown";
}

AugmentDraw draw_augmentation(std::size_t width, std::size_t height, std::uint64_t seed,
                              const AugmentRanges& ranges) {
    Rng rng(seed);
    const auto max_dx = static_cast<std::int64_t>(std::floor(ranges.shift_fraction * static_cast<double>(width)));
    const auto max_dy = static_cast<std::int64_t>(std::floor(ranges.shift_fraction * static_cast<double>(height)));
    AugmentDraw draw;
    draw.shift_x = static_cast<int>(rng.between(-max_dx, max_dx));
    draw.shift_y = static_cast<int>(rng.between(-max_dy, max_dy));
    draw.rotation = rng.uniform(-ranges.rotation_degrees, ranges.rotation_degrees);
    return draw;
}

std::array<GrayImage, 3> augment(const GrayImage& image, std::uint64_t seed, const AugmentRanges& ranges) {
    check_image(image, "augment");
    const AugmentDraw draw = draw_augmentation(image.width, image.height, seed, ranges);
    return {shift_image(image, draw.shift_x, 0), shift_image(image, 0, draw.shift_y),
            rotate_image(image, draw.rotation)};
}

Tensor normalize(const GrayImage& image) {
    check_image(image, "normalize");
    Tensor t({1, image.height, image.width});
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        t[i] = std::clamp(image.pixels[i] / 255.0f, 0.0f, 1.0f);
    }
    return t;
}

}  // namespace xray
