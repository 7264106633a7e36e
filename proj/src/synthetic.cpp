#include "xray/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "xray/error.hpp"

namespace xray {

GrayImage synth_image(Label label, Rng& rng, const SynthOptions& o) {
    const std::size_t n = o.side;
    const double side = static_cast<double>(n);
    std::vector<double> field(n * n, 128.0);

    // low-frequency nuisance shared by both classes
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double ramp = rng.uniform(-0.5, 0.5) * o.nuisance_amplitude;
    const double bump = rng.uniform(-0.5, 0.5) * o.nuisance_amplitude;
    const double bump_y = rng.uniform(0.0, side), bump_x = rng.uniform(0.0, side);
    const double bump_sigma = side * rng.uniform(0.35, 0.6);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double u = (static_cast<double>(c) - side / 2) / side;
            const double v = (static_cast<double>(r) - side / 2) / side;
            const double d2 = (r - bump_y) * (r - bump_y) + (c - bump_x) * (c - bump_x);
            field[r * n + c] += ramp * (u * std::cos(angle) + v * std::sin(angle)) * 2.0 +
                                bump * std::exp(-d2 / (2 * bump_sigma * bump_sigma));
        }
    }

    if (label == Label::positive) {
        const int squares = static_cast<int>(rng.between(14, 22));
        for (int s = 0; s < squares; ++s) {
            const auto size = static_cast<std::size_t>(rng.between(2, 3));
            const auto top = static_cast<std::size_t>(rng.below(n - size));
            const auto left = static_cast<std::size_t>(rng.below(n - size));
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            const double contrast = sign * o.texture_contrast * rng.uniform(0.8, 1.2);
            for (std::size_t r = top; r < top + size; ++r) {
                for (std::size_t c = left; c < left + size; ++c) field[r * n + c] += contrast;
            }
        }
    } else {
        const double cy = rng.uniform(side * 0.2, side * 0.8), cx = rng.uniform(side * 0.2, side * 0.8);
        const double sigma = side * rng.uniform(0.12, 0.2);
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double amp = sign * o.texture_contrast * rng.uniform(0.8, 1.2);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                const double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
                field[r * n + c] += amp * std::exp(-d2 / (2 * sigma * sigma));
            }
        }
    }

    GrayImage img(n, n);
    for (std::size_t i = 0; i < field.size(); ++i) {
        img.pixels[i] = static_cast<float>(std::clamp(std::round(field[i]), 0.0, 255.0));
    }
    return img;
}

void write_synthetic_dataset(const std::filesystem::path& dir, std::size_t positives, std::size_t negatives,
                             std::uint64_t seed, const SynthOptions& options) {
    Rng rng(seed);
    for (Label label : {Label::positive, Label::negative}) {
        const auto sub = dir / class_dir(label);
        std::error_code ec;
        std::filesystem::create_directories(sub, ec);
        if (ec) throw Error(ErrorCode::io, "cannot create " + sub.string() + ": " + ec.message());
        const std::size_t count = label == Label::positive ? positives : negatives;
        for (std::size_t i = 0; i < count; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "%s_%04zu.png", label == Label::positive ? "pos" : "neg", i);
            save_png(synth_image(label, rng, options), sub / name);
        }
    }
}

LabeledDataset synthetic_dataset(std::size_t positives, std::size_t negatives, std::uint64_t seed,
                                 const SynthOptions& options) {
    Rng rng(seed);
    LabeledDataset ds;
    ds.input_side = options.side;
    ds.seed = seed;
    for (Label label : {Label::positive, Label::negative}) {
        const std::size_t count = label == Label::positive ? positives : negatives;
        for (std::size_t i = 0; i < count; ++i) {
            char name[40];
            std::snprintf(name, sizeof name, "%s/%s_%04zu.png", class_dir(label),
                          label == Label::positive ? "pos" : "neg", i);
            ds.samples.push_back({synth_image(label, rng, options), label, name, Lineage::original});
        }
    }
    return ds;
}

}  // namespace xray
