#include "xray/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include <json.hpp>

#include "xray/binary_io.hpp"
#include "xray/error.hpp"
#include "xray/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace xray {

const char* class_dir(Label label) { return label == Label::positive ? "covid" : "normal"; }

ClassCounts LabeledDataset::counts() const {
    ClassCounts c;
    for (const auto& s : samples) (s.label == Label::positive ? c.positive : c.negative)++;
    return c;
}

std::size_t LabeledDataset::count(Lineage lineage) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [&](const auto& s) { return s.lineage == lineage; }));
}

std::vector<Label> LabeledDataset::labels() const {
    std::vector<Label> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.label);
    return out;
}

void LabeledDataset::require_both_classes() const {
    const auto c = counts();
    if (c.positive == 0 || c.negative == 0) {
        throw Error(ErrorCode::single_class, "dataset needs both classes, has " + std::to_string(c.positive) +
                                                 " positive and " + std::to_string(c.negative) + " negative samples");
    }
}

namespace {

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

std::vector<fs::path> list_class_images(const fs::path& root, Label label) {
    const fs::path dir = root / class_dir(label);
    if (!fs::is_directory(dir)) throw Error(ErrorCode::empty_class, "missing class directory " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    if (files.empty()) throw Error(ErrorCode::empty_class, "no .png/.jpg/.jpeg images in " + dir.string());
    std::sort(files.begin(), files.end());
    return files;
}

LabeledDataset prepare_dataset(const fs::path& root, const PrepareOptions& options) {
    if (!fs::is_directory(root)) throw Error(ErrorCode::missing_file, "dataset directory not found: " + root.string());
    struct Entry {
        fs::path path;
        Label label;
    };
    std::vector<Entry> entries;
    for (Label label : {Label::positive, Label::negative}) {
        for (auto& p : list_class_images(root, label)) entries.push_back({std::move(p), label});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.path < b.path; });

    LabeledDataset ds;
    ds.input_side = options.input_side;
    ds.seed = options.seed;
    ds.samples.reserve(entries.size() * (options.augment ? 4 : 1));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const GrayImage raw = load_image(e.path);
        const std::string source = fs::relative(e.path, root).generic_string();
        ds.samples.push_back({resize_bilinear(raw, options.input_side), e.label, source, Lineage::original});
        if (options.augment) {
            const auto variants = augment(raw, Rng::mix(options.seed + i), options.ranges);
            const Lineage kinds[3] = {Lineage::shift_x, Lineage::shift_y, Lineage::rotation};
            for (int v = 0; v < 3; ++v) {
                ds.samples.push_back({resize_bilinear(variants[v], options.input_side), e.label, source, kinds[v]});
            }
        }
    }
    return ds;
}

Tensor to_tensor(const GrayImage& image, bool apply_sobel) {
    return apply_sobel ? normalize(sobel(image)) : normalize(image);
}

Tensor make_batch(const std::vector<Tensor>& inputs, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw Error(ErrorCode::shape, "empty batch");
    const Shape& s = inputs.at(indices.front()).shape();
    Tensor batch({indices.size(), s[0], s[1], s[2]});
    const std::size_t n = inputs[indices.front()].size();
    for (std::size_t b = 0; b < indices.size(); ++b) {
        const Tensor& t = inputs.at(indices[b]);
        if (t.shape() != s) throw Error(ErrorCode::shape, "batch inputs differ in shape");
        std::copy(t.data().begin(), t.data().end(), batch.data().begin() + static_cast<std::ptrdiff_t>(b * n));
    }
    return batch;
}

void write_sample_file(const fs::path& path, const LabeledSample& sample) {
    const auto& img = sample.image;
    if (img.width != img.height || img.width == 0 || img.width > 0xffff) {
        throw Error(ErrorCode::shape, "cached samples must be square with side < 65536");
    }
    binary::Bytes out;
    out.reserve(8 + img.pixels.size() * 4);
    binary::put_bytes(out, "IMG1");
    binary::put_u16(out, static_cast<std::uint16_t>(img.width));
    binary::put_u8(out, static_cast<std::uint8_t>(sample.label));
    binary::put_u8(out, static_cast<std::uint8_t>(sample.lineage));
    for (float p : img.pixels) binary::put_f32(out, p);
    binary::write_file(path, out);
}

LabeledSample read_sample_file(const fs::path& path) {
    const auto bytes = binary::read_file(path);
    binary::Reader in(bytes, ErrorCode::corrupt_image, "sample file " + path.string());
    if (in.str(4) != "IMG1") throw Error(ErrorCode::corrupt_image, "bad magic in sample file " + path.string());
    const std::size_t side = in.u16();
    const auto label = in.u8();
    const auto lineage = in.u8();
    if (side == 0 || label > 1 || lineage > 3) {
        throw Error(ErrorCode::corrupt_image, "invalid header in sample file " + path.string());
    }
    if (in.remaining() != side * side * 4) {
        throw Error(ErrorCode::corrupt_image, "pixel payload length mismatch in " + path.string());
    }
    LabeledSample s;
    s.image = GrayImage(side, side);
    for (auto& p : s.image.pixels) p = in.f32();
    s.label = static_cast<Label>(label);
    s.lineage = static_cast<Lineage>(lineage);
    return s;
}

void save_prepared(const LabeledDataset& dataset, const fs::path& dir, bool augmented) {
    std::error_code ec;
    fs::create_directories(dir / "samples", ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + (dir / "samples").string() + ": " + ec.message());

    json entries = json::array();
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& s = dataset.samples[i];
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.img", i);
        write_sample_file(dir / "samples" / name, s);
        entries.push_back({{"file", std::string("samples/") + name},
                           {"source_id", s.source_id},
                           {"label", class_dir(s.label)},
                           {"lineage", lineage_name(s.lineage)}});
    }
    const auto c = dataset.counts();
    json manifest;
    manifest["format"] = "IMG1";
    manifest["input_side"] = dataset.input_side;
    manifest["seed"] = dataset.seed;
    manifest["augmented"] = augmented;
    manifest["counts"] = {{"covid", c.positive}, {"normal", c.negative}, {"total", c.total()}};
    manifest["lineage_counts"] = {{"original", dataset.count(Lineage::original)},
                                  {"shift_x", dataset.count(Lineage::shift_x)},
                                  {"shift_y", dataset.count(Lineage::shift_y)},
                                  {"rotation", dataset.count(Lineage::rotation)}};
    manifest["samples"] = std::move(entries);
    binary::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

LabeledDataset load_prepared(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::is_regular_file(manifest_path)) {
        throw Error(ErrorCode::missing_file, "no manifest.json in " + dir.string());
    }
    json manifest;
    try {
        manifest = json::parse(binary::read_text(manifest_path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::corrupt_image, "unreadable manifest " + manifest_path.string() + ": " + e.what());
    }
    LabeledDataset ds;
    try {
        ds.input_side = manifest.at("input_side").get<std::size_t>();
        ds.seed = manifest.at("seed").get<std::uint64_t>();
        for (const auto& e : manifest.at("samples")) {
            LabeledSample s = read_sample_file(dir / e.at("file").get<std::string>());
            s.source_id = e.at("source_id").get<std::string>();
            if (s.image.width != ds.input_side) {
                throw Error(ErrorCode::corrupt_image, "sample " + e.at("file").get<std::string>() +
                                                          " has side " + std::to_string(s.image.width) +
                                                          ", manifest says " + std::to_string(ds.input_side));
            }
            ds.samples.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::corrupt_image, "malformed manifest " + manifest_path.string() + ": " + e.what());
    }
    if (ds.samples.empty()) throw Error(ErrorCode::empty_class, "prepared dataset " + dir.string() + " is empty");
    return ds;
}

LabeledDataset load_any_dataset(const fs::path& dir, std::size_t input_side, std::uint64_t seed) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::missing_file, "data directory not found: " + dir.string());
    if (fs::is_regular_file(dir / "manifest.json")) return load_prepared(dir);
    PrepareOptions options;
    options.seed = seed;
    options.augment = false;
    options.input_side = input_side;
    return prepare_dataset(dir, options);
}

}  // namespace xray
