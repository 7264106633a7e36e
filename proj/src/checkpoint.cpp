#include "xray/checkpoint.hpp"

#include <zlib.h>

#include "xray/binary_io.hpp"
#include "xray/serialization.hpp"

namespace xray {

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in bounded chunks
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        const std::size_t n = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
        crc = ::crc32(crc, bytes.data() + offset, static_cast<uInt>(n));
        offset += n;
    }
    return static_cast<std::uint32_t>(crc);
}

void save_checkpoint(const std::filesystem::path& path, const CheckpointMeta& meta, const ParamSet& params) {
    NetworkSpec spec = meta.spec;
    params.check(spec);
    ordered_json j;
    j["network"] = to_json(spec);
    j["head"] = to_string(spec.head);
    j["sobel"] = meta.sobel;
    j["input_side"] = spec.input_side;
    j["seed"] = meta.seed;
    j["fold"] = meta.fold;
    const std::string text = j.dump();

    binary::Bytes blob;
    blob.reserve(params.element_count() * 4);
    for (const auto& t : params.tensors) {
        for (float v : t.data()) binary::put_f32(blob, v);
    }

    binary::Bytes out;
    out.reserve(13 + text.size() + blob.size());
    binary::put_bytes(out, "CXSV");
    binary::put_u8(out, checkpoint_version);
    binary::put_u32(out, static_cast<std::uint32_t>(text.size()));
    binary::put_bytes(out, text);
    out.insert(out.end(), blob.begin(), blob.end());
    binary::put_u32(out, crc32(blob));
    binary::write_file(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorCode::io, "checkpoint not found: " + path.string());
    }
    const auto bytes = binary::read_file(path);
    const std::string where = "checkpoint " + path.string();
    binary::Reader in(bytes, ErrorCode::corrupt_checkpoint, where);
    if (in.str(4) != "CXSV") throw Error(ErrorCode::corrupt_checkpoint, where + ": bad magic");
    const auto version = in.u8();
    if (version != checkpoint_version) {
        throw Error(ErrorCode::corrupt_checkpoint, where + ": unsupported version " + std::to_string(version));
    }
    const std::uint32_t meta_len = in.u32();
    const std::string text = in.str(meta_len);

    Checkpoint ck;
    try {
        const auto j = ordered_json::parse(text);
        ck.meta.spec = network_spec_from_json(j.at("network"));
        if (j.at("head").get<std::string>() != to_string(ck.meta.spec.head) ||
            j.at("input_side").get<std::size_t>() != ck.meta.spec.input_side) {
            throw Error(ErrorCode::corrupt_checkpoint, where + ": metadata fields disagree");
        }
        ck.meta.sobel = j.at("sobel").get<bool>();
        ck.meta.seed = j.at("seed").get<std::uint64_t>();
        ck.meta.fold = j.at("fold").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::corrupt_checkpoint, where + ": malformed metadata: " + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::corrupt_checkpoint) throw;
        throw Error(ErrorCode::corrupt_checkpoint, where + ": invalid network in metadata: " + e.what());
    }

    ck.params = ParamSet::zeros(ck.meta.spec);
    const std::size_t blob_len = ck.params.element_count() * 4;
    if (in.remaining() != blob_len + 4) {
        throw Error(ErrorCode::corrupt_checkpoint, where + ": parameter payload is " +
                                                       std::to_string(in.remaining()) + " bytes, metadata implies " +
                                                       std::to_string(blob_len + 4));
    }
    const std::span<const std::uint8_t> blob(bytes.data() + in.position(), blob_len);
    for (auto& t : ck.params.tensors) {
        for (auto& v : t.data()) v = in.f32();
    }
    const std::uint32_t stored = in.u32();
    if (stored != crc32(blob)) throw Error(ErrorCode::corrupt_checkpoint, where + ": parameter checksum mismatch");
    return ck;
}

}  // namespace xray
