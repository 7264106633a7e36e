#pragma once

#include <cstdint>
#include <filesystem>

#include "xray/network.hpp"

namespace xray {

// Checkpoint file layout (little-endian):
//   "CXSV"            magic
//   u8                version = 1
//   u32               metadata length L
//   L bytes           JSON metadata: network, head, sobel, input_side, seed, fold
//   4*N bytes         float32 parameters, tensors concatenated in declaration order
//   u32               CRC-32 of the parameter bytes
// N is implied by the network in the metadata; any size disagreement is a
// load error, as is a checksum mismatch.

struct CheckpointMeta {
    NetworkSpec spec;
    bool sobel = false;
    std::uint64_t seed = 0;
    std::size_t fold = 0;

    friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

struct Checkpoint {
    CheckpointMeta meta;
    ParamSet params;
};

inline constexpr std::uint8_t checkpoint_version = 1;

void save_checkpoint(const std::filesystem::path& path, const CheckpointMeta& meta, const ParamSet& params);

/// Throws ErrorCode::corrupt_checkpoint for a bad magic/version, malformed
/// metadata, length mismatch or checksum failure; ErrorCode::io if unreadable.
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace xray
