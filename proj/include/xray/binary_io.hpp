#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "xray/error.hpp"

namespace xray::binary {

using Bytes = std::vector<std::uint8_t>;

inline void put_u8(Bytes& out, std::uint8_t v) { out.push_back(v); }

inline void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f32(Bytes& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

inline void put_bytes(Bytes& out, const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }

/// Bounds-checked little-endian reader; overruns throw `error_code`.
class Reader {
public:
    Reader(const Bytes& bytes, ErrorCode error_code, std::string what)
        : bytes_(bytes), code_(error_code), what_(std::move(what)) {}

    std::uint8_t u8() { return need(1)[0]; }

    std::uint16_t u16() {
        const auto* p = need(2);
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }

    std::uint32_t u32() {
        const auto* p = need(4);
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    }

    float f32() { return std::bit_cast<float>(u32()); }

    std::string str(std::size_t n) {
        const auto* p = need(n);
        return std::string(reinterpret_cast<const char*>(p), n);
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    const std::uint8_t* need(std::size_t n) {
        if (bytes_.size() - pos_ < n) throw Error(code_, what_ + ": unexpected end of data");
        const auto* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }

    const Bytes& bytes_;
    ErrorCode code_;
    std::string what_;
    std::size_t pos_ = 0;
};

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Bytes& bytes);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace xray::binary
