#include <gtest/gtest.h>

#include "temp_dir.hpp"
#include "xray/binary_io.hpp"
#include "xray/checkpoint.hpp"

using namespace xray;

namespace {

NetworkSpec small_spec() {
    NetworkSpec s;
    s.input_side = 14;
    s.conv_blocks = {{3, 3, 2}, {5, 3, 2}};
    s.dense_widths = {6, 4};
    s.head = Head::svm;
    return s;
}

ErrorCode load_error(const std::filesystem::path& p) {
    try {
        load_checkpoint(p);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "load succeeded";
    return ErrorCode::usage;
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitExact) {
    TempDir dir("ck");
    const CheckpointMeta meta{small_spec(), true, 1234567890123ULL, 7};
    auto params = init_params<float>(meta.spec, 3);
    params.tensors[1][0] = -0.0f;  // sign of zero survives
    params.tensors[3][1] = 1e-40f;  // so do subnormals
    save_checkpoint(dir / "m.ckpt", meta, params);
    const auto ck = load_checkpoint(dir / "m.ckpt");
    EXPECT_EQ(ck.meta, meta);
    ASSERT_EQ(ck.params.tensors.size(), params.tensors.size());
    for (std::size_t t = 0; t < params.tensors.size(); ++t) {
        ASSERT_EQ(ck.params.tensors[t].shape(), params.tensors[t].shape());
        for (std::size_t i = 0; i < params.tensors[t].size(); ++i)
            EXPECT_EQ(std::bit_cast<std::uint32_t>(ck.params.tensors[t][i]),
                      std::bit_cast<std::uint32_t>(params.tensors[t][i]));
    }
}

TEST(Checkpoint, HeaderLayout) {
    TempDir dir("ck");
    const CheckpointMeta meta{small_spec(), false, 1, 0};
    const auto params = init_params<float>(meta.spec, 1);
    save_checkpoint(dir / "m.ckpt", meta, params);
    const auto bytes = binary::read_file(dir / "m.ckpt");
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CXSV");
    EXPECT_EQ(bytes[4], 1);
    const std::uint32_t len = bytes[5] | bytes[6] << 8 | bytes[7] << 16 | static_cast<std::uint32_t>(bytes[8]) << 24;
    EXPECT_EQ(bytes.size(), 9 + len + 4 * params.element_count() + 4);
    EXPECT_EQ(bytes[9], '{');
}

TEST(Checkpoint, FlippedWeightByteIsDetected) {
    TempDir dir("ck");
    const CheckpointMeta meta{small_spec(), false, 1, 0};
    save_checkpoint(dir / "m.ckpt", meta, init_params<float>(meta.spec, 1));
    auto bytes = binary::read_file(dir / "m.ckpt");
    for (std::size_t offset : {bytes.size() - 20, bytes.size() - 200}) {
        auto copy = bytes;
        copy[offset] ^= 0x10;
        binary::write_file(dir / "bad.ckpt", copy);
        EXPECT_EQ(load_error(dir / "bad.ckpt"), ErrorCode::corrupt_checkpoint);
    }
}

TEST(Checkpoint, StructuralDamageIsDetected) {
    TempDir dir("ck");
    const CheckpointMeta meta{small_spec(), false, 1, 0};
    save_checkpoint(dir / "m.ckpt", meta, init_params<float>(meta.spec, 1));
    const auto bytes = binary::read_file(dir / "m.ckpt");

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    binary::write_file(dir / "a.ckpt", bad_magic);
    EXPECT_EQ(load_error(dir / "a.ckpt"), ErrorCode::corrupt_checkpoint);

    auto bad_version = bytes;
    bad_version[4] = 2;
    binary::write_file(dir / "b.ckpt", bad_version);
    EXPECT_EQ(load_error(dir / "b.ckpt"), ErrorCode::corrupt_checkpoint);

    auto truncated = bytes;
    truncated.resize(bytes.size() - 9);
    binary::write_file(dir / "c.ckpt", truncated);
    EXPECT_EQ(load_error(dir / "c.ckpt"), ErrorCode::corrupt_checkpoint);

    auto extended = bytes;
    extended.insert(extended.end() - 4, {0, 0, 0, 0});
    binary::write_file(dir / "d.ckpt", extended);
    EXPECT_EQ(load_error(dir / "d.ckpt"), ErrorCode::corrupt_checkpoint);

    auto bad_json = bytes;
    bad_json[9] = '[';
    binary::write_file(dir / "e.ckpt", bad_json);
    EXPECT_EQ(load_error(dir / "e.ckpt"), ErrorCode::corrupt_checkpoint);

    EXPECT_EQ(load_error(dir / "missing.ckpt"), ErrorCode::io);
}

TEST(Checkpoint, Crc32KnownValue) {
    const std::string s = "123456789";
    EXPECT_EQ(crc32({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}), 0xCBF43926u);
}
