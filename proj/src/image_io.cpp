#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

// jpeglib.h needs FILE and size_t declared first
#include <jpeglib.h>

#include "xray/error.hpp"
#include "xray/image.hpp"

namespace xray {

namespace {

enum class FileKind { png, jpeg, unknown };

FileKind sniff(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::missing_file, "cannot open image " + path.string());
    std::array<unsigned char, 8> head{};
    in.read(reinterpret_cast<char*>(head.data()), head.size());
    const auto n = static_cast<std::size_t>(in.gcount());
    static constexpr std::array<unsigned char, 8> png_sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (n == 8 && head == png_sig) return FileKind::png;
    if (n >= 3 && head[0] == 0xff && head[1] == 0xd8 && head[2] == 0xff) return FileKind::jpeg;
    return FileKind::unknown;
}

GrayImage from_samples(std::size_t width, std::size_t height, int channels, const unsigned char* data) {
    GrayImage image(width, height);
    for (std::size_t i = 0; i < width * height; ++i) {
        const unsigned char* px = data + i * static_cast<std::size_t>(channels);
        image.pixels[i] = channels == 1 ? px[0] : luminance(px[0], px[1], px[2]);
    }
    return image;
}

GrayImage decode_png(const std::filesystem::path& path) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str())) {
        throw Error(ErrorCode::corrupt_image, "corrupt PNG " + path.string() + ": " + img.message);
    }
    const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int channels = color ? 3 : 1;
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
        const std::string message = img.message;
        png_image_free(&img);
        throw Error(ErrorCode::corrupt_image, "corrupt PNG " + path.string() + ": " + message);
    }
    return from_samples(img.width, img.height, channels, buffer.data());
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void jpeg_silence(j_common_ptr) {}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Decodes into `out`; returns false with the library message on failure.
// Kept free of objects with destructors between setjmp and longjmp.
bool decode_jpeg_raw(std::FILE* file, std::vector<unsigned char>& out, std::size_t& width, std::size_t& height,
                     int& channels, char* message) {
    jpeg_decompress_struct cinfo;
    JpegErrorManager err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    err.base.output_message = jpeg_silence;
    if (setjmp(err.jump)) {
        std::strcpy(message, err.message);
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file);
    jpeg_read_header(&cinfo, TRUE);
    if (cinfo.jpeg_color_space != JCS_GRAYSCALE) cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = cinfo.output_width;
    height = cinfo.output_height;
    channels = cinfo.output_components;
    out.resize(width * height * static_cast<std::size_t>(channels));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * channels;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

GrayImage decode_jpeg(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw Error(ErrorCode::missing_file, "cannot open image " + path.string());
    std::vector<unsigned char> samples;
    std::size_t width = 0, height = 0;
    int channels = 0;
    char message[JMSG_LENGTH_MAX] = {0};
    if (!decode_jpeg_raw(file.get(), samples, width, height, channels, message)) {
        throw Error(ErrorCode::corrupt_image, "corrupt JPEG " + path.string() + ": " + message);
    }
    if (channels != 1 && channels != 3) {
        throw Error(ErrorCode::unsupported_format, "JPEG with " + std::to_string(channels) + " components: " +
                                                       path.string());
    }
    return from_samples(width, height, channels, samples.data());
}

bool encode_jpeg_raw(std::FILE* file, std::size_t width, std::size_t height, int channels,
                     const unsigned char* samples, int quality, char* message) {
    jpeg_compress_struct cinfo;
    JpegErrorManager err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        std::strcpy(message, err.message);
        jpeg_destroy_compress(&cinfo);
        return false;
    }
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, file);
    cinfo.image_width = static_cast<JDIMENSION>(width);
    cinfo.image_height = static_cast<JDIMENSION>(height);
    cinfo.input_components = channels;
    cinfo.in_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        auto row = const_cast<JSAMPROW>(samples + static_cast<std::size_t>(cinfo.next_scanline) * width * channels);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    return true;
}

void check_samples(std::size_t width, std::size_t height, int channels, std::size_t count) {
    if (channels != 1 && channels != 3) throw Error(ErrorCode::usage, "only 1- or 3-channel images can be written");
    if (width == 0 || height == 0 || count != width * height * static_cast<std::size_t>(channels)) {
        throw Error(ErrorCode::shape, "sample buffer does not match image dimensions");
    }
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorCode::missing_file, "image not found: " + path.string());
    }
    switch (sniff(path)) {
    case FileKind::png: return decode_png(path);
    case FileKind::jpeg: return decode_jpeg(path);
    case FileKind::unknown: break;
    }
    throw Error(ErrorCode::unsupported_format, "not a PNG or JPEG file: " + path.string());
}

void write_png(const std::filesystem::path& path, std::size_t width, std::size_t height, int channels,
               std::span<const std::uint8_t> samples) {
    check_samples(width, height, channels, samples.size());
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(width);
    img.height = static_cast<png_uint_32>(height);
    img.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&img, path.c_str(), 0, samples.data(), 0, nullptr)) {
        const std::string message = img.message;
        png_image_free(&img);
        throw Error(ErrorCode::io, "cannot write PNG " + path.string() + ": " + message);
    }
}

void write_jpeg(const std::filesystem::path& path, std::size_t width, std::size_t height, int channels,
                std::span<const std::uint8_t> samples, int quality) {
    check_samples(width, height, channels, samples.size());
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw Error(ErrorCode::io, "cannot create " + path.string());
    char message[JMSG_LENGTH_MAX] = {0};
    if (!encode_jpeg_raw(file.get(), width, height, channels, samples.data(), quality, message)) {
        throw Error(ErrorCode::io, "cannot write JPEG " + path.string() + ": " + message);
    }
}

void save_png(const GrayImage& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(image.pixels.size());
    std::transform(image.pixels.begin(), image.pixels.end(), bytes.begin(), [](float p) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(p), 0L, 255L));
    });
    write_png(path, image.width, image.height, 1, bytes);
}

}  // namespace xray
