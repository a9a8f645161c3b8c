#include "dept/raster_io.hpp"

#include <png.h>
#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace dept {

namespace {

constexpr char kF32Magic[8] = {'D', 'E', 'P', 'T', 'F', '3', '2', '\0'};

void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t read_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

enum class FileKind { png, pgm };

FileKind sniff_kind(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() == 2 && magic[0] == 'P' && magic[1] == '5') return FileKind::pgm;
    if (in.gcount() == 2 && static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P')
        return FileKind::png;
    throw std::runtime_error("unsupported image format: " + path.string());
}

std::vector<std::uint8_t> read_png_gray8(const fs::path& path, int& width, int& height) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;

    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw std::runtime_error("unreadable PNG: " + path.string() + ": " + image.message);

    // The recorded format reflects the file; reject anything but 8-bit gray.
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw std::runtime_error("unsupported bit depth (16-bit) in " + path.string());
    }
    if (image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA)) {
        png_image_free(&image);
        throw std::runtime_error("unsupported PNG format (expected 8-bit grayscale): " + path.string());
    }

    image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw std::runtime_error("unreadable PNG: " + path.string() + ": " + msg);
    }
    width = static_cast<int>(image.width);
    height = static_cast<int>(image.height);
    return buffer;
}

std::vector<std::uint8_t> read_pgm_gray8(const fs::path& path, int& width, int& height) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());

    auto next_token = [&in, &path]() -> std::string {
        std::string tok;
        int ch;
        while ((ch = in.get()) != EOF) {
            if (ch == '#') { // comment to end of line
                while ((ch = in.get()) != EOF && ch != '\n') {}
                continue;
            }
            if (std::isspace(ch)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(ch));
        }
        if (tok.empty()) throw std::runtime_error("truncated PGM header: " + path.string());
        return tok;
    };

    if (next_token() != "P5") throw std::runtime_error("not a P5 PGM: " + path.string());
    const long w = std::stol(next_token());
    const long h = std::stol(next_token());
    const long maxval = std::stol(next_token());
    if (w <= 0 || h <= 0) throw std::runtime_error("bad PGM dimensions: " + path.string());
    if (maxval != 255) throw std::runtime_error("unsupported bit depth (maxval != 255) in " + path.string());

    std::vector<std::uint8_t> buffer(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    if (static_cast<size_t>(in.gcount()) != buffer.size())
        throw std::runtime_error("truncated PGM payload: " + path.string());
    width = static_cast<int>(w);
    height = static_cast<int>(h);
    return buffer;
}

std::vector<std::uint8_t> read_gray8(const fs::path& path, int& width, int& height) {
    return sniff_kind(path) == FileKind::pgm ? read_pgm_gray8(path, width, height)
                                             : read_png_gray8(path, width, height);
}

void write_png_gray8(const std::vector<std::uint8_t>& bytes, int width, int height,
                     const fs::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr))
        throw std::runtime_error("cannot write PNG: " + path.string() + ": " + image.message);
}

void write_pgm_gray8(const std::vector<std::uint8_t>& bytes, int width, int height,
                     const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write PGM: " + path.string());
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write PGM payload: " + path.string());
}

std::vector<std::uint8_t> mask_bytes(const Mask& mask) {
    std::vector<std::uint8_t> bytes(mask.pixel_count());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    return bytes;
}

} // namespace

GrayImage read_gray_image(const fs::path& path) {
    int w = 0, h = 0;
    const auto bytes = read_gray8(path, w, h);
    GrayImage img(w, h);
    for (size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i] / 255.0f;
    return img;
}

Mask read_mask(const fs::path& path) {
    int w = 0, h = 0;
    const auto bytes = read_gray8(path, w, h);
    Mask mask(w, h);
    for (size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] != 0 && bytes[i] != 255)
            throw std::runtime_error("non-binary mask (pixel value " + std::to_string(bytes[i]) +
                                     ") in " + path.string());
        mask.data[i] = bytes[i] ? 1 : 0;
    }
    return mask;
}

void write_mask(const Mask& mask, const fs::path& path) {
    const auto bytes = mask_bytes(mask);
    if (path.extension() == ".pgm")
        write_pgm_gray8(bytes, mask.width, mask.height, path);
    else
        write_png_gray8(bytes, mask.width, mask.height, path);
}

void write_mask_atomic(const Mask& mask, const fs::path& path) {
    fs::path tmp = path;
    tmp += ".tmp";
    write_mask(mask, tmp);
    fs::rename(tmp, path);
}

void write_gray_png(const GrayImage& img, const fs::path& path) {
    std::vector<std::uint8_t> bytes(img.pixel_count());
    for (size_t i = 0; i < bytes.size(); ++i) {
        const float v = std::clamp(img.data[i], 0.0f, 1.0f);
        bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    write_png_gray8(bytes, img.width, img.height, path);
}

void write_rgb_png(const std::vector<std::uint8_t>& rgb, int width, int height,
                   const fs::path& path) {
    if (rgb.size() != static_cast<size_t>(width) * height * 3)
        throw std::invalid_argument("write_rgb_png: buffer size mismatch");
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, rgb.data(), 0, nullptr))
        throw std::runtime_error("cannot write PNG: " + path.string() + ": " + image.message);
}

void write_f32_raster(const Raster& raster, const fs::path& path) {
    require_finite(raster, "write_f32_raster");
    std::vector<std::uint8_t> bytes;
    bytes.reserve(16 + raster.pixel_count() * 4);
    bytes.insert(bytes.end(), kF32Magic, kF32Magic + 8);
    append_u32_le(bytes, static_cast<std::uint32_t>(raster.width));
    append_u32_le(bytes, static_cast<std::uint32_t>(raster.height));
    for (float v : raster.data) append_u32_le(bytes, std::bit_cast<std::uint32_t>(v));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write f32 raster: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write f32 raster payload: " + path.string());
}

FeatureMap read_f32_raster(const fs::path& path) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() < 16) throw std::runtime_error("short f32 raster file: " + path.string());
    if (std::memcmp(bytes.data(), kF32Magic, 8) != 0)
        throw std::runtime_error("bad magic in f32 raster file: " + path.string());
    const std::uint32_t w = read_u32_le(bytes.data() + 8);
    const std::uint32_t h = read_u32_le(bytes.data() + 12);
    if (w == 0 || h == 0) throw std::runtime_error("zero dimension in f32 raster file: " + path.string());
    const size_t expected = 16 + static_cast<size_t>(w) * h * 4;
    if (bytes.size() != expected)
        throw std::runtime_error("size mismatch in f32 raster file (header says " +
                                 std::to_string(expected) + " bytes, file has " +
                                 std::to_string(bytes.size()) + "): " + path.string());

    FeatureMap fm(static_cast<int>(w), static_cast<int>(h));
    for (size_t i = 0; i < fm.data.size(); ++i)
        fm.data[i] = std::bit_cast<float>(read_u32_le(bytes.data() + 16 + i * 4));
    require_finite(fm, "read_f32_raster");
    return fm;
}

void atomic_write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    const auto size = static_cast<size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::uint8_t> bytes(size);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (static_cast<size_t>(in.gcount()) != size)
        throw std::runtime_error("short read: " + path.string());
    return bytes;
}

std::string crc32_hex(const std::vector<std::uint8_t>& bytes) {
    const auto crc = ::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size()));
    char buf[20];
    std::snprintf(buf, sizeof(buf), "crc32:%08lx", static_cast<unsigned long>(crc));
    return buf;
}

} // namespace dept
