#ifndef DEPT_RASTER_IO_HPP
#define DEPT_RASTER_IO_HPP

#include "dept/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dept {

// Readers accept 8-bit grayscale PNG and binary PGM (P5, maxval 255),
// detected by file magic. 8-bit values map to [0,1] by v/255.

GrayImage read_gray_image(const std::filesystem::path& path);

/// Reads a binary mask. Every pixel must be 0 or 255; throws "non-binary mask"
/// otherwise. Values map to {0,1}.
Mask read_mask(const std::filesystem::path& path);

/// Writes a mask as {0,255}. Format chosen by extension (.pgm -> PGM, else PNG).
void write_mask(const Mask& mask, const std::filesystem::path& path);

/// Like write_mask but goes through a temp file in the same directory followed
/// by an atomic rename, so readers never observe a partial file.
void write_mask_atomic(const Mask& mask, const std::filesystem::path& path);

void write_gray_png(const GrayImage& img, const std::filesystem::path& path);

/// Interleaved RGB, row-major, 3 bytes per pixel.
void write_rgb_png(const std::vector<std::uint8_t>& rgb, int width, int height,
                   const std::filesystem::path& path);

// ".f32r" raster interchange format: 8-byte magic "DEPTF32\0", u32 LE width,
// u32 LE height, then width*height IEEE-754 binary32 LE values, row-major.
// Write/read round-trips any finite raster bit-exactly.

void write_f32_raster(const Raster& raster, const std::filesystem::path& path);
FeatureMap read_f32_raster(const std::filesystem::path& path);

/// Writes bytes to path via temp file + rename in the same directory.
void atomic_write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// CRC-32 of a byte buffer, rendered as "crc32:xxxxxxxx".
std::string crc32_hex(const std::vector<std::uint8_t>& bytes);

} // namespace dept

#endif
