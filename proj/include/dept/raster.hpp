#ifndef DEPT_RASTER_HPP
#define DEPT_RASTER_HPP

#include <cstdint>
#include <vector>

namespace dept {

/// Pixel coordinate, (row, col) with origin at the top-left.
struct PointRC {
    int row = 0;
    int col = 0;

    friend bool operator==(const PointRC& a, const PointRC& b) {
        return a.row == b.row && a.col == b.col;
    }
    friend bool operator!=(const PointRC& a, const PointRC& b) { return !(a == b); }
    friend bool operator<(const PointRC& a, const PointRC& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    }
};

/// Single-channel real-valued raster, row-major storage.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    Raster() = default;
    Raster(int w, int h, float fill = 0.0f);

    float at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
    float& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool in_bounds(PointRC p) const {
        return p.row >= 0 && p.row < height && p.col >= 0 && p.col < width;
    }
    bool same_size(const Raster& other) const {
        return width == other.width && height == other.height;
    }
};

/// Grayscale image, values in [0,1]. 8-bit loaders normalize by 255.
struct GrayImage : Raster {
    using Raster::Raster;
};

/// Pre-sigmoid network output or any finite-valued single-channel map.
struct FeatureMap : Raster {
    using Raster::Raster;
};

/// Binary mask, values exactly 0 or 1.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Mask() = default;
    Mask(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
    std::uint8_t& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool in_bounds(PointRC p) const {
        return p.row >= 0 && p.row < height && p.col >= 0 && p.col < width;
    }

    friend bool operator==(const Mask& a, const Mask& b) {
        return a.width == b.width && a.height == b.height && a.data == b.data;
    }
};

/// Throws std::invalid_argument if any value is NaN or infinite.
void require_finite(const Raster& raster, const char* what);

/// Throws std::invalid_argument if any value is outside [0,1] or non-finite.
void require_unit_range(const Raster& raster, const char* what);

/// Resample with pixel-center alignment: output sample (r,c) reads input
/// coordinate ((r+0.5)*h_in/h_out - 0.5, (c+0.5)*w_in/w_out - 0.5), clamped
/// to the borders. Output values are convex combinations of input values.
Raster resize_bilinear(const Raster& input, int out_width, int out_height);

/// 1 where value >= threshold, else 0.
Mask threshold_mask(const Raster& raster, float threshold);

/// Mask viewed as a 0/1-valued raster.
Raster mask_to_raster(const Mask& mask);

} // namespace dept

#endif
