#include "dept/raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dept {

Raster::Raster(int w, int h, float fill)
    : width(w), height(h), data(static_cast<size_t>(w > 0 ? w : 0) * (h > 0 ? h : 0), fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("raster dimensions must be positive");
}

Mask::Mask(int w, int h, std::uint8_t fill)
    : width(w), height(h), data(static_cast<size_t>(w > 0 ? w : 0) * (h > 0 ? h : 0), fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("mask dimensions must be positive");
}

void require_finite(const Raster& raster, const char* what) {
    for (float v : raster.data) {
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
}

void require_unit_range(const Raster& raster, const char* what) {
    for (float v : raster.data) {
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
            throw std::invalid_argument(std::string(what) + ": value outside [0,1]");
    }
}

Raster resize_bilinear(const Raster& input, int out_width, int out_height) {
    if (out_width <= 0 || out_height <= 0)
        throw std::invalid_argument("resize_bilinear: output dimensions must be positive");
    if (input.width <= 0 || input.height <= 0)
        throw std::invalid_argument("resize_bilinear: empty input");

    if (out_width == input.width && out_height == input.height) return input;

    Raster out(out_width, out_height);
    const double sx = static_cast<double>(input.width) / out_width;
    const double sy = static_cast<double>(input.height) / out_height;

    for (int r = 0; r < out_height; ++r) {
        const double y = (r + 0.5) * sy - 0.5;
        const int y0 = static_cast<int>(std::floor(y));
        const double fy = y - y0;
        const int yl = std::clamp(y0, 0, input.height - 1);
        const int yh = std::clamp(y0 + 1, 0, input.height - 1);
        for (int c = 0; c < out_width; ++c) {
            const double x = (c + 0.5) * sx - 0.5;
            const int x0 = static_cast<int>(std::floor(x));
            const double fx = x - x0;
            const int xl = std::clamp(x0, 0, input.width - 1);
            const int xh = std::clamp(x0 + 1, 0, input.width - 1);

            const double top = (1.0 - fx) * input.at(yl, xl) + fx * input.at(yl, xh);
            const double bot = (1.0 - fx) * input.at(yh, xl) + fx * input.at(yh, xh);
            out.at(r, c) = static_cast<float>((1.0 - fy) * top + fy * bot);
        }
    }
    return out;
}

Mask threshold_mask(const Raster& raster, float threshold) {
    Mask out(raster.width, raster.height);
    for (size_t i = 0; i < raster.data.size(); ++i)
        out.data[i] = raster.data[i] >= threshold ? 1 : 0;
    return out;
}

Raster mask_to_raster(const Mask& mask) {
    Raster out(mask.width, mask.height);
    for (size_t i = 0; i < mask.data.size(); ++i)
        out.data[i] = mask.data[i] ? 1.0f : 0.0f;
    return out;
}

} // namespace dept
