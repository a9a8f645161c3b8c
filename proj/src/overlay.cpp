#include "dept/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dept {

Mask mask_boundary(const Mask& mask) {
    Mask out(mask.width, mask.height);
    auto bg = [&](int r, int c) {
        return r < 0 || r >= mask.height || c < 0 || c >= mask.width || !mask.at(r, c);
    };
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            if (!mask.at(r, c)) continue;
            if (bg(r - 1, c) || bg(r + 1, c) || bg(r, c - 1) || bg(r, c + 1)) out.at(r, c) = 1;
        }
    }
    return out;
}

std::vector<std::uint8_t> render_overlay(const GrayImage& img, const Mask& label,
                                         const Mask* ground_truth) {
    if (img.width != label.width || img.height != label.height)
        throw std::invalid_argument("render_overlay: label dimensions differ from image");
    if (ground_truth &&
        (ground_truth->width != img.width || ground_truth->height != img.height))
        throw std::invalid_argument("render_overlay: ground truth dimensions differ from image");

    std::vector<std::uint8_t> rgb(img.pixel_count() * 3);
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        const float v = std::clamp(img.data[i], 0.0f, 1.0f);
        const auto g = static_cast<std::uint8_t>(std::lround(v * 255.0f));
        rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = g;
    }

    auto paint = [&rgb](const Mask& boundary, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        for (size_t i = 0; i < boundary.data.size(); ++i) {
            if (!boundary.data[i]) continue;
            rgb[3 * i] = r;
            rgb[3 * i + 1] = g;
            rgb[3 * i + 2] = b;
        }
    };
    if (ground_truth) paint(mask_boundary(*ground_truth), 0, 255, 0);
    paint(mask_boundary(label), 255, 0, 0);
    return rgb;
}

} // namespace dept
