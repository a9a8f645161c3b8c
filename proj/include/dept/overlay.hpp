#ifndef DEPT_OVERLAY_HPP
#define DEPT_OVERLAY_HPP

#include "dept/raster.hpp"

#include <cstdint>
#include <vector>

namespace dept {

/// Foreground pixels with at least one background 4-neighbor; pixels outside
/// the raster count as background, so blobs touching the border keep a rim.
Mask mask_boundary(const Mask& mask);

/// Grayscale base with the label boundary in red and, when given, the ground
/// truth boundary in green (label drawn on top). Interleaved RGB, 3 bytes per
/// pixel. All inputs must share dimensions.
std::vector<std::uint8_t> render_overlay(const GrayImage& img, const Mask& label,
                                         const Mask* ground_truth = nullptr);

} // namespace dept

#endif
