#ifndef DEPT_FGPEM_HPP
#define DEPT_FGPEM_HPP

#include "dept/preprocess.hpp"
#include "dept/raster.hpp"
#include "dept/tracing.hpp"

#include <filesystem>
#include <vector>

namespace dept {

/// The four annotation points: topmost, bottommost, leftmost, rightmost.
struct ExtremePoints {
    PointRC top;
    PointRC bottom;
    PointRC left;
    PointRC right;

    friend bool operator==(const ExtremePoints& a, const ExtremePoints& b) {
        return a.top == b.top && a.bottom == b.bottom && a.left == b.left && a.right == b.right;
    }
};

/// Closed 8-connected chain; the last point connects back to the first.
struct Contour {
    std::vector<PointRC> points;
};

struct FgpemOptions {
    double scale = 0.5;               // downsample factor in (0,1]
    double epsilon = 1e-5;            // cost matrix epsilon
    bool normalize = true;            // max-normalize gradient magnitude
    bool use_straight_baseline = false; // straight-line segments instead of min-cost paths
};

/// Extracts the four extreme foreground pixels. Ties: top -> minimal col,
/// bottom -> maximal col, left -> minimal row, right -> maximal row.
/// Throws on an empty mask.
ExtremePoints extract_extreme_points(const Mask& mask);

/// Connects the four segment paths top->left->bottom->right->top
/// (counterclockwise) and drops duplicated junction pixels.
Contour trace_contour(const CostMatrix& cost, const ExtremePoints& pts, bool straight);

/// Contour pixels become foreground; the background is flood-filled
/// 4-connectedly from every border pixel not on the contour, and everything
/// the flood does not reach is foreground.
Mask fill_contour(const Contour& contour, int width, int height);

/// The full pipeline: optional CLAHE, downsample to opts.scale (points scaled
/// by the same factor with rounding, clamped in-bounds), Sobel gradient, cost
/// matrix, contour trace, interior fill, bilinear upsample back to the source
/// resolution, threshold at 0.5.
Mask fgpem_generate(const Raster& source, const ExtremePoints& pts, const FgpemOptions& opts,
                    bool apply_clahe, const ClaheParams& clahe_params = {});

/// fgpem_generate on the raw image with CLAHE enabled.
Mask initial_pseudo_label(const GrayImage& img, const ExtremePoints& pts, const FgpemOptions& opts,
                          const ClaheParams& clahe_params = {});

/// Counts 8-connected foreground components.
int count_components(const Mask& mask);

// Extreme points JSON document:
//   {"top":[r,c],"bottom":[r,c],"left":[r,c],"right":[r,c]}
// with zero-based integer row/col. The writer adds "multi_component": true
// when the source mask had more than one foreground component.

ExtremePoints read_points_json(const std::filesystem::path& path);
void write_points_json(const ExtremePoints& pts, const std::filesystem::path& path,
                       bool multi_component = false);

} // namespace dept

#endif
