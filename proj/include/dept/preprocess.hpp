#ifndef DEPT_PREPROCESS_HPP
#define DEPT_PREPROCESS_HPP

#include "dept/raster.hpp"

#include <vector>

namespace dept {

struct ClaheParams {
    double clip_limit = 2.0;
    int tiles_x = 8;
    int tiles_y = 8;
};

/// Contrast Limited Adaptive Histogram Equalization over 256-bin tile
/// histograms. Each histogram is clipped at clip_limit * (tile pixels / 256)
/// and the clipped mass is redistributed uniformly over all bins; each pixel
/// is remapped through the bilinear blend of its four nearest tile CDFs.
/// Images smaller than one tile cell fall back to a single tile.
GrayImage clahe(const GrayImage& img, const ClaheParams& params = {});

/// Per-pixel Sobel responses. magnitude[p] == sqrt(gx[p]^2 + gy[p]^2).
struct GradientMap {
    int width = 0;
    int height = 0;
    std::vector<float> gx;
    std::vector<float> gy;
    std::vector<float> magnitude;
};

/// 3x3 Sobel with replicate border padding.
/// gx kernel [[-1,0,1],[-2,0,2],[-1,0,1]], gy its transpose.
GradientMap sobel_gradient(const Raster& raster);

/// Per-pixel traversal cost, strictly positive, at most 1/epsilon.
struct CostMatrix {
    int width = 0;
    int height = 0;
    std::vector<double> cost;
    double epsilon = 1e-5;
    bool normalized = true;

    double at(int r, int c) const { return cost[static_cast<size_t>(r) * width + c]; }
    bool in_bounds(PointRC p) const {
        return p.row >= 0 && p.row < height && p.col >= 0 && p.col < width;
    }
};

/// cost[p] = 1 / (m[p] + epsilon). When normalize is set and the gradient is
/// not identically zero, the magnitude is first divided by its maximum.
CostMatrix build_cost_matrix(const GradientMap& grad, double epsilon = 1e-5, bool normalize = true);

} // namespace dept

#endif
