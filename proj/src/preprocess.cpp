#include "dept/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace dept {

namespace {

constexpr int kBins = 256;

int value_to_bin(float v) {
    return std::clamp(static_cast<int>(std::lround(v * 255.0f)), 0, 255);
}

// Clip the histogram at clip_limit * (pixels/256) and spread the excess
// uniformly, then return the CDF normalized to [0,1].
std::array<double, kBins> clipped_cdf(const std::array<double, kBins>& hist, double pixels,
                                      double clip_limit) {
    const double clip = clip_limit * pixels / kBins;
    std::array<double, kBins> clipped{};
    double excess = 0.0;
    for (int b = 0; b < kBins; ++b) {
        clipped[b] = std::min(hist[b], clip);
        excess += hist[b] - clipped[b];
    }
    const double share = excess / kBins;
    double cum = 0.0;
    std::array<double, kBins> cdf{};
    for (int b = 0; b < kBins; ++b) {
        cum += clipped[b] + share;
        cdf[b] = cum / pixels;
    }
    return cdf;
}

struct TileGrid {
    int tiles_x = 1;
    int tiles_y = 1;
    std::vector<int> col_start, col_end; // [tiles_x]
    std::vector<int> row_start, row_end; // [tiles_y]
    std::vector<double> center_x, center_y;
};

TileGrid make_tile_grid(int width, int height, int tiles_x, int tiles_y) {
    TileGrid g;
    g.tiles_x = tiles_x;
    g.tiles_y = tiles_y;
    g.col_start.resize(tiles_x);
    g.col_end.resize(tiles_x);
    g.center_x.resize(tiles_x);
    for (int i = 0; i < tiles_x; ++i) {
        g.col_start[i] = static_cast<int>(static_cast<long>(i) * width / tiles_x);
        g.col_end[i] = static_cast<int>(static_cast<long>(i + 1) * width / tiles_x);
        g.center_x[i] = (g.col_start[i] + g.col_end[i]) / 2.0 - 0.5;
    }
    g.row_start.resize(tiles_y);
    g.row_end.resize(tiles_y);
    g.center_y.resize(tiles_y);
    for (int j = 0; j < tiles_y; ++j) {
        g.row_start[j] = static_cast<int>(static_cast<long>(j) * height / tiles_y);
        g.row_end[j] = static_cast<int>(static_cast<long>(j + 1) * height / tiles_y);
        g.center_y[j] = (g.row_start[j] + g.row_end[j]) / 2.0 - 0.5;
    }
    return g;
}

// Index of the lower tile plus the interpolation weight toward the next one,
// clamped to pure lower/upper tile beyond the outermost centers.
void tile_weight(const std::vector<double>& centers, double coord, int& lo, double& w) {
    const int n = static_cast<int>(centers.size());
    if (n == 1 || coord <= centers[0]) {
        lo = 0;
        w = 0.0;
        return;
    }
    if (coord >= centers[n - 1]) {
        lo = n - 1;
        w = 0.0;
        return;
    }
    lo = 0;
    while (lo + 1 < n && centers[lo + 1] <= coord) ++lo;
    w = (coord - centers[lo]) / (centers[lo + 1] - centers[lo]);
}

} // namespace

GrayImage clahe(const GrayImage& img, const ClaheParams& params) {
    if (params.clip_limit <= 0.0) throw std::invalid_argument("clahe: clip_limit must be positive");
    if (params.tiles_x < 1 || params.tiles_y < 1)
        throw std::invalid_argument("clahe: tile counts must be >= 1");
    if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("clahe: empty image");

    int tiles_x = params.tiles_x;
    int tiles_y = params.tiles_y;
    if (img.width < tiles_x || img.height < tiles_y) {
        tiles_x = 1;
        tiles_y = 1;
    }

    const TileGrid grid = make_tile_grid(img.width, img.height, tiles_x, tiles_y);

    // Per-tile clipped CDFs.
    std::vector<std::array<double, kBins>> cdfs(static_cast<size_t>(tiles_x) * tiles_y);
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            std::array<double, kBins> hist{};
            for (int r = grid.row_start[ty]; r < grid.row_end[ty]; ++r)
                for (int c = grid.col_start[tx]; c < grid.col_end[tx]; ++c)
                    hist[value_to_bin(img.at(r, c))] += 1.0;
            const double pixels = static_cast<double>(grid.row_end[ty] - grid.row_start[ty]) *
                                  (grid.col_end[tx] - grid.col_start[tx]);
            cdfs[static_cast<size_t>(ty) * tiles_x + tx] =
                clipped_cdf(hist, pixels, params.clip_limit);
        }
    }

    // Per-column and per-row interpolation tables.
    std::vector<int> col_lo(img.width);
    std::vector<double> col_w(img.width);
    for (int c = 0; c < img.width; ++c) tile_weight(grid.center_x, c, col_lo[c], col_w[c]);
    std::vector<int> row_lo(img.height);
    std::vector<double> row_w(img.height);
    for (int r = 0; r < img.height; ++r) tile_weight(grid.center_y, r, row_lo[r], row_w[r]);

    GrayImage out(img.width, img.height);
    for (int r = 0; r < img.height; ++r) {
        const int ty0 = row_lo[r];
        const int ty1 = std::min(ty0 + 1, tiles_y - 1);
        const double wy = row_w[r];
        for (int c = 0; c < img.width; ++c) {
            const int tx0 = col_lo[c];
            const int tx1 = std::min(tx0 + 1, tiles_x - 1);
            const double wx = col_w[c];
            const int bin = value_to_bin(img.at(r, c));

            const double m00 = cdfs[static_cast<size_t>(ty0) * tiles_x + tx0][bin];
            const double m01 = cdfs[static_cast<size_t>(ty0) * tiles_x + tx1][bin];
            const double m10 = cdfs[static_cast<size_t>(ty1) * tiles_x + tx0][bin];
            const double m11 = cdfs[static_cast<size_t>(ty1) * tiles_x + tx1][bin];

            const double v = (1.0 - wy) * ((1.0 - wx) * m00 + wx * m01) +
                             wy * ((1.0 - wx) * m10 + wx * m11);
            out.at(r, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

GradientMap sobel_gradient(const Raster& raster) {
    if (raster.width <= 0 || raster.height <= 0)
        throw std::invalid_argument("sobel_gradient: empty raster");

    const int w = raster.width;
    const int h = raster.height;
    GradientMap grad;
    grad.width = w;
    grad.height = h;
    grad.gx.resize(raster.pixel_count());
    grad.gy.resize(raster.pixel_count());
    grad.magnitude.resize(raster.pixel_count());

    auto sample = [&](int r, int c) -> double {
        return raster.at(std::clamp(r, 0, h - 1), std::clamp(c, 0, w - 1));
    };

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double a = sample(r - 1, c - 1), b = sample(r - 1, c), d = sample(r - 1, c + 1);
            const double e = sample(r, c - 1), f = sample(r, c + 1);
            const double g = sample(r + 1, c - 1), i = sample(r + 1, c), j = sample(r + 1, c + 1);

            const double gx = (d + 2.0 * f + j) - (a + 2.0 * e + g);
            const double gy = (g + 2.0 * i + j) - (a + 2.0 * b + d);
            const size_t idx = static_cast<size_t>(r) * w + c;
            grad.gx[idx] = static_cast<float>(gx);
            grad.gy[idx] = static_cast<float>(gy);
            grad.magnitude[idx] = static_cast<float>(std::sqrt(gx * gx + gy * gy));
        }
    }
    return grad;
}

CostMatrix build_cost_matrix(const GradientMap& grad, double epsilon, bool normalize) {
    if (epsilon <= 0.0) throw std::invalid_argument("build_cost_matrix: epsilon must be positive");

    CostMatrix cm;
    cm.width = grad.width;
    cm.height = grad.height;
    cm.epsilon = epsilon;
    cm.normalized = normalize;
    cm.cost.resize(grad.magnitude.size());

    double max_mag = 0.0;
    if (normalize) {
        for (float m : grad.magnitude) max_mag = std::max(max_mag, static_cast<double>(m));
    }
    const bool scale = normalize && max_mag > 0.0;
    for (size_t i = 0; i < grad.magnitude.size(); ++i) {
        const double m = scale ? grad.magnitude[i] / max_mag : grad.magnitude[i];
        cm.cost[i] = 1.0 / (m + epsilon);
    }
    return cm;
}

} // namespace dept
