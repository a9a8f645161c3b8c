#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

double urand(std::mt19937& rng) {
    return rng() * (1.0 / 4294967296.0);
}

double nrand(std::mt19937& rng) {
    double u1 = urand(rng);
    while (u1 <= 0.0) u1 = urand(rng);
    const double u2 = urand(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int irand(std::mt19937& rng, int lo, int hi) {
    return lo + static_cast<int>(urand(rng) * (hi - lo + 1.0));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Edge {
    int u, v;
    double w;
};

std::vector<Edge> grid_edges(const dept::CostMatrix& cost) {
    const double s2 = std::sqrt(2.0);
    std::vector<Edge> edges;
    for (int r = 0; r < cost.height; ++r) {
        for (int c = 0; c < cost.width; ++c) {
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int nr = r + dr;
                    const int nc = c + dc;
                    if (nr < 0 || nr >= cost.height || nc < 0 || nc >= cost.width) continue;
                    const int u = r * cost.width + c;
                    const int v = nr * cost.width + nc;
                    const double len = (dr != 0 && dc != 0) ? s2 : 1.0;
                    edges.push_back({u, v, 0.5 * (cost.cost[u] + cost.cost[v]) * len});
                }
            }
        }
    }
    return edges;
}

} // namespace

double bellman_ford_cost(const dept::CostMatrix& cost, dept::PointRC a, dept::PointRC b) {
    const int n = cost.width * cost.height;
    const std::vector<Edge> edges = grid_edges(cost);
    std::vector<double> dist(n, kInf);
    dist[a.row * cost.width + a.col] = 0.0;
    for (int round = 0; round < n - 1; ++round) {
        bool changed = false;
        for (const Edge& e : edges) {
            if (dist[e.u] + e.w < dist[e.v]) {
                dist[e.v] = dist[e.u] + e.w;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return dist[b.row * cost.width + b.col];
}

namespace {

void dfs_paths(const dept::CostMatrix& cost, int cur, int goal, std::vector<char>& used,
               double acc, double& best) {
    if (acc >= best) return;
    if (cur == goal) {
        best = acc;
        return;
    }
    const double s2 = std::sqrt(2.0);
    const int r = cur / cost.width;
    const int c = cur % cost.width;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int nr = r + dr;
            const int nc = c + dc;
            if (nr < 0 || nr >= cost.height || nc < 0 || nc >= cost.width) continue;
            const int nxt = nr * cost.width + nc;
            if (used[nxt]) continue;
            const double len = (dr != 0 && dc != 0) ? s2 : 1.0;
            used[nxt] = 1;
            dfs_paths(cost, nxt, goal, used, acc + 0.5 * (cost.cost[cur] + cost.cost[nxt]) * len,
                      best);
            used[nxt] = 0;
        }
    }
}

} // namespace

double exhaustive_min_cost(const dept::CostMatrix& cost, dept::PointRC a, dept::PointRC b) {
    std::vector<char> used(static_cast<size_t>(cost.width) * cost.height, 0);
    const int start = a.row * cost.width + a.col;
    used[start] = 1;
    double best = kInf;
    dfs_paths(cost, start, b.row * cost.width + b.col, used, 0.0, best);
    return best;
}

dept::Mask ray_cast_fill(const std::vector<dept::PointRC>& contour, int width, int height) {
    dept::Mask mask(width, height);
    std::vector<char> on(static_cast<size_t>(width) * height, 0);
    for (const dept::PointRC& p : contour) on[static_cast<size_t>(p.row) * width + p.col] = 1;

    const size_t n = contour.size();
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const size_t idx = static_cast<size_t>(r) * width + c;
            if (on[idx]) {
                mask.data[idx] = 1;
                continue;
            }
            // Count polygon edges crossing the rightward ray from (r,c).
            // For a unit edge the crossing column is the upper endpoint's
            // column under the half-open row rule, so all math is integral.
            int crossings = 0;
            for (size_t i = 0; i < n; ++i) {
                const dept::PointRC& p = contour[i];
                const dept::PointRC& q = contour[(i + 1) % n];
                if (p.row == q.row) continue;
                const dept::PointRC& upper = p.row < q.row ? p : q;
                if (upper.row == r && upper.col > c) ++crossings;
            }
            mask.data[idx] = static_cast<std::uint8_t>(crossings % 2);
        }
    }
    return mask;
}

dept::GrayImage reference_clahe(const dept::GrayImage& img, double clip_limit, int tiles_x,
                                int tiles_y) {
    const int w = img.width;
    const int h = img.height;
    if (w < tiles_x || h < tiles_y) {
        tiles_x = 1;
        tiles_y = 1;
    }

    auto tile_col_lo = [&](int tx) { return tx * w / tiles_x; };
    auto tile_col_hi = [&](int tx) { return (tx + 1) * w / tiles_x; };
    auto tile_row_lo = [&](int ty) { return ty * h / tiles_y; };
    auto tile_row_hi = [&](int ty) { return (ty + 1) * h / tiles_y; };

    auto bin_of = [](float v) {
        int b = static_cast<int>(std::lround(v * 255.0f));
        return std::clamp(b, 0, 255);
    };

    std::vector<std::array<double, 256>> maps(static_cast<size_t>(tiles_x) * tiles_y);
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            std::array<double, 256> hist{};
            int count = 0;
            for (int r = tile_row_lo(ty); r < tile_row_hi(ty); ++r) {
                for (int c = tile_col_lo(tx); c < tile_col_hi(tx); ++c) {
                    hist[bin_of(img.at(r, c))] += 1.0;
                    ++count;
                }
            }
            const double clip = clip_limit * count / 256.0;
            double excess = 0.0;
            for (double& v : hist) {
                if (v > clip) {
                    excess += v - clip;
                    v = clip;
                }
            }
            for (double& v : hist) v += excess / 256.0;
            double cum = 0.0;
            auto& m = maps[static_cast<size_t>(ty) * tiles_x + tx];
            for (int b = 0; b < 256; ++b) {
                cum += hist[b];
                m[b] = cum / count;
            }
        }
    }

    auto center_col = [&](int tx) { return (tile_col_lo(tx) + tile_col_hi(tx)) / 2.0 - 0.5; };
    auto center_row = [&](int ty) { return (tile_row_lo(ty) + tile_row_hi(ty)) / 2.0 - 0.5; };

    dept::GrayImage out(w, h);
    for (int r = 0; r < h; ++r) {
        int ty0 = 0;
        while (ty0 + 1 < tiles_y && center_row(ty0 + 1) <= r) ++ty0;
        int ty1 = ty0 + 1 < tiles_y ? ty0 + 1 : ty0;
        double wy = 0.0;
        if (r > center_row(ty0) && ty1 != ty0)
            wy = (r - center_row(ty0)) / (center_row(ty1) - center_row(ty0));
        wy = std::clamp(wy, 0.0, 1.0);
        for (int c = 0; c < w; ++c) {
            int tx0 = 0;
            while (tx0 + 1 < tiles_x && center_col(tx0 + 1) <= c) ++tx0;
            int tx1 = tx0 + 1 < tiles_x ? tx0 + 1 : tx0;
            double wx = 0.0;
            if (c > center_col(tx0) && tx1 != tx0)
                wx = (c - center_col(tx0)) / (center_col(tx1) - center_col(tx0));
            wx = std::clamp(wx, 0.0, 1.0);

            const int b = bin_of(img.at(r, c));
            const double v00 = maps[static_cast<size_t>(ty0) * tiles_x + tx0][b];
            const double v01 = maps[static_cast<size_t>(ty0) * tiles_x + tx1][b];
            const double v10 = maps[static_cast<size_t>(ty1) * tiles_x + tx0][b];
            const double v11 = maps[static_cast<size_t>(ty1) * tiles_x + tx1][b];
            out.at(r, c) = static_cast<float>((1 - wy) * ((1 - wx) * v00 + wx * v01) +
                                              wy * ((1 - wx) * v10 + wx * v11));
        }
    }
    return out;
}

void reference_sobel(const dept::Raster& raster, std::vector<double>& gx, std::vector<double>& gy) {
    const int w = raster.width;
    const int h = raster.height;
    gx.assign(static_cast<size_t>(w) * h, 0.0);
    gy.assign(static_cast<size_t>(w) * h, 0.0);
    const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double sx = 0.0;
            double sy = 0.0;
            for (int i = -1; i <= 1; ++i) {
                for (int j = -1; j <= 1; ++j) {
                    const int rr = std::clamp(r + i, 0, h - 1);
                    const int cc = std::clamp(c + j, 0, w - 1);
                    sx += kx[i + 1][j + 1] * static_cast<double>(raster.at(rr, cc));
                    sy += ky[i + 1][j + 1] * static_cast<double>(raster.at(rr, cc));
                }
            }
            gx[static_cast<size_t>(r) * w + c] = sx;
            gy[static_cast<size_t>(r) * w + c] = sy;
        }
    }
}

std::vector<dept::PointRC> moore_boundary(const dept::Mask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    auto fg = [&](int r, int c) {
        return r >= 0 && r < h && c >= 0 && c < w && mask.data[static_cast<size_t>(r) * w + c] != 0;
    };

    int sr = -1, sc = -1;
    for (int r = 0; r < h && sr < 0; ++r)
        for (int c = 0; c < w; ++c)
            if (fg(r, c)) {
                sr = r;
                sc = c;
                break;
            }
    if (sr < 0) throw std::invalid_argument("moore_boundary: empty mask");

    // Clockwise Moore neighborhood starting from west.
    const int dr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    const int dc[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

    // Scan order guarantees the west neighbor of the start is background;
    // that is the initial backtrack pixel (may sit outside the raster).
    int cr = sr, cc = sc;
    int br = sr, bc = sc - 1;

    std::vector<dept::PointRC> chain;
    int first_move_r = -1, first_move_c = -1;
    const size_t guard_max = static_cast<size_t>(w) * h * 8 + 16;
    for (size_t guard = 0; guard < guard_max; ++guard) {
        int kb = -1;
        for (int k = 0; k < 8; ++k)
            if (cr + dr[k] == br && cc + dc[k] == bc) {
                kb = k;
                break;
            }
        int found = -1;
        for (int step = 1; step <= 8; ++step) {
            const int k = (kb + step) % 8;
            if (fg(cr + dr[k], cc + dc[k])) {
                found = k;
                break;
            }
        }
        if (found < 0) {
            chain.push_back({cr, cc});
            return chain; // isolated pixel
        }
        const int ncr = cr + dr[found];
        const int ncc = cc + dc[found];
        // Stop once the walk is back at the start about to repeat its first
        // move; this closes the cycle even for one-pixel-thin shapes where
        // the initial synthetic backtrack never recurs.
        if (cr == sr && cc == sc && !chain.empty() && ncr == first_move_r && ncc == first_move_c)
            return chain;
        chain.push_back({cr, cc});
        if (chain.size() == 1) {
            first_move_r = ncr;
            first_move_c = ncc;
        }
        const int prev = (found + 7) % 8;
        br = cr + dr[prev];
        bc = cc + dc[prev];
        cr = ncr;
        cc = ncc;
    }
    return chain;
}

bool is_simple_closed_chain(const std::vector<dept::PointRC>& chain, int width, int height) {
    const size_t n = chain.size();
    if (n < 4) return false;
    std::vector<int> index(static_cast<size_t>(width) * height, -1);
    for (size_t i = 0; i < n; ++i) {
        const dept::PointRC& p = chain[i];
        if (p.row < 0 || p.row >= height || p.col < 0 || p.col >= width) return false;
        const size_t idx = static_cast<size_t>(p.row) * width + p.col;
        if (index[idx] >= 0) return false; // revisited pixel
        index[idx] = static_cast<int>(i);
    }
    for (size_t i = 0; i < n; ++i) {
        const dept::PointRC& p = chain[i];
        const dept::PointRC& q = chain[(i + 1) % n];
        const int dr = std::abs(p.row - q.row);
        const int dc = std::abs(p.col - q.col);
        if (std::max(dr, dc) != 1) return false; // not a unit 8-step
    }
    // Contact locality: 8-adjacent chain pixels must be near in chain order.
    for (size_t i = 0; i < n; ++i) {
        const dept::PointRC& p = chain[i];
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const int nr = p.row + dr;
                const int nc = p.col + dc;
                if (nr < 0 || nr >= height || nc < 0 || nc >= width) continue;
                const int j = index[static_cast<size_t>(nr) * width + nc];
                if (j < 0) continue;
                const size_t d = (static_cast<size_t>(j) + n - i) % n;
                if (std::min(d, n - d) > 2) return false;
            }
        }
    }
    return true;
}

dept::Mask star_convex_blob(int size, std::mt19937& rng, double min_r, double max_r) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        const double base = 0.5 * (min_r + max_r);
        const double cy = size / 2.0 + (urand(rng) - 0.5) * size * 0.12;
        const double cx = size / 2.0 + (urand(rng) - 0.5) * size * 0.12;
        double amp[4], phase[4];
        for (int k = 0; k < 4; ++k) {
            amp[k] = 0.12 * urand(rng) / (k + 1);
            phase[k] = 2.0 * M_PI * urand(rng);
        }
        auto radius_at = [&](double theta) {
            double radius = base;
            for (int k = 0; k < 4; ++k)
                radius *= 1.0 + amp[k] * std::cos((k + 1) * theta + phase[k]);
            return radius;
        };
        bool in_range = true;
        for (int s = 0; s < 720 && in_range; ++s) {
            const double rr = radius_at(s * M_PI / 360.0);
            in_range = rr >= min_r && rr <= max_r;
        }
        if (!in_range) continue;

        dept::Mask mask(size, size);
        bool any = false;
        for (int r = 0; r < size; ++r) {
            for (int c = 0; c < size; ++c) {
                const double dy = r - cy;
                const double dx = c - cx;
                if (std::hypot(dy, dx) <= radius_at(std::atan2(dy, dx))) {
                    mask.data[static_cast<size_t>(r) * size + c] = 1;
                    any = true;
                }
            }
        }
        if (!any) continue;
        bool touches = false;
        for (int c = 0; c < size && !touches; ++c)
            touches = mask.data[c] || mask.data[static_cast<size_t>(size - 1) * size + c];
        for (int r = 0; r < size && !touches; ++r)
            touches = mask.data[static_cast<size_t>(r) * size] ||
                      mask.data[static_cast<size_t>(r) * size + size - 1];
        if (touches) continue;
        if (dept::count_components(mask) != 1) continue;
        return mask;
    }
    throw std::runtime_error("star_convex_blob: could not generate a valid shape");
}

dept::GrayImage gaussian_bump_field(int width, int height, std::mt19937& rng) {
    struct Bump {
        double cy, cx, sigma, amp;
    };
    const int count = irand(rng, 3, 6);
    std::vector<Bump> bumps;
    for (int i = 0; i < count; ++i) {
        bumps.push_back({urand(rng) * height, urand(rng) * width,
                         4.0 + urand(rng) * (std::min(width, height) / 4.0),
                         0.2 + 0.8 * urand(rng)});
    }
    dept::GrayImage img(width, height);
    double maxv = 0.0;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            double v = 0.0;
            for (const Bump& b : bumps) {
                const double d2 = (r - b.cy) * (r - b.cy) + (c - b.cx) * (c - b.cx);
                v += b.amp * std::exp(-d2 / (2.0 * b.sigma * b.sigma));
            }
            img.at(r, c) = static_cast<float>(v);
            maxv = std::max(maxv, v);
        }
    }
    if (maxv > 0.0)
        for (float& v : img.data) v = static_cast<float>(v / maxv);
    return img;
}

std::vector<double> gaussian_blur_field(const std::vector<double>& field, int width, int height,
                                        double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    std::vector<double> tmp(field.size()), out(field.size());
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * field[static_cast<size_t>(r) * width +
                                                  std::clamp(c + i, 0, width - 1)];
            tmp[static_cast<size_t>(r) * width + c] = acc;
        }
    }
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] *
                       tmp[static_cast<size_t>(std::clamp(r + i, 0, height - 1)) * width + c];
            out[static_cast<size_t>(r) * width + c] = acc;
        }
    }
    return out;
}

dept::Mask disk_mask(const DiskSpec& spec) {
    dept::Mask mask(spec.size, spec.size);
    for (int r = 0; r < spec.size; ++r)
        for (int c = 0; c < spec.size; ++c)
            if (std::hypot(r - spec.center_row, c - spec.center_col) <= spec.radius)
                mask.data[static_cast<size_t>(r) * spec.size + c] = 1;
    return mask;
}

namespace {

// Quantize to the 8-bit grid the way PNG round-trips would.
float quantize8(double v) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return static_cast<float>(std::lround(clamped * 255.0) / 255.0);
}

} // namespace

dept::GrayImage disk_image(const DiskSpec& spec, double noise_sigma, std::mt19937& rng) {
    dept::GrayImage img(spec.size, spec.size);
    for (int r = 0; r < spec.size; ++r) {
        for (int c = 0; c < spec.size; ++c) {
            const bool in = std::hypot(r - spec.center_row, c - spec.center_col) <= spec.radius;
            const double v = (in ? spec.inside : spec.outside) + noise_sigma * nrand(rng);
            img.at(r, c) = quantize8(v);
        }
    }
    return img;
}

dept::GrayImage textured_disk_image(const DiskSpec& spec, double texture_amp,
                                    double texture_sigma, double noise_sigma, std::mt19937& rng) {
    const int n = spec.size;
    std::vector<double> white(static_cast<size_t>(n) * n);
    for (double& v : white) v = nrand(rng);
    std::vector<double> tex = gaussian_blur_field(white, n, n, texture_sigma);
    double mean = 0.0;
    for (double v : tex) mean += v;
    mean /= tex.size();
    double var = 0.0;
    for (double v : tex) var += (v - mean) * (v - mean);
    const double stdev = std::sqrt(var / tex.size());
    const double gain = stdev > 0.0 ? texture_amp / stdev : 0.0;

    dept::GrayImage img(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const bool in = std::hypot(r - spec.center_row, c - spec.center_col) <= spec.radius;
            const double v = (in ? spec.inside : spec.outside) +
                             gain * (tex[static_cast<size_t>(r) * n + c] - mean) +
                             noise_sigma * nrand(rng);
            img.at(r, c) = quantize8(v);
        }
    }
    return img;
}

dept::GrayImage distractor_disk_image(const DiskSpec& spec, int blob_count, double blob_value,
                                      double noise_sigma, std::mt19937& rng) {
    const int n = spec.size;
    std::vector<double> base(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            base[static_cast<size_t>(r) * n + c] =
                std::hypot(r - spec.center_row, c - spec.center_col) <= spec.radius ? spec.inside
                                                                                    : spec.outside;
    int placed = 0;
    for (int tries = 0; placed < blob_count && tries < 20000; ++tries) {
        const int by = irand(rng, 4, n - 5);
        const int bx = irand(rng, 4, n - 5);
        const int br = irand(rng, 3, 7);
        const double to_edge =
            std::abs(std::hypot(by - spec.center_row, bx - spec.center_col) - spec.radius);
        if (to_edge < br) continue; // keep the lesion boundary itself clean
        for (int r = std::max(0, by - br); r <= std::min(n - 1, by + br); ++r)
            for (int c = std::max(0, bx - br); c <= std::min(n - 1, bx + br); ++c)
                if (std::hypot(r - by, c - bx) <= br)
                    base[static_cast<size_t>(r) * n + c] = blob_value;
        ++placed;
    }

    dept::GrayImage img(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            img.at(r, c) = quantize8(base[static_cast<size_t>(r) * n + c] + noise_sigma * nrand(rng));
    return img;
}

dept::GrayImage blob_image(const dept::Mask& blob, double noise_sigma, std::mt19937& rng) {
    dept::GrayImage img(blob.width, blob.height);
    for (size_t i = 0; i < blob.data.size(); ++i)
        img.data[i] = quantize8((blob.data[i] ? 0.7 : 0.3) + noise_sigma * nrand(rng));
    return img;
}

double mask_iou(const dept::Mask& a, const dept::Mask& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("mask_iou: dimension mismatch");
    std::uint64_t inter = 0, uni = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const bool pa = a.data[i] != 0;
        const bool pb = b.data[i] != 0;
        inter += pa && pb;
        uni += pa || pb;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace oracle
