#include "dept/fgpem.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace dept {

ExtremePoints extract_extreme_points(const Mask& mask) {
    bool found = false;
    ExtremePoints pts;
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            if (!mask.at(r, c)) continue;
            const PointRC p{r, c};
            if (!found) {
                pts.top = pts.bottom = pts.left = pts.right = p;
                found = true;
                continue;
            }
            if (p.row < pts.top.row || (p.row == pts.top.row && p.col < pts.top.col)) pts.top = p;
            if (p.row > pts.bottom.row || (p.row == pts.bottom.row && p.col > pts.bottom.col))
                pts.bottom = p;
            if (p.col < pts.left.col || (p.col == pts.left.col && p.row < pts.left.row)) pts.left = p;
            if (p.col > pts.right.col || (p.col == pts.right.col && p.row > pts.right.row))
                pts.right = p;
        }
    }
    if (!found) throw std::runtime_error("empty mask: no foreground pixel to take extreme points from");
    return pts;
}

Contour trace_contour(const CostMatrix& cost, const ExtremePoints& pts, bool straight) {
    const PointRC order[5] = {pts.top, pts.left, pts.bottom, pts.right, pts.top};
    for (int i = 0; i < 4; ++i) {
        if (!cost.in_bounds(order[i]))
            throw std::out_of_range("trace_contour: extreme point out of bounds");
    }

    Contour contour;
    for (int i = 0; i < 4; ++i) {
        const PixelPath seg = straight ? straight_segment(order[i], order[i + 1])
                                       : dijkstra_path(cost, order[i], order[i + 1]);
        const size_t from = contour.points.empty() ? 0 : 1; // junction pixel already emitted
        contour.points.insert(contour.points.end(), seg.points.begin() + from, seg.points.end());
    }
    if (contour.points.size() > 1 && contour.points.back() == contour.points.front())
        contour.points.pop_back();
    return contour;
}

Mask fill_contour(const Contour& contour, int width, int height) {
    enum : std::uint8_t { unknown = 0, background = 1, boundary = 2 };
    Mask grid(width, height, unknown);
    for (const PointRC& p : contour.points) {
        if (!grid.in_bounds(p)) throw std::out_of_range("fill_contour: contour pixel out of bounds");
        grid.at(p.row, p.col) = boundary;
    }

    std::deque<PointRC> queue;
    auto seed = [&](int r, int c) {
        if (grid.at(r, c) == unknown) {
            grid.at(r, c) = background;
            queue.push_back({r, c});
        }
    };
    for (int c = 0; c < width; ++c) {
        seed(0, c);
        seed(height - 1, c);
    }
    for (int r = 0; r < height; ++r) {
        seed(r, 0);
        seed(r, width - 1);
    }

    constexpr int kSteps[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    while (!queue.empty()) {
        const PointRC p = queue.front();
        queue.pop_front();
        for (const auto& s : kSteps) {
            const int nr = p.row + s[0];
            const int nc = p.col + s[1];
            if (nr < 0 || nr >= height || nc < 0 || nc >= width) continue;
            if (grid.at(nr, nc) == unknown) {
                grid.at(nr, nc) = background;
                queue.push_back({nr, nc});
            }
        }
    }

    Mask out(width, height);
    for (size_t i = 0; i < grid.data.size(); ++i) out.data[i] = grid.data[i] == background ? 0 : 1;
    return out;
}

namespace {

PointRC scale_point(PointRC p, double scale, int width, int height) {
    return {std::clamp(static_cast<int>(std::lround(p.row * scale)), 0, height - 1),
            std::clamp(static_cast<int>(std::lround(p.col * scale)), 0, width - 1)};
}

} // namespace

Mask fgpem_generate(const Raster& source, const ExtremePoints& pts, const FgpemOptions& opts,
                    bool apply_clahe, const ClaheParams& clahe_params) {
    if (opts.scale <= 0.0 || opts.scale > 1.0)
        throw std::invalid_argument("fgpem_generate: scale must be in (0,1]");
    for (const PointRC& p : {pts.top, pts.bottom, pts.left, pts.right}) {
        if (!source.in_bounds(p))
            throw std::out_of_range("fgpem_generate: extreme point out of bounds");
    }
    if (pts.top == pts.bottom && pts.left == pts.right && pts.top == pts.left)
        std::cerr << "warning: degenerate extreme points (all equal); label will be near-empty\n";

    Raster working = source;
    if (apply_clahe) {
        GrayImage gray;
        static_cast<Raster&>(gray) = working;
        working = clahe(gray, clahe_params);
    }

    const int orig_w = source.width;
    const int orig_h = source.height;
    int low_w = orig_w;
    int low_h = orig_h;
    ExtremePoints low_pts = pts;
    if (opts.scale < 1.0) {
        low_w = std::max(1, static_cast<int>(std::lround(orig_w * opts.scale)));
        low_h = std::max(1, static_cast<int>(std::lround(orig_h * opts.scale)));
        working = resize_bilinear(working, low_w, low_h);
        low_pts.top = scale_point(pts.top, opts.scale, low_w, low_h);
        low_pts.bottom = scale_point(pts.bottom, opts.scale, low_w, low_h);
        low_pts.left = scale_point(pts.left, opts.scale, low_w, low_h);
        low_pts.right = scale_point(pts.right, opts.scale, low_w, low_h);
    }

    const GradientMap grad = sobel_gradient(working);
    const CostMatrix cost = build_cost_matrix(grad, opts.epsilon, opts.normalize);
    const Contour contour = trace_contour(cost, low_pts, opts.use_straight_baseline);
    const Mask filled = fill_contour(contour, low_w, low_h);

    if (low_w == orig_w && low_h == orig_h) return filled;
    const Raster upsampled = resize_bilinear(mask_to_raster(filled), orig_w, orig_h);
    return threshold_mask(upsampled, 0.5f);
}

Mask initial_pseudo_label(const GrayImage& img, const ExtremePoints& pts, const FgpemOptions& opts,
                          const ClaheParams& clahe_params) {
    return fgpem_generate(img, pts, opts, true, clahe_params);
}

int count_components(const Mask& mask) {
    Mask seen(mask.width, mask.height, 0);
    int components = 0;
    std::deque<PointRC> queue;
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            if (!mask.at(r, c) || seen.at(r, c)) continue;
            ++components;
            seen.at(r, c) = 1;
            queue.push_back({r, c});
            while (!queue.empty()) {
                const PointRC p = queue.front();
                queue.pop_front();
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int nr = p.row + dr;
                        const int nc = p.col + dc;
                        if (nr < 0 || nr >= mask.height || nc < 0 || nc >= mask.width) continue;
                        if (mask.at(nr, nc) && !seen.at(nr, nc)) {
                            seen.at(nr, nc) = 1;
                            queue.push_back({nr, nc});
                        }
                    }
                }
            }
        }
    }
    return components;
}

namespace {

PointRC point_from_json(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
        throw std::runtime_error(std::string("points document: missing or malformed \"") + key + "\"");
    return {j[key][0].get<int>(), j[key][1].get<int>()};
}

} // namespace

ExtremePoints read_points_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open points file: " + path.string());
    json j;
    in >> j;
    ExtremePoints pts;
    pts.top = point_from_json(j, "top");
    pts.bottom = point_from_json(j, "bottom");
    pts.left = point_from_json(j, "left");
    pts.right = point_from_json(j, "right");
    return pts;
}

void write_points_json(const ExtremePoints& pts, const fs::path& path, bool multi_component) {
    json j;
    j["top"] = {pts.top.row, pts.top.col};
    j["bottom"] = {pts.bottom.row, pts.bottom.col};
    j["left"] = {pts.left.row, pts.left.col};
    j["right"] = {pts.right.row, pts.right.col};
    if (multi_component) j["multi_component"] = true;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write points file: " + path.string());
    out << j.dump() << "\n";
}

} // namespace dept
