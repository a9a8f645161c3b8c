#include "dept/tracing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <stdexcept>

namespace dept {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct QueueEntry {
    double dist;
    int idx; // row-major index; idx order is (row, col) lexicographic order
};

// Min-heap on distance; equal distances pop the smaller (row, col) first.
struct QueueCompare {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.dist != b.dist) return a.dist > b.dist;
        return a.idx > b.idx;
    }
};

constexpr int kOffsets[8][2] = {
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
};

} // namespace

PixelPath dijkstra_path(const CostMatrix& cost, PointRC start, PointRC end) {
    if (!cost.in_bounds(start) || !cost.in_bounds(end))
        throw std::out_of_range("dijkstra_path: endpoint out of bounds");

    if (start == end) return PixelPath{{start}, 0.0};

    const int w = cost.width;
    const int h = cost.height;
    const size_t n = static_cast<size_t>(w) * h;
    const int start_idx = start.row * w + start.col;
    const int end_idx = end.row * w + end.col;

    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> pred(n, -1);
    std::vector<char> done(n, 0);

    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueCompare> frontier;
    dist[start_idx] = 0.0;
    frontier.push({0.0, start_idx});

    while (!frontier.empty()) {
        const QueueEntry top = frontier.top();
        frontier.pop();
        if (done[top.idx]) continue; // lazy deletion
        done[top.idx] = 1;
        if (top.idx == end_idx) break;

        const int r = top.idx / w;
        const int c = top.idx % w;
        const double cu = cost.cost[top.idx];

        for (const auto& off : kOffsets) {
            const int nr = r + off[0];
            const int nc = c + off[1];
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            const int nidx = nr * w + nc;
            if (done[nidx]) continue;
            const double len = (off[0] != 0 && off[1] != 0) ? kSqrt2 : 1.0;
            const double nd = top.dist + 0.5 * (cu + cost.cost[nidx]) * len;
            if (nd < dist[nidx]) {
                dist[nidx] = nd;
                pred[nidx] = top.idx;
                frontier.push({nd, nidx});
            }
        }
    }

    PixelPath path;
    path.total_cost = dist[end_idx];
    for (int idx = end_idx; idx != -1; idx = pred[idx])
        path.points.push_back({idx / w, idx % w});
    std::reverse(path.points.begin(), path.points.end());
    return path;
}

PixelPath straight_segment(PointRC a, PointRC b) {
    PixelPath path;
    const int dc = std::abs(b.col - a.col);
    const int dr = -std::abs(b.row - a.row);
    const int sc = a.col < b.col ? 1 : -1;
    const int sr = a.row < b.row ? 1 : -1;
    int err = dc + dr;
    int r = a.row, c = a.col;
    while (true) {
        path.points.push_back({r, c});
        if (r == b.row && c == b.col) break;
        const int e2 = 2 * err;
        if (e2 >= dr) {
            err += dr;
            c += sc;
        }
        if (e2 <= dc) {
            err += dc;
            r += sr;
        }
    }
    return path;
}

} // namespace dept
