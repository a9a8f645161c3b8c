#ifndef DEPT_TRACING_HPP
#define DEPT_TRACING_HPP

#include "dept/preprocess.hpp"
#include "dept/raster.hpp"

#include <vector>

namespace dept {

/// 8-connected pixel chain: consecutive points have Chebyshev distance 1.
struct PixelPath {
    std::vector<PointRC> points;
    double total_cost = 0.0;
};

/// Minimum-cost path between two pixels. Traversing from pixel u to an
/// 8-neighbor v weighs ((cost[u]+cost[v])/2) * step length, with step length
/// 1 for axis moves and sqrt(2) for diagonal moves. Ties in the frontier are
/// broken toward the smaller (row, col), so the result is deterministic.
PixelPath dijkstra_path(const CostMatrix& cost, PointRC start, PointRC end);

/// 8-connected digital line from a to b (Bresenham), endpoints included.
/// total_cost is reported as 0: this is the cost-free baseline.
PixelPath straight_segment(PointRC a, PointRC b);

} // namespace dept

#endif
