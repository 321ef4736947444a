#ifndef FB_FREEBOUNDARY_HPP
#define FB_FREEBOUNDARY_HPP

#include "fb/grid.hpp"

#include <vector>

namespace fb {

struct FbSegment {
    double x0, y0, x1, y1; // oriented: {u > 1} lies to the left
};

struct FbPoint {
    double x = 0, y = 0;
    double nx = 0, ny = 0; // unit normal pointing into {u > 1}
};

/// Approximation of F(u) = boundary of {u > 1}. On Rect2D grids the segments
/// come from marching squares on level 1 with linear edge interpolation and
/// the points are the (deduplicated) segment endpoints. On radial grids the
/// crossing radii are reported as points on the positive x axis and the
/// segment list stays empty.
struct FreeBoundary {
    std::vector<FbSegment> segments;
    std::vector<FbPoint> points;

    double total_length() const;
    bool empty() const { return segments.empty() && points.empty(); }
};

FreeBoundary extract_free_boundary(const Grid& g, const Field& u);

struct OneSidedGradients {
    double alpha_hat = 0; // |∇u| slope on the {u > 1} side
    double beta_hat = 0;  // |∇u| slope on the {u <= 1} side
    bool ok = false;      // false when a sample would leave the domain
};

/// Directional slopes of u across a free-boundary point from interpolated
/// samples at distances {2h, 3h, 4h} along +-normal (through-origin linear
/// fit of u - 1). Sampling starts at 2h to stay outside the eps transition
/// layer of the schedule.
OneSidedGradients one_sided_gradients(const Grid& g, const Field& u, const FbPoint& p);

/// Euclidean distance from every node to the set of nodes with u <= 1.
/// Exact over the node set; the default is the two-pass squared-distance
/// transform, brute_force enumerates pairs (same values, quadratic cost).
Field distance_to_sublevel(const Grid& g, const Field& u, bool brute_force = false);

/// Distance from every node to the set of marked nodes (exact, two-pass).
Field distance_to_set(const Grid& g, const std::vector<std::uint8_t>& mask);

void write_polyline_csv(const std::string& path, const FreeBoundary& fb,
                        std::uint64_t config_hash = 0);
void write_normals_csv(const std::string& path, const FreeBoundary& fb,
                       std::uint64_t config_hash = 0);

} // namespace fb

#endif
