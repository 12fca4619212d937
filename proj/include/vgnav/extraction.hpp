#pragma once
// Full scan-to-polygons pipeline: rasterize -> blur -> contour extraction ->
// per-contour Douglas-Peucker simplification -> inner-angle filtering.

#include "vgnav/contours.hpp"
#include "vgnav/geometry.hpp"
#include "vgnav/raster.hpp"

#include <optional>
#include <vector>

namespace vgnav {

struct PolygonSet {
    std::vector<Polygon> polygons;
    Point2 origin{0.0, 0.0};  // vehicle position the set was extracted around
    int frame_index = 0;

    bool empty() const { return polygons.empty(); }
    std::size_t size() const { return polygons.size(); }
};

// Douglas-Peucker on the closed contour: the polygon is split at its two
// mutually farthest vertices and each open chain is simplified with the given
// tolerance. Returns nullopt when the result degenerates below 3 vertices.
std::optional<Polygon> simplify(const Polygon& poly, double dp_epsilon);

// Repeatedly removes the vertex with the smallest inner angle while it is
// below zeta, recomputing neighbor angles after each removal; never reduces
// the polygon below 3 vertices.
Polygon angle_filter(const Polygon& poly, double zeta);

// Composition of the whole pipeline; degenerated contours are dropped.
PolygonSet extract_polygons(const SensorScan& scan, const ExtractionParams& params);

}  // namespace vgnav
