#include "vgnav/extraction.hpp"

#include <algorithm>
#include <limits>

namespace vgnav {

namespace {

// Marks the kept vertices of one open chain [first, last] (inclusive indices
// into poly.vertices).
void dp_chain(const std::vector<Point2>& pts, std::size_t first, std::size_t last,
              double eps, std::vector<char>& keep) {
    if (last <= first + 1) return;
    double worst = -1.0;
    std::size_t worst_i = first;
    for (std::size_t i = first + 1; i < last; ++i) {
        const double d = point_segment_distance(pts[i], pts[first], pts[last]);
        if (d > worst) {
            worst = d;
            worst_i = i;
        }
    }
    if (worst > eps) {
        keep[worst_i] = 1;
        dp_chain(pts, first, worst_i, eps, keep);
        dp_chain(pts, worst_i, last, eps, keep);
    }
}

}  // namespace

std::optional<Polygon> simplify(const Polygon& poly, double dp_epsilon) {
    const std::size_t n = poly.vertices.size();
    if (n < 3) return std::nullopt;
    if (n == 3) return poly;

    // Split the closed contour at the two mutually farthest vertices.
    std::size_t ia = 0, ib = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = (poly.vertices[i] - poly.vertices[j]).squaredNorm();
            if (d > best) {
                best = d;
                ia = i;
                ib = j;
            }
        }
    }

    // Rotate so the split points are at positions 0 and m of a linear array.
    std::vector<Point2> pts(n + 1);
    std::vector<std::uint8_t> flags(n + 1, 0);
    for (std::size_t k = 0; k <= n; ++k) {
        const std::size_t i = (ia + k) % n;
        pts[k] = poly.vertices[i];
        flags[k] = poly.vertex_on_boundary(i) ? 1 : 0;
    }
    const std::size_t m = (ib + n - ia) % n;

    std::vector<char> keep(n + 1, 0);
    keep[0] = keep[m] = keep[n] = 1;  // pts[n] duplicates pts[0]
    dp_chain(pts, 0, m, dp_epsilon, keep);
    dp_chain(pts, m, n, dp_epsilon, keep);

    Polygon out;
    out.id = poly.id;
    out.hole = poly.hole;
    for (std::size_t k = 0; k < n; ++k) {
        if (!keep[k]) continue;
        out.vertices.push_back(pts[k]);
        out.boundary.push_back(flags[k]);
    }
    if (out.vertices.size() < 3) return std::nullopt;
    normalize_ccw(out);
    return out;
}

Polygon angle_filter(const Polygon& poly, double zeta) {
    Polygon out = poly;
    if (out.boundary.empty()) out.boundary.assign(out.vertices.size(), 0);
    while (out.vertices.size() > 3) {
        double min_angle = std::numeric_limits<double>::infinity();
        std::size_t min_i = 0;
        for (std::size_t i = 0; i < out.vertices.size(); ++i) {
            const double a = inner_angle(out, i);
            if (a < min_angle) {
                min_angle = a;
                min_i = i;
            }
        }
        if (min_angle >= zeta) break;
        out.vertices.erase(out.vertices.begin() + static_cast<std::ptrdiff_t>(min_i));
        out.boundary.erase(out.boundary.begin() + static_cast<std::ptrdiff_t>(min_i));
    }
    return out;
}

PolygonSet extract_polygons(const SensorScan& scan, const ExtractionParams& params) {
    PolygonSet set;
    set.origin = scan.origin;
    set.frame_index = scan.frame_index;

    const RasterImage raw = rasterize(scan, params);
    const RasterImage smooth = blur(raw, params.blur_kernel);
    for (const Polygon& contour : extract_contours(smooth, params.binarize_threshold)) {
        // A hole contour matters only when the vehicle is inside it (courtyard
        // walls). Otherwise the enclosed void is unobserved obstacle interior
        // and the outer contour already blocks it.
        if (contour.hole &&
            point_in_polygon(scan.origin, contour) != PointLocation::Inside) {
            continue;
        }
        std::optional<Polygon> simple = simplify(contour, params.dp_epsilon);
        if (!simple) continue;
        Polygon filtered = angle_filter(*simple, params.zeta);
        filtered.id = static_cast<int>(set.polygons.size());
        set.polygons.push_back(std::move(filtered));
    }
    return set;
}

}  // namespace vgnav
