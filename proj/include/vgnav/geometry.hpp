#pragma once
// 2D geometric primitives shared by the whole library: points, segments,
// polygons, intersection predicates, inner angles and point-in-polygon
// classification. Everything here is pure and immutable after construction,
// so values can be shared freely across threads.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace vgnav {

using Point2 = Eigen::Vector2d;

// Tolerance for "touching" classifications. Raster-derived coordinates
// quantize at ~0.2 m, so 1e-9 m is far below data noise.
inline constexpr double kGeomEps = 1e-9;

inline double cross2(const Point2& a, const Point2& b) {
    return a.x() * b.y() - a.y() * b.x();
}

// Sign of the turn a->b->c: +1 left (CCW), -1 right (CW), 0 collinear.
// The collinearity band is distance-based (|c to line ab| <= eps), which
// keeps the predicate meaningful for long segments.
int orientation(const Point2& a, const Point2& b, const Point2& c, double eps = kGeomEps);

struct Segment2 {
    Point2 a;
    Point2 b;

    double length() const { return (b - a).norm(); }
};

enum class SegMode : std::uint8_t {
    Open,    // relative interiors only: endpoint touches and collinear overlap do not count
    Closed,  // endpoints and collinear overlap count
};

// Intersection predicate for two non-degenerate segments.
// Throws std::invalid_argument on a degenerate segment (a == b).
bool segments_intersect(const Segment2& s1, const Segment2& s2, SegMode mode);

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);

// Simple polygon with CCW vertex order and implicit closure.
// `boundary` optionally flags vertices that lie on the sensing-region border
// (extraction artifacts, exempt from voting removal); empty means none.
struct Polygon {
    std::vector<Point2> vertices;
    int id = -1;
    bool hole = false;
    std::vector<std::uint8_t> boundary;

    std::size_t size() const { return vertices.size(); }
    bool vertex_on_boundary(std::size_t i) const {
        return i < boundary.size() && boundary[i] != 0;
    }
};

double signed_area(const Polygon& poly);
double perimeter(const Polygon& poly);

// Re-winds the polygon CCW in place (flags follow their vertices).
void normalize_ccw(Polygon& poly);

// O(n^2) simplicity check; intended for validation and tests, not hot paths.
bool is_simple(const Polygon& poly);

enum class PointLocation : std::uint8_t { Inside, OnBoundary, Outside };

// Even-odd classification with an OnBoundary band of width eps.
PointLocation point_in_polygon(const Point2& p, const Polygon& poly, double eps = kGeomEps);

// Interior angle at vertex i, in (0, 2*pi). Reflex vertices return > pi.
// Requires CCW winding.
double inner_angle(const Polygon& poly, std::size_t i);

// Interior angle at a vertex given its two contour neighbors (CCW order
// prev -> v -> next). Same convention as inner_angle.
double inner_angle_at(const Point2& v, const Point2& prev, const Point2& next);

// True iff `dir` at the vertex lies outside the open interior cone spanned by
// the directions toward its contour neighbors; directions along either
// contour edge count as escaping.
bool is_escaping_direction(const Point2& v, const Point2& prev, const Point2& next,
                           const Point2& dir);

// Parity test over a set of contours (holes traced as separate polygons):
// true iff p is inside an odd number of them, i.e. inside obstacle material.
bool point_in_obstacle_set(std::span<const Polygon> polys, const Point2& p);

// Axis-aligned rectangle (used for local-region bookkeeping and world bounds).
struct Rect {
    Point2 lo{0.0, 0.0};
    Point2 hi{0.0, 0.0};

    double width() const { return hi.x() - lo.x(); }
    double height() const { return hi.y() - lo.y(); }
    bool contains(const Point2& p) const {
        return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
    }
    bool contains(const Rect& r) const { return contains(r.lo) && contains(r.hi); }
    Rect inflated(double m) const { return {lo - Point2(m, m), hi + Point2(m, m)}; }
};

// True iff any point of the segment lies in the rectangle.
bool segment_intersects_rect(const Segment2& s, const Rect& r);

}  // namespace vgnav
