#include "vgnav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vgnav {

int orientation(const Point2& a, const Point2& b, const Point2& c, double eps) {
    const Point2 ab = b - a;
    const double v = cross2(ab, c - a);
    const double band = eps * ab.norm();
    if (v > band) return 1;
    if (v < -band) return -1;
    return 0;
}

namespace {

// Closed bounding-box containment of collinear point q on segment pr.
bool on_segment_collinear(const Point2& p, const Point2& r, const Point2& q) {
    return q.x() <= std::max(p.x(), r.x()) + kGeomEps &&
           q.x() >= std::min(p.x(), r.x()) - kGeomEps &&
           q.y() <= std::max(p.y(), r.y()) + kGeomEps &&
           q.y() >= std::min(p.y(), r.y()) - kGeomEps;
}

}  // namespace

bool segments_intersect(const Segment2& s1, const Segment2& s2, SegMode mode) {
    if ((s1.a - s1.b).norm() <= kGeomEps || (s2.a - s2.b).norm() <= kGeomEps) {
        throw std::invalid_argument("segments_intersect: degenerate segment");
    }

    const int o1 = orientation(s1.a, s1.b, s2.a);
    const int o2 = orientation(s1.a, s1.b, s2.b);
    const int o3 = orientation(s2.a, s2.b, s1.a);
    const int o4 = orientation(s2.a, s2.b, s1.b);

    // Proper crossing: both segments strictly straddle the other's line.
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    if (mode == SegMode::Open) return false;

    // Closed mode also admits endpoint touches and collinear overlap.
    if (o1 == 0 && on_segment_collinear(s1.a, s1.b, s2.a)) return true;
    if (o2 == 0 && on_segment_collinear(s1.a, s1.b, s2.b)) return true;
    if (o3 == 0 && on_segment_collinear(s2.a, s2.b, s1.a)) return true;
    if (o4 == 0 && on_segment_collinear(s2.a, s2.b, s1.b)) return true;
    return false;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const Point2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double signed_area(const Polygon& poly) {
    double twice = 0.0;
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = poly.vertices[i];
        const Point2& b = poly.vertices[(i + 1) % n];
        twice += cross2(a, b);
    }
    return 0.5 * twice;
}

double perimeter(const Polygon& poly) {
    double total = 0.0;
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        total += (poly.vertices[(i + 1) % n] - poly.vertices[i]).norm();
    }
    return total;
}

void normalize_ccw(Polygon& poly) {
    if (signed_area(poly) >= 0.0) return;
    std::reverse(poly.vertices.begin(), poly.vertices.end());
    if (!poly.boundary.empty()) std::reverse(poly.boundary.begin(), poly.boundary.end());
}

bool is_simple(const Polygon& poly) {
    const std::size_t n = poly.vertices.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if ((poly.vertices[i] - poly.vertices[(i + 1) % n]).norm() <= kGeomEps) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Segment2 si{poly.vertices[i], poly.vertices[(i + 1) % n]};
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            const Segment2 sj{poly.vertices[j], poly.vertices[(j + 1) % n]};
            if (adjacent) {
                // Adjacent edges may touch only at the shared vertex.
                if (segments_intersect(si, sj, SegMode::Open)) return false;
            } else if (segments_intersect(si, sj, SegMode::Closed)) {
                return false;
            }
        }
    }
    return true;
}

PointLocation point_in_polygon(const Point2& p, const Polygon& poly, double eps) {
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, poly.vertices[i], poly.vertices[(i + 1) % n]) <= eps) {
            return PointLocation::OnBoundary;
        }
    }
    // Even-odd crossing count with the usual half-open rule, robust against
    // the ray passing through vertices.
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2& a = poly.vertices[i];
        const Point2& b = poly.vertices[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x_cross = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (p.x() < x_cross) inside = !inside;
        }
    }
    return inside ? PointLocation::Inside : PointLocation::Outside;
}

double inner_angle_at(const Point2& v, const Point2& prev, const Point2& next) {
    const Point2 u = prev - v;  // incoming contour edge, reversed
    const Point2 w = next - v;  // outgoing contour edge
    double ang = std::atan2(cross2(w, u), w.dot(u));
    if (ang <= 0.0) ang += 2.0 * std::numbers::pi;
    return ang;
}

double inner_angle(const Polygon& poly, std::size_t i) {
    const std::size_t n = poly.vertices.size();
    const Point2& prev = poly.vertices[(i + n - 1) % n];
    const Point2& next = poly.vertices[(i + 1) % n];
    return inner_angle_at(poly.vertices[i], prev, next);
}

bool is_escaping_direction(const Point2& v, const Point2& prev, const Point2& next,
                           const Point2& dir) {
    const Point2 w = next - v;
    const double cone = inner_angle_at(v, prev, next);
    // CCW angle from the outgoing contour edge to dir, in [0, 2*pi).
    double a = std::atan2(cross2(w, dir), w.dot(dir));
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    constexpr double kAngEps = 1e-9;
    return !(a > kAngEps && a < cone - kAngEps);
}

bool point_in_obstacle_set(std::span<const Polygon> polys, const Point2& p) {
    bool inside = false;
    for (const Polygon& poly : polys) {
        if (point_in_polygon(p, poly) == PointLocation::Inside) inside = !inside;
    }
    return inside;
}

bool segment_intersects_rect(const Segment2& s, const Rect& r) {
    if (r.contains(s.a) || r.contains(s.b)) return true;
    // Liang-Barsky clip of the parametric segment against the slab bounds.
    double t0 = 0.0;
    double t1 = 1.0;
    const Point2 d = s.b - s.a;
    const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
    const double q[4] = {s.a.x() - r.lo.x(), r.hi.x() - s.a.x(),
                         s.a.y() - r.lo.y(), r.hi.y() - s.a.y()};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace vgnav
