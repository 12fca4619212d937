#pragma once
// Two-layer visibility graph. A partially reduced local layer is rebuilt from
// the current frame's polygons, then merged into the persistent global layer:
// vertex association + robust position refitting, vote-based removal of stale
// vertices, and edge merge/elimination. Edges crossed by short-lived
// (dynamic) polygons are blocked rather than deleted so they can reconnect.

#include "vgnav/extraction.hpp"
#include "vgnav/geometry.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace vgnav {

enum class SpaceLabel : std::uint8_t { Free, Unknown };
enum class EdgeKind : std::uint8_t { Contour, Visibility };
enum class EdgeStatus : std::uint8_t { Active, Blocked };

struct NavVertex {
    int id = -1;
    Point2 position{0.0, 0.0};
    int polygon_id = -1;
    int prev_id = -1;  // contour neighbors, CCW order prev -> this -> next
    int next_id = -1;
    SpaceLabel label = SpaceLabel::Unknown;
    bool boundary = false;  // lies on a sensing-region border (clip artifact)
    int hit_count = 0;
    int miss_count = 0;
    std::deque<Point2> history;       // last H observed positions
    std::deque<std::uint8_t> votes;   // last N sensed-region outcomes (1 hit / 0 miss)
};

struct VisEdge {
    int a = -1;  // a < b
    int b = -1;
    double length = 0.0;
    EdgeKind kind = EdgeKind::Visibility;
    EdgeStatus status = EdgeStatus::Active;
};

using EdgeKey = std::pair<int, int>;

inline EdgeKey make_edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct MergeParams {
    double assoc_dist = 0.5;          // mutual-NN association gate
    int vote_window = 5;              // N frames
    int vote_miss_limit = 3;          // M misses within the window
    int robust_max_iters = 10;
    double inlier_gate = 2.0;         // Mahalanobis multiple
    int history_depth = 10;           // H observed positions kept
    double sigma_floor = 0.05;        // Euclidean fallback floor, meters
    double long_edge_threshold = 2.0; // below this, no pass-around reduction
    int dynamic_age = 3;              // frames before a new polygon joins the global layer
};

// A direction at a contour vertex escapes iff it lies outside the open
// interior cone spanned by the directions toward the contour neighbors.
bool is_escaping(const Point2& vertex, const Point2& prev, const Point2& next, const Point2& dir);

struct LocalVertex {
    Point2 pos{0.0, 0.0};
    int poly = -1;   // index into LocalLayer::polygons
    int prev = -1;   // indices into LocalLayer::vertices
    int next = -1;
    bool boundary = false;
};

struct LocalEdge {
    int u = -1;
    int v = -1;
    EdgeKind kind = EdgeKind::Visibility;
};

struct LocalLayer {
    std::vector<Polygon> polygons;
    std::vector<LocalVertex> vertices;
    std::vector<LocalEdge> edges;
    Point2 robot{0.0, 0.0};
    Rect region;
    int frame_index = 0;
    // Instrumentation: candidate pairs enumerated during construction. The
    // per-frame cost depends only on the local vertex count.
    std::int64_t pairs_examined = 0;
};

// Builds the partially reduced local-layer v-graph: contour edges are always
// kept; a cross or non-adjacent vertex pair gets a visibility edge iff the
// segment is unobstructed and, when longer than long_edge_threshold, escapes
// the interior cone at both endpoints.
LocalLayer build_local_layer(const PolygonSet& polys, const MergeParams& params,
                             const Rect& region);

// Convenience: region is the axis-aligned square of side `extent` centered at
// the set's origin.
LocalLayer build_local_layer(const PolygonSet& polys, const MergeParams& params, double extent);

// Mutual-nearest-neighbor matching with distance < max_dist; each index
// appears in at most one pair. Ties break toward the smaller index.
std::vector<std::pair<int, int>> mutual_nearest_matches(std::span<const Point2> from,
                                                        std::span<const Point2> to,
                                                        double max_dist);

struct RobustFit {
    Point2 mean{0.0, 0.0};
    std::vector<std::uint8_t> inliers;
    int iterations = 0;
};

// Iterative inlier refit: start with everything, reassign by Mahalanobis
// distance against the current mean/covariance (Euclidean gate with a noise
// floor when the covariance is near-singular), stop when the inlier set
// repeats or max_iters is reached. Throws std::invalid_argument on empty input.
RobustFit robust_update(std::span<const Point2> history, const MergeParams& params);

class VGraph {
public:
    MergeParams params;

    // Splits the frame's polygons into mature ones (associated with known
    // geometry or persistent for dynamic_age frames) and transient ones that
    // act only as temporary edge blockers. Updates the persistence tracker.
    std::pair<PolygonSet, PolygonSet> classify_polygons(const PolygonSet& polys);

    // Association between local-layer vertices and global vertices near the
    // local region; returns (local index, global id) pairs.
    std::vector<std::pair<int, int>> associate_vertices(const LocalLayer& local) const;

    // Algorithm core: association + robust position update, vote-based
    // removal, new-vertex insertion, edge merge and elimination.
    void merge_layers(const LocalLayer& local);

    // Blocks active edges crossed by transient polygons; unblocks blocked
    // edges that are fully inside the sensed region and clear again.
    void update_dynamic_blocking(const PolygonSet& transient, const Point2& robot,
                                 const Rect& region);

    // Marks every vertex with an unobstructed visibility connection to the
    // robot as Free; labels never revert.
    void update_space_labels(const Point2& robot);

    void clear();

    // --- queries ---
    const std::map<int, NavVertex>& vertices() const { return vertices_; }
    const std::map<EdgeKey, VisEdge>& edges() const { return edges_; }
    std::map<int, NavVertex>& mutable_vertices() { return vertices_; }
    std::map<EdgeKey, VisEdge>& mutable_edges() { return edges_; }
    const std::map<int, std::vector<int>>& rings() const { return rings_; }
    const std::vector<Polygon>& transient_polygons() const { return transient_; }

    // Parity test over the contour rings: inside obstacle material.
    bool in_material(const Point2& p) const;
    // Open-mode crossing against any contour-kind edge.
    bool segment_hits_contour(const Segment2& s) const;
    // Open-mode crossing against any transient polygon (edges or interior).
    bool segment_hits_transient(const Segment2& s) const;
    // Escaping test at a global vertex; vertices without neighbors escape.
    bool escape_ok(const NavVertex& v, const Point2& dir) const;

    std::uint64_t revision() const { return revision_; }

    // Rebuild helpers used by the serializer.
    void adopt(std::map<int, NavVertex> vertices, std::map<EdgeKey, VisEdge> edges);
    int allocate_polygon_id() { return next_polygon_id_++; }
    void set_last_local_polygons(std::vector<Polygon> polys);

private:
    struct PendingPolygon {
        Polygon poly;
        Point2 centroid{0.0, 0.0};
        int age = 0;
        bool matched = false;
    };

    void remove_vertex(int id);
    void sync_ring_edges(int polygon_id);
    void refresh_neighbor_fields(int polygon_id);
    void recompute_edge_lengths();
    bool sensed(const Point2& p, const Point2& robot, const Rect& region,
                const LocalLayer& local) const;

    std::map<int, NavVertex> vertices_;
    std::map<EdgeKey, VisEdge> edges_;
    std::map<int, std::vector<int>> rings_;  // polygon id -> CCW vertex ids
    std::vector<PendingPolygon> pending_;
    std::vector<Polygon> transient_;        // last frame's transient polygons
    std::vector<Polygon> last_local_polys_; // last merged local polygons
    int next_vertex_id_ = 0;
    int next_polygon_id_ = 0;
    std::uint64_t revision_ = 0;
};

}  // namespace vgnav
