#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vgnav/vgraph.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <set>
#include <array>

using namespace vgnav;

namespace {

Polygon square_at(const Point2& center, double side, int id = -1) {
    Polygon p;
    const double h = side / 2.0;
    p.vertices = {center + Point2(-h, -h), center + Point2(h, -h), center + Point2(h, h),
                  center + Point2(-h, h)};
    p.id = id;
    return p;
}

PolygonSet set_of(std::vector<Polygon> polys, const Point2& origin = {0, 0}, int frame = 0) {
    PolygonSet set;
    set.polygons = std::move(polys);
    set.origin = origin;
    set.frame_index = frame;
    for (std::size_t i = 0; i < set.polygons.size(); ++i) {
        set.polygons[i].id = static_cast<int>(i);
    }
    return set;
}

oracle::Poly to_oracle(const Polygon& p) {
    oracle::Poly out;
    for (const Point2& v : p.vertices) out.push_back({v.x(), v.y()});
    return out;
}

using EdgePositions = std::set<std::array<double, 4>>;

std::array<double, 4> edge_key(Point2 a, Point2 b) {
    if (b.x() < a.x() || (b.x() == a.x() && b.y() < a.y())) std::swap(a, b);
    return {a.x(), a.y(), b.x(), b.y()};
}

EdgePositions edge_position_set(const LocalLayer& layer) {
    EdgePositions out;
    for (const LocalEdge& e : layer.edges) {
        if (e.kind != EdgeKind::Visibility) continue;
        out.insert(edge_key(layer.vertices[static_cast<std::size_t>(e.u)].pos,
                            layer.vertices[static_cast<std::size_t>(e.v)].pos));
    }
    return out;
}

}  // namespace

TEST_CASE("is_escaping: square corner cases") {
    const Point2 v{0, 0};
    const Point2 neighbor_next{1, 0};
    const Point2 neighbor_prev{0, 1};
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(is_escaping(v, neighbor_prev, neighbor_next, {-s, -s}));
    CHECK_FALSE(is_escaping(v, neighbor_prev, neighbor_next, {s, s}));
    CHECK(is_escaping(v, neighbor_prev, neighbor_next, {1, 0}));
}

TEST_CASE("build_local_layer: single convex square has no visibility edges") {
    MergeParams params;
    const PolygonSet polys = set_of({square_at({0, 0}, 2.0)});
    const LocalLayer layer = build_local_layer(polys, params, 40.0);
    REQUIRE(layer.vertices.size() == 4);
    int contour = 0, vis = 0;
    for (const LocalEdge& e : layer.edges) {
        (e.kind == EdgeKind::Contour ? contour : vis) += 1;
    }
    CHECK(contour == 4);
    CHECK(vis == 0);  // diagonals cross the interior
}

TEST_CASE("build_local_layer: two distant squares keep only pass-around edges") {
    MergeParams params;
    params.long_edge_threshold = 5.0;
    const PolygonSet polys = set_of({square_at({0.5, 0.5}, 1.0), square_at({20.5, 0.5}, 1.0)});
    const LocalLayer layer = build_local_layer(polys, params, Rect{{-5, -5}, {26, 6}});

    // Brute-force oracle over all non-adjacent pairs with independent
    // visibility and escape predicates.
    std::vector<oracle::Poly> opolys;
    for (const Polygon& p : polys.polygons) opolys.push_back(to_oracle(p));
    EdgePositions expected;
    for (std::size_t pi = 0; pi < opolys.size(); ++pi) {
        for (std::size_t i = 0; i < opolys[pi].size(); ++i) {
            for (std::size_t qi = pi; qi < opolys.size(); ++qi) {
                for (std::size_t j = (qi == pi ? i + 1 : 0); j < opolys[qi].size(); ++j) {
                    if (pi == qi) {
                        const std::size_t n = opolys[pi].size();
                        if ((j == (i + 1) % n) || (i == (j + 1) % n)) continue;
                    }
                    const oracle::Pt a = opolys[pi][i];
                    const oracle::Pt b = opolys[qi][j];
                    if (!oracle::visible(a, b, opolys)) continue;
                    if (oracle::dist(a, b) > params.long_edge_threshold) {
                        if (!oracle::escapes(opolys[pi], i, b)) continue;
                        if (!oracle::escapes(opolys[qi], j, a)) continue;
                    }
                    expected.insert(edge_key({a.x, a.y}, {b.x, b.y}));
                }
            }
        }
    }
    const EdgePositions actual = edge_position_set(layer);
    CHECK(actual == expected);
    CHECK(!actual.empty());
    CHECK(actual.size() < 16);  // reduction removed something
}

TEST_CASE("build_local_layer: close squares keep all mutually visible edges") {
    MergeParams params;
    params.long_edge_threshold = 5.0;
    const PolygonSet polys = set_of({square_at({0.5, 0.5}, 1.0), square_at({3.5, 0.5}, 1.0)});
    const LocalLayer layer = build_local_layer(polys, params, 40.0);

    std::vector<oracle::Poly> opolys;
    for (const Polygon& p : polys.polygons) opolys.push_back(to_oracle(p));
    // Visibility only, no reduction (all pairs are below the threshold).
    int expected = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            if (oracle::visible(opolys[0][i], opolys[1][j], opolys)) ++expected;
        }
    }
    int actual_cross = 0;
    for (const LocalEdge& e : layer.edges) {
        if (e.kind != EdgeKind::Visibility) continue;
        if (layer.vertices[static_cast<std::size_t>(e.u)].poly !=
            layer.vertices[static_cast<std::size_t>(e.v)].poly) {
            ++actual_cross;
        }
    }
    CHECK(actual_cross == expected);
    CHECK(expected > 0);
}

TEST_CASE("build_local_layer: pair enumeration depends only on local vertices") {
    MergeParams params;
    const PolygonSet polys = set_of({square_at({0, 0}, 2.0), square_at({6, 0}, 2.0)});
    const LocalLayer layer = build_local_layer(polys, params, 40.0);
    // 8 vertices -> 28 pairs minus 8 contour-adjacent pairs.
    CHECK(layer.pairs_examined == 20);
}

TEST_CASE("mutual_nearest_matches: identity, mutuality, threshold") {
    std::vector<Point2> a{{0, 0}, {1, 0}, {2, 0}};
    auto id_match = mutual_nearest_matches(a, a, 0.5);
    REQUIRE(id_match.size() == 3);
    for (const auto& [i, j] : id_match) CHECK(i == j);

    // b0 is closest to a0, but a0's nearest is b1 -> no match for b0.
    std::vector<Point2> from{{0.0, 0.0}};
    std::vector<Point2> to{{0.3, 0.0}, {0.2, 0.0}};
    auto m = mutual_nearest_matches(from, to, 0.5);
    REQUIRE(m.size() == 1);
    CHECK(m[0].second == 1);

    // Spec example: local {(0,0)}, global {(0,0.2),(5,5)}, dist 0.5.
    std::vector<Point2> local{{0, 0}};
    std::vector<Point2> global{{0, 0.2}, {5, 5}};
    auto m2 = mutual_nearest_matches(local, global, 0.5);
    REQUIRE(m2.size() == 1);
    CHECK(m2[0] == std::pair<int, int>{0, 0});
}

TEST_CASE("robust_update: repeated point and empty input") {
    MergeParams params;
    std::vector<Point2> h(5, Point2{1, 1});
    const RobustFit fit = robust_update(h, params);
    CHECK((fit.mean - Point2(1, 1)).norm() < 1e-12);
    CHECK(std::count(fit.inliers.begin(), fit.inliers.end(), 1) == 5);
    CHECK_THROWS_AS(robust_update(std::vector<Point2>{}, params), std::invalid_argument);
}

TEST_CASE("robust_update: outliers rejected, matches reference iteration") {
    MergeParams params;
    std::mt19937 rng(123);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<Point2> h;
    for (int i = 0; i < 20; ++i) h.emplace_back(noise(rng), noise(rng));
    for (int i = 0; i < 3; ++i) h.emplace_back(2.0 + noise(rng), 2.0 + noise(rng));

    const RobustFit fit = robust_update(h, params);
    CHECK((fit.mean - Point2(0, 0)).norm() < 0.1);
    for (int i = 20; i < 23; ++i) CHECK(fit.inliers[static_cast<std::size_t>(i)] == 0);

    // Reference implementation (plain arrays, no Eigen).
    std::vector<char> mask(h.size(), 1);
    auto stats = [&](const std::vector<char>& m, double& mx, double& my, double c[3]) {
        int cnt = 0;
        mx = my = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            if (!m[k]) continue;
            mx += h[k].x();
            my += h[k].y();
            ++cnt;
        }
        mx /= cnt;
        my /= cnt;
        c[0] = c[1] = c[2] = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            if (!m[k]) continue;
            const double dx = h[k].x() - mx, dy = h[k].y() - my;
            c[0] += dx * dx;
            c[1] += dx * dy;
            c[2] += dy * dy;
        }
        c[0] /= cnt;
        c[1] /= cnt;
        c[2] /= cnt;
    };
    for (int iter = 0; iter < params.robust_max_iters; ++iter) {
        double mx, my, c[3];
        stats(mask, mx, my, c);
        const double tr = c[0] + c[2];
        const double det = c[0] * c[2] - c[1] * c[1];
        const double lmin = tr / 2.0 - std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        std::vector<char> next(h.size(), 0);
        if (lmin < 1e-12) {
            const double g = params.inlier_gate * std::max(std::sqrt(tr / 2.0), params.sigma_floor);
            for (std::size_t k = 0; k < h.size(); ++k) {
                next[k] = std::hypot(h[k].x() - mx, h[k].y() - my) <= g ? 1 : 0;
            }
        } else {
            for (std::size_t k = 0; k < h.size(); ++k) {
                const double dx = h[k].x() - mx, dy = h[k].y() - my;
                const double md2 = (c[2] * dx * dx - 2.0 * c[1] * dx * dy + c[0] * dy * dy) / det;
                next[k] = md2 <= params.inlier_gate * params.inlier_gate ? 1 : 0;
            }
        }
        if (std::find(next.begin(), next.end(), 1) == next.end()) break;
        if (next == mask) break;
        mask = next;
    }
    for (std::size_t k = 0; k < h.size(); ++k) {
        CHECK(static_cast<int>(fit.inliers[k]) == static_cast<int>(mask[k]));
    }
}

TEST_CASE("robust_update: two equal clusters terminate as one whole-set state") {
    MergeParams params;
    std::vector<Point2> h;
    for (int i = 0; i < 10; ++i) h.emplace_back(0.0, 0.0);
    for (int i = 0; i < 10; ++i) h.emplace_back(10.0, 10.0);
    const RobustFit fit = robust_update(h, params);
    // Perfectly correlated points give a singular covariance; the Euclidean
    // fallback gate (2 * 5 m) keeps everything, so the set repeats at once.
    CHECK((fit.mean - Point2(5, 5)).norm() < 1e-12);
    CHECK(std::count(fit.inliers.begin(), fit.inliers.end(), 1) == 20);
}

TEST_CASE("merge_layers: first-frame bootstrap registers the square") {
    VGraph g;
    const PolygonSet polys = set_of({square_at({0, 0}, 2.0)});
    const LocalLayer layer = build_local_layer(polys, g.params, 40.0);
    g.merge_layers(layer);

    CHECK(g.vertices().size() == 4);
    int contour = 0, vis = 0;
    for (const auto& [k, e] : g.edges()) {
        (e.kind == EdgeKind::Contour ? contour : vis) += 1;
    }
    CHECK(contour == 4);
    CHECK(vis == 0);
    for (const auto& [id, v] : g.vertices()) {
        CHECK(v.label == SpaceLabel::Unknown);
        CHECK(v.hit_count == 1);
        // Mutual contour neighbors.
        CHECK(g.vertices().at(v.next_id).prev_id == id);
        CHECK(g.vertices().at(v.prev_id).next_id == id);
    }
}

TEST_CASE("merge_layers: re-observation shifts positions toward the robust mean") {
    VGraph g;
    const PolygonSet frame0 = set_of({square_at({0, 0}, 2.0)});
    g.merge_layers(build_local_layer(frame0, g.params, 40.0));

    PolygonSet frame1 = set_of({square_at({0.1, 0.0}, 2.0)}, {0, 0}, 1);
    g.merge_layers(build_local_layer(frame1, g.params, 40.0));

    CHECK(g.vertices().size() == 4);  // no additions, no removals
    for (const auto& [id, v] : g.vertices()) {
        CHECK(v.hit_count == 2);
        // Robust mean of the two observations: corners move +0.05 in x.
        CHECK(std::abs(std::abs(v.position.x() - 0.05) - 1.0) < 1e-9);
        CHECK(std::abs(std::abs(v.position.y()) - 1.0) < 1e-9);
    }
    // Edge lengths track the updated positions.
    for (const auto& [k, e] : g.edges()) {
        const double d =
            (g.vertices().at(e.a).position - g.vertices().at(e.b).position).norm();
        CHECK(e.length == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("merge_layers: stale vertex is voted out with its edges") {
    VGraph g;
    // Frame 0 registers a square and a triangle.
    const Polygon sq = square_at({0, 0}, 2.0);
    Polygon tri;
    tri.vertices = {{6, 2}, {8, 2}, {7, 4}};
    g.merge_layers(build_local_layer(set_of({sq, tri}), g.params, 40.0));
    CHECK(g.vertices().size() == 7);

    // The triangle disappears; robot observes from a spot with clear view.
    for (int frame = 1; frame <= g.params.vote_miss_limit; ++frame) {
        PolygonSet only_sq = set_of({sq}, {0, -6}, frame);
        g.merge_layers(build_local_layer(only_sq, g.params, 40.0));
    }
    CHECK(g.vertices().size() == 4);
    for (const auto& [k, e] : g.edges()) {
        CHECK(g.vertices().count(e.a));
        CHECK(g.vertices().count(e.b));
        CHECK(e.kind == EdgeKind::Contour);
    }
}

TEST_CASE("merge_layers: occluded vertices are not voted out") {
    VGraph g;
    const Polygon near_sq = square_at({0, 3}, 2.0);
    const Polygon far_sq = square_at({0, 8}, 2.0);
    g.merge_layers(build_local_layer(set_of({near_sq, far_sq}, {0, 0}), g.params, 40.0));
    CHECK(g.vertices().size() == 8);

    // Later frames only see the near square (the far one is hidden behind
    // it); the far vertices must survive the vote.
    for (int frame = 1; frame <= 2 * g.params.vote_miss_limit; ++frame) {
        PolygonSet only_near = set_of({near_sq}, {0, 0}, frame);
        g.merge_layers(build_local_layer(only_near, g.params, 40.0));
    }
    CHECK(g.vertices().size() == 8);
}

TEST_CASE("merge_layers: voting liveness for continuously observed vertices") {
    VGraph g;
    const Polygon sq = square_at({0, 0}, 2.0);
    for (int frame = 0; frame < 12; ++frame) {
        g.merge_layers(build_local_layer(set_of({sq}, {0, -5}, frame), g.params, 40.0));
    }
    CHECK(g.vertices().size() == 4);
    for (const auto& [id, v] : g.vertices()) {
        CHECK(v.miss_count == 0);
        CHECK(v.hit_count == 12);
    }
}

TEST_CASE("merge_layers: active visibility edges never cross observed contours") {
    MergeParams params;
    std::mt19937 rng(31);
    VGraph g;
    g.params = params;
    std::vector<Polygon> polys;
    auto omap = oracle::random_convex_map(rng, 30.0, 6, 1.0, 2.5, 2.0);
    for (const auto& op : omap) {
        Polygon p;
        for (const auto& v : op) p.vertices.emplace_back(v.x, v.y);
        polys.push_back(p);
    }
    // Observe the map from a few origins.
    for (int frame = 0; frame < 4; ++frame) {
        const Point2 origin{7.0 * frame, 15.0};
        g.merge_layers(build_local_layer(set_of(polys, origin, frame), g.params, 60.0));
    }
    // Invariant: no active visibility edge crosses any contour edge.
    for (const auto& [k, e] : g.edges()) {
        if (e.kind != EdgeKind::Visibility || e.status != EdgeStatus::Active) continue;
        const Segment2 seg{g.vertices().at(e.a).position, g.vertices().at(e.b).position};
        CHECK_FALSE(g.segment_hits_contour(seg));
    }
    // Edge lengths equal endpoint distance.
    for (const auto& [k, e] : g.edges()) {
        const double d = (g.vertices().at(e.a).position - g.vertices().at(e.b).position).norm();
        CHECK(e.length == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("classify_polygons: new polygons age before joining, movers stay transient") {
    VGraph g;
    const Polygon sq = square_at({5, 5}, 2.0);

    auto [m0, t0] = g.classify_polygons(set_of({sq}));
    CHECK(m0.empty());
    CHECK(t0.size() == 1);
    auto [m1, t1] = g.classify_polygons(set_of({sq}, {0, 0}, 1));
    CHECK(m1.empty());
    auto [m2, t2] = g.classify_polygons(set_of({sq}, {0, 0}, 2));
    CHECK(m2.size() == 1);  // age 3 = dynamic_age
    CHECK(t2.empty());

    // A polygon translating every frame never matures.
    VGraph g2;
    for (int frame = 0; frame < 10; ++frame) {
        const Polygon walker = square_at({frame * 0.4, 0.0}, 0.6);
        auto [m, t] = g2.classify_polygons(set_of({walker}, {0, 0}, frame));
        CHECK(m.empty());
        CHECK(t.size() == 1);
    }

    // Known geometry classifies mature immediately.
    VGraph g3;
    g3.merge_layers(build_local_layer(set_of({sq}), g3.params, 40.0));
    auto [m3, t3] = g3.classify_polygons(set_of({sq}, {0, 0}, 5));
    CHECK(m3.size() == 1);
}

TEST_CASE("update_dynamic_blocking: block while overlapped, reconnect after") {
    VGraph g;
    g.params.long_edge_threshold = 10.0;
    const Polygon left = square_at({0.5, 0.5}, 1.0);
    const Polygon right = square_at({6.5, 0.5}, 1.0);
    const PolygonSet polys = set_of({left, right});
    g.merge_layers(build_local_layer(polys, g.params, 40.0));

    int active_vis = 0;
    for (const auto& [k, e] : g.edges()) {
        if (e.kind == EdgeKind::Visibility) ++active_vis;
    }
    REQUIRE(active_vis > 0);

    const Rect region{{-20, -20}, {20, 20}};
    // Pedestrian polygon stands between the squares.
    PolygonSet ped = set_of({square_at({3.5, 0.5}, 0.8)});
    g.update_dynamic_blocking(ped, {0, 0}, region);
    int blocked = 0;
    for (const auto& [k, e] : g.edges()) {
        if (e.status == EdgeStatus::Blocked) ++blocked;
    }
    CHECK(blocked >= 1);

    // Pedestrian moves away: blocked edges reconnect.
    PolygonSet clear = set_of({});
    g.update_dynamic_blocking(clear, {0, 0}, region);
    for (const auto& [k, e] : g.edges()) {
        CHECK(e.status == EdgeStatus::Active);
    }
}

TEST_CASE("update_dynamic_blocking: edge leaving the sensed region stays blocked") {
    VGraph g;
    g.params.long_edge_threshold = 30.0;
    const PolygonSet polys = set_of({square_at({0.5, 0.5}, 1.0), square_at({24.5, 0.5}, 1.0)});
    g.merge_layers(build_local_layer(polys, g.params, 80.0));

    const Rect big{{-40, -40}, {40, 40}};
    PolygonSet ped = set_of({square_at({12.0, 0.5}, 0.8)});
    g.update_dynamic_blocking(ped, {0, 0}, big);
    int blocked = 0;
    for (const auto& [k, e] : g.edges()) {
        if (e.status == EdgeStatus::Blocked) ++blocked;
    }
    REQUIRE(blocked >= 1);

    // Pedestrian clears, but the sensed region no longer covers the far
    // endpoints, so the long edges cannot be confirmed and stay blocked.
    const Rect small{{-10, -10}, {10, 10}};
    PolygonSet clear = set_of({});
    g.update_dynamic_blocking(clear, {0, 0}, small);
    int still_blocked = 0;
    for (const auto& [k, e] : g.edges()) {
        if (e.status == EdgeStatus::Blocked) ++still_blocked;
    }
    CHECK(still_blocked == blocked);
}

TEST_CASE("update_space_labels: visibility marks free, labels are monotone") {
    VGraph g;
    const Polygon near_sq = square_at({0, 3}, 2.0);
    const Polygon far_sq = square_at({0, 8}, 2.0);
    g.merge_layers(build_local_layer(set_of({near_sq, far_sq}, {0, 0}), g.params, 40.0));

    g.update_space_labels({0, 0});
    int free_before = 0;
    for (const auto& [id, v] : g.vertices()) {
        if (v.label == SpaceLabel::Free) ++free_before;
    }
    CHECK(free_before > 0);
    // The far square's far corners are occluded by the near square.
    CHECK(free_before < static_cast<int>(g.vertices().size()));

    // From a new pose more becomes visible; nothing reverts.
    std::set<int> was_free;
    for (const auto& [id, v] : g.vertices()) {
        if (v.label == SpaceLabel::Free) was_free.insert(id);
    }
    g.update_space_labels({6, 6});
    int free_after = 0;
    for (const auto& [id, v] : g.vertices()) {
        if (v.label == SpaceLabel::Free) ++free_after;
        if (was_free.count(id)) CHECK(v.label == SpaceLabel::Free);
    }
    CHECK(free_after >= free_before);
}
