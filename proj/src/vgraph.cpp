#include "vgnav/vgraph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace vgnav {

bool is_escaping(const Point2& vertex, const Point2& prev, const Point2& next,
                 const Point2& dir) {
    return is_escaping_direction(vertex, prev, next, dir);
}

namespace {

Rect region_around(const Point2& center, double extent) {
    const Point2 half(extent / 2.0, extent / 2.0);
    return Rect{center - half, center + half};
}

Point2 polygon_centroid(const Polygon& poly) {
    Point2 c{0.0, 0.0};
    for (const Point2& v : poly.vertices) c += v;
    return c / static_cast<double>(poly.vertices.size());
}

// Open-mode crossing of s against any contour edge of the polygon set, or a
// midpoint buried in material. Catches both edge crossings and the
// vertex-to-vertex diagonals that graze no edge.
bool segment_blocked_by_polygons(const Segment2& s, std::span<const Polygon> polys) {
    for (const Polygon& poly : polys) {
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Segment2 edge{poly.vertices[i], poly.vertices[(i + 1) % n]};
            if (segments_intersect(s, edge, SegMode::Open)) return true;
        }
    }
    return point_in_obstacle_set(polys, 0.5 * (s.a + s.b));
}

}  // namespace

LocalLayer build_local_layer(const PolygonSet& polys, const MergeParams& params,
                             const Rect& region) {
    LocalLayer layer;
    layer.polygons = polys.polygons;
    layer.robot = polys.origin;
    layer.region = region;
    layer.frame_index = polys.frame_index;

    // Vertices in polygon order; ring order is the CCW vertex order.
    std::vector<int> poly_start;
    for (std::size_t pi = 0; pi < layer.polygons.size(); ++pi) {
        const Polygon& poly = layer.polygons[pi];
        const int base = static_cast<int>(layer.vertices.size());
        poly_start.push_back(base);
        const int n = static_cast<int>(poly.size());
        for (int i = 0; i < n; ++i) {
            LocalVertex v;
            v.pos = poly.vertices[static_cast<std::size_t>(i)];
            v.poly = static_cast<int>(pi);
            v.prev = base + (i + n - 1) % n;
            v.next = base + (i + 1) % n;
            v.boundary = poly.vertex_on_boundary(static_cast<std::size_t>(i));
            layer.vertices.push_back(v);
        }
        for (int i = 0; i < n; ++i) {
            layer.edges.push_back({base + i, base + (i + 1) % n, EdgeKind::Contour});
        }
    }

    // Visibility pairs with pass-around reduction for long edges.
    const int vcount = static_cast<int>(layer.vertices.size());
    for (int i = 0; i < vcount; ++i) {
        const LocalVertex& u = layer.vertices[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < vcount; ++j) {
            const LocalVertex& v = layer.vertices[static_cast<std::size_t>(j)];
            if (u.poly == v.poly && (u.next == j || u.prev == j)) continue;
            ++layer.pairs_examined;
            const double len = (u.pos - v.pos).norm();
            if (len <= kGeomEps) continue;
            const Segment2 seg{u.pos, v.pos};
            if (segment_blocked_by_polygons(seg, layer.polygons)) continue;
            if (len > params.long_edge_threshold) {
                const Point2 dir_uv = (v.pos - u.pos) / len;
                const auto& up = layer.vertices[static_cast<std::size_t>(u.prev)].pos;
                const auto& un = layer.vertices[static_cast<std::size_t>(u.next)].pos;
                if (!is_escaping(u.pos, up, un, dir_uv)) continue;
                const auto& vp = layer.vertices[static_cast<std::size_t>(v.prev)].pos;
                const auto& vn = layer.vertices[static_cast<std::size_t>(v.next)].pos;
                if (!is_escaping(v.pos, vp, vn, -dir_uv)) continue;
            }
            layer.edges.push_back({i, j, EdgeKind::Visibility});
        }
    }
    return layer;
}

LocalLayer build_local_layer(const PolygonSet& polys, const MergeParams& params, double extent) {
    return build_local_layer(polys, params, region_around(polys.origin, extent));
}

std::vector<std::pair<int, int>> mutual_nearest_matches(std::span<const Point2> from,
                                                        std::span<const Point2> to,
                                                        double max_dist) {
    std::vector<std::pair<int, int>> matches;
    if (from.empty() || to.empty()) return matches;

    auto nearest = [](const Point2& p, std::span<const Point2> pts) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < static_cast<int>(pts.size()); ++k) {
            const double d = (pts[static_cast<std::size_t>(k)] - p).norm();
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        return std::pair<int, double>{best, best_d};
    };

    std::vector<int> to_nearest(to.size());
    for (int j = 0; j < static_cast<int>(to.size()); ++j) {
        to_nearest[static_cast<std::size_t>(j)] = nearest(to[static_cast<std::size_t>(j)], from).first;
    }
    for (int i = 0; i < static_cast<int>(from.size()); ++i) {
        const auto [j, d] = nearest(from[static_cast<std::size_t>(i)], to);
        if (j >= 0 && d < max_dist && to_nearest[static_cast<std::size_t>(j)] == i) {
            matches.emplace_back(i, j);
        }
    }
    return matches;
}

RobustFit robust_update(std::span<const Point2> history, const MergeParams& params) {
    if (history.empty()) {
        throw std::invalid_argument("robust_update: empty history");
    }
    const std::size_t n = history.size();
    RobustFit fit;
    fit.inliers.assign(n, 1);

    auto stats_of = [&](const std::vector<std::uint8_t>& mask) {
        Point2 mean{0.0, 0.0};
        int count = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!mask[k]) continue;
            mean += history[k];
            ++count;
        }
        mean /= static_cast<double>(count);
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        for (std::size_t k = 0; k < n; ++k) {
            if (!mask[k]) continue;
            const Point2 d = history[k] - mean;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(count);
        return std::pair<Point2, Eigen::Matrix2d>{mean, cov};
    };

    for (int iter = 1; iter <= params.robust_max_iters; ++iter) {
        fit.iterations = iter;
        const auto [mean, cov] = stats_of(fit.inliers);
        fit.mean = mean;

        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
        const double lmin = es.eigenvalues()(0);

        std::vector<std::uint8_t> next(n, 0);
        if (lmin < 1e-12) {
            // Near-singular covariance: Euclidean gate with a noise floor.
            const double sigma = std::max(std::sqrt(cov.trace() / 2.0), params.sigma_floor);
            const double gate = params.inlier_gate * sigma;
            for (std::size_t k = 0; k < n; ++k) {
                next[k] = (history[k] - mean).norm() <= gate ? 1 : 0;
            }
        } else {
            const Eigen::Matrix2d inv = cov.inverse();
            const double gate2 = params.inlier_gate * params.inlier_gate;
            for (std::size_t k = 0; k < n; ++k) {
                const Point2 d = history[k] - mean;
                next[k] = d.dot(inv * d) <= gate2 ? 1 : 0;
            }
        }

        if (std::find(next.begin(), next.end(), 1) == next.end()) break;  // keep previous set
        if (next == fit.inliers) break;
        fit.inliers = next;
    }

    const auto [mean, cov] = stats_of(fit.inliers);
    (void)cov;
    fit.mean = mean;
    return fit;
}

std::pair<PolygonSet, PolygonSet> VGraph::classify_polygons(const PolygonSet& polys) {
    PolygonSet mature;
    PolygonSet transient;
    mature.origin = transient.origin = polys.origin;
    mature.frame_index = transient.frame_index = polys.frame_index;

    for (PendingPolygon& p : pending_) p.matched = false;

    std::vector<PendingPolygon> next_pending;
    for (const Polygon& poly : polys.polygons) {
        // Known geometry: at least half the vertices have a registered twin.
        int matched_vertices = 0;
        for (const Point2& v : poly.vertices) {
            for (const auto& [id, g] : vertices_) {
                if ((g.position - v).norm() < params.assoc_dist) {
                    ++matched_vertices;
                    break;
                }
            }
        }
        if (2 * matched_vertices >= static_cast<int>(poly.size())) {
            mature.polygons.push_back(poly);
            continue;
        }

        // Otherwise age it through the persistence tracker. Only polygons
        // that hold still accumulate age; moving ones stay transient.
        const Point2 c = polygon_centroid(poly);
        const double match_gate = std::max(1.0, 2.0 * params.assoc_dist);
        int best = -1;
        double best_d = match_gate;
        for (int k = 0; k < static_cast<int>(pending_.size()); ++k) {
            if (pending_[static_cast<std::size_t>(k)].matched) continue;
            const double d = (pending_[static_cast<std::size_t>(k)].centroid - c).norm();
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        int age = 1;
        if (best >= 0) {
            pending_[static_cast<std::size_t>(best)].matched = true;
            const bool still = best_d <= 0.5 * params.assoc_dist;
            age = still ? pending_[static_cast<std::size_t>(best)].age + 1 : 1;
        }
        if (age >= params.dynamic_age) {
            mature.polygons.push_back(poly);
        } else {
            transient.polygons.push_back(poly);
            PendingPolygon entry;
            entry.poly = poly;
            entry.centroid = c;
            entry.age = age;
            next_pending.push_back(std::move(entry));
        }
    }
    pending_ = std::move(next_pending);
    transient_ = transient.polygons;
    return {std::move(mature), std::move(transient)};
}

std::vector<std::pair<int, int>> VGraph::associate_vertices(const LocalLayer& local) const {
    const Rect search = local.region.inflated(params.assoc_dist);
    std::vector<int> gids;
    std::vector<Point2> gpos;
    for (const auto& [id, v] : vertices_) {
        if (!search.contains(v.position)) continue;
        gids.push_back(id);
        gpos.push_back(v.position);
    }
    std::vector<Point2> lpos;
    lpos.reserve(local.vertices.size());
    for (const LocalVertex& v : local.vertices) lpos.push_back(v.pos);

    std::vector<std::pair<int, int>> out;
    for (const auto& [li, gi] : mutual_nearest_matches(lpos, gpos, params.assoc_dist)) {
        out.emplace_back(li, gids[static_cast<std::size_t>(gi)]);
    }
    return out;
}

bool VGraph::sensed(const Point2& p, const Point2& robot, const Rect& region,
                    const LocalLayer& local) const {
    if (!region.contains(p)) return false;
    if (point_in_obstacle_set(local.polygons, p)) return true;  // buried in new material
    if ((p - robot).norm() <= kGeomEps) return true;
    const Segment2 los{robot, p};
    for (const Polygon& poly : local.polygons) {
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (segments_intersect(los, {poly.vertices[i], poly.vertices[(i + 1) % n]},
                                   SegMode::Open)) {
                return false;
            }
        }
    }
    for (const Polygon& poly : transient_) {
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (segments_intersect(los, {poly.vertices[i], poly.vertices[(i + 1) % n]},
                                   SegMode::Open)) {
                return false;
            }
        }
    }
    return true;
}

void VGraph::remove_vertex(int id) {
    auto it = vertices_.find(id);
    if (it == vertices_.end()) return;
    auto ring_it = rings_.find(it->second.polygon_id);
    if (ring_it != rings_.end()) {
        auto& ring = ring_it->second;
        ring.erase(std::remove(ring.begin(), ring.end(), id), ring.end());
        if (ring.empty()) rings_.erase(ring_it);
    }
    for (auto e = edges_.begin(); e != edges_.end();) {
        if (e->second.a == id || e->second.b == id) {
            e = edges_.erase(e);
        } else {
            ++e;
        }
    }
    vertices_.erase(it);
    ++revision_;
}

void VGraph::sync_ring_edges(int polygon_id) {
    auto ring_it = rings_.find(polygon_id);
    if (ring_it == rings_.end()) return;
    const auto& ring = ring_it->second;
    const std::size_t n = ring.size();

    std::set<EdgeKey> desired;
    for (std::size_t i = 0; i < n; ++i) {
        desired.insert(make_edge_key(ring[i], ring[(i + 1) % n]));
    }
    // Drop contour edges of this polygon that are no longer consecutive.
    for (auto e = edges_.begin(); e != edges_.end();) {
        const VisEdge& edge = e->second;
        const bool mine = edge.kind == EdgeKind::Contour &&
                          vertices_.count(edge.a) && vertices_.count(edge.b) &&
                          vertices_.at(edge.a).polygon_id == polygon_id &&
                          vertices_.at(edge.b).polygon_id == polygon_id;
        if (mine && !desired.count(e->first)) {
            e = edges_.erase(e);
        } else {
            ++e;
        }
    }
    for (const EdgeKey& key : desired) {
        auto e = edges_.find(key);
        if (e == edges_.end()) {
            VisEdge edge;
            edge.a = key.first;
            edge.b = key.second;
            edge.kind = EdgeKind::Contour;
            edge.status = EdgeStatus::Active;
            edge.length = (vertices_.at(key.first).position - vertices_.at(key.second).position).norm();
            edges_.emplace(key, edge);
        } else {
            e->second.kind = EdgeKind::Contour;
        }
    }
}

void VGraph::refresh_neighbor_fields(int polygon_id) {
    auto ring_it = rings_.find(polygon_id);
    if (ring_it == rings_.end()) return;
    const auto& ring = ring_it->second;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        NavVertex& v = vertices_.at(ring[i]);
        v.prev_id = ring[(i + n - 1) % n];
        v.next_id = ring[(i + 1) % n];
    }
}

void VGraph::recompute_edge_lengths() {
    for (auto& [key, edge] : edges_) {
        edge.length = (vertices_.at(edge.a).position - vertices_.at(edge.b).position).norm();
    }
}

void VGraph::merge_layers(const LocalLayer& local) {
    const auto assoc = associate_vertices(local);
    std::map<int, int> l2g;
    std::set<int> matched_globals;
    for (const auto& [li, gid] : assoc) {
        l2g[li] = gid;
        matched_globals.insert(gid);
    }

    // (a) robust position update for associated vertices.
    for (const auto& [li, gid] : assoc) {
        NavVertex& v = vertices_.at(gid);
        v.history.push_back(local.vertices[static_cast<std::size_t>(li)].pos);
        while (static_cast<int>(v.history.size()) > params.history_depth) v.history.pop_front();
        std::vector<Point2> h(v.history.begin(), v.history.end());
        v.position = robust_update(h, params).mean;
        v.hit_count += 1;
        v.votes.push_back(1);
        while (static_cast<int>(v.votes.size()) > params.vote_window) v.votes.pop_front();
        v.boundary = local.vertices[static_cast<std::size_t>(li)].boundary;
    }

    // (b) voting removal of stale vertices inside the sensed region.
    // Boundary-flagged vertices are exempt only while they still hug the
    // current region border; an old clip artifact deep inside the region is
    // votable like any other vertex.
    const double border_margin = 1.0;
    std::vector<int> to_remove;
    for (auto& [gid, v] : vertices_) {
        if (matched_globals.count(gid)) continue;
        if (!local.region.contains(v.position)) continue;
        if (v.boundary) {
            const Rect inner = local.region.inflated(-border_margin);
            if (!inner.contains(v.position)) continue;
        }
        if (!sensed(v.position, local.robot, local.region, local)) continue;
        v.miss_count += 1;
        v.votes.push_back(0);
        while (static_cast<int>(v.votes.size()) > params.vote_window) v.votes.pop_front();
        const int misses = static_cast<int>(std::count(v.votes.begin(), v.votes.end(), 0));
        if (misses >= params.vote_miss_limit) to_remove.push_back(gid);
    }
    std::set<int> touched_polygons;
    for (int gid : to_remove) {
        touched_polygons.insert(vertices_.at(gid).polygon_id);
        remove_vertex(gid);
    }
    // A ring reduced below 3 vertices no longer carries usable geometry.
    for (int pid : touched_polygons) {
        auto ring_it = rings_.find(pid);
        if (ring_it == rings_.end()) continue;
        if (ring_it->second.size() < 3) {
            const std::vector<int> leftovers = ring_it->second;
            for (int id : leftovers) remove_vertex(id);
        } else {
            sync_ring_edges(pid);
            refresh_neighbor_fields(pid);
        }
    }

    // (c) add unassociated local vertices. Brand-new polygons come in whole;
    // for known polygons, new vertices splice into the existing ring only
    // where their matched neighbors are still adjacent (stale vertices in
    // between first have to be voted out).
    auto local_ring_of = [&](int pi) {
        std::vector<int> ring;
        for (int li = 0; li < static_cast<int>(local.vertices.size()); ++li) {
            if (local.vertices[static_cast<std::size_t>(li)].poly == pi) ring.push_back(li);
        }
        return ring;
    };
    auto create_vertex = [&](int li, int polygon_id) {
        const LocalVertex& lv = local.vertices[static_cast<std::size_t>(li)];
        NavVertex v;
        v.id = next_vertex_id_++;
        v.position = lv.pos;
        v.polygon_id = polygon_id;
        v.label = SpaceLabel::Unknown;
        v.boundary = lv.boundary;
        v.hit_count = 1;
        v.history.push_back(lv.pos);
        v.votes.push_back(1);
        vertices_.emplace(v.id, v);
        l2g[li] = v.id;
        return v.id;
    };

    for (int pi = 0; pi < static_cast<int>(local.polygons.size()); ++pi) {
        const std::vector<int> lring = local_ring_of(pi);
        const int n = static_cast<int>(lring.size());
        if (n < 3) continue;

        int matched = 0;
        for (int li : lring) {
            if (l2g.count(li)) ++matched;
        }

        if (matched == 0) {
            const int pid = next_polygon_id_++;
            std::vector<int> ring;
            for (int li : lring) ring.push_back(create_vertex(li, pid));
            rings_[pid] = ring;
            sync_ring_edges(pid);
            refresh_neighbor_fields(pid);
            ++revision_;
            continue;
        }

        // Majority polygon among the matched vertices.
        std::map<int, int> votes_per_poly;
        for (int li : lring) {
            auto it = l2g.find(li);
            if (it == l2g.end()) continue;
            votes_per_poly[vertices_.at(it->second).polygon_id] += 1;
        }
        int target = votes_per_poly.begin()->first;
        for (const auto& [pid, count] : votes_per_poly) {
            if (count > votes_per_poly[target]) target = pid;
        }
        auto ring_it = rings_.find(target);
        if (ring_it == rings_.end()) continue;

        bool changed = false;
        for (int k = 0; k < n; ++k) {
            const int li = lring[static_cast<std::size_t>(k)];
            if (l2g.count(li)) continue;
            // Maximal run of new vertices starting at k.
            int end = k;
            while (end < n && !l2g.count(lring[static_cast<std::size_t>(end)])) ++end;
            const int before = lring[static_cast<std::size_t>((k + n - 1) % n)];
            const int after = (end < n) ? lring[static_cast<std::size_t>(end)]
                                        : lring[static_cast<std::size_t>(0)];
            auto bit = l2g.find(before);
            auto ait = l2g.find(after);
            if (bit != l2g.end() && ait != l2g.end()) {
                auto& ring = ring_it->second;
                const auto pos = std::find(ring.begin(), ring.end(), bit->second);
                if (pos != ring.end()) {
                    const std::size_t idx = static_cast<std::size_t>(pos - ring.begin());
                    if (ring[(idx + 1) % ring.size()] == ait->second) {
                        std::vector<int> fresh;
                        for (int r = k; r < end; ++r) {
                            fresh.push_back(create_vertex(lring[static_cast<std::size_t>(r)], target));
                        }
                        ring.insert(ring.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                                    fresh.begin(), fresh.end());
                        changed = true;
                    }
                }
            }
            k = end - 1;
        }
        if (changed) {
            sync_ring_edges(target);
            refresh_neighbor_fields(target);
            ++revision_;
        }
    }

    // (d) merge local visibility edges; re-derived edges come back active.
    for (const LocalEdge& le : local.edges) {
        if (le.kind != EdgeKind::Visibility) continue;
        auto uit = l2g.find(le.u);
        auto vit = l2g.find(le.v);
        if (uit == l2g.end() || vit == l2g.end()) continue;
        const EdgeKey key = make_edge_key(uit->second, vit->second);
        auto e = edges_.find(key);
        if (e == edges_.end()) {
            VisEdge edge;
            edge.a = key.first;
            edge.b = key.second;
            edge.kind = EdgeKind::Visibility;
            edge.status = EdgeStatus::Active;
            edges_.emplace(key, edge);
            ++revision_;
        } else if (e->second.status != EdgeStatus::Active) {
            e->second.status = EdgeStatus::Active;
            ++revision_;
        }
    }

    // (e) eliminate visibility edges that now cross observed material. Only
    // geometry overlapping the local region changed this frame.
    const Rect check_region = local.region.inflated(params.assoc_dist);
    std::vector<EdgeKey> to_erase;
    for (const auto& [key, edge] : edges_) {
        if (edge.kind != EdgeKind::Visibility) continue;
        const Segment2 seg{vertices_.at(edge.a).position, vertices_.at(edge.b).position};
        if (!segment_intersects_rect(seg, check_region)) continue;
        if (segment_blocked_by_polygons(seg, local.polygons)) to_erase.push_back(key);
    }
    for (const EdgeKey& key : to_erase) {
        edges_.erase(key);
        ++revision_;
    }

    recompute_edge_lengths();
    last_local_polys_ = local.polygons;
    ++revision_;
}

void VGraph::update_dynamic_blocking(const PolygonSet& transient, const Point2& robot,
                                     const Rect& region) {
    (void)robot;
    transient_ = transient.polygons;

    auto crossed_by = [&](const Segment2& seg, std::span<const Polygon> polys) {
        for (const Polygon& poly : polys) {
            const std::size_t n = poly.size();
            for (std::size_t i = 0; i < n; ++i) {
                if (segments_intersect(seg, {poly.vertices[i], poly.vertices[(i + 1) % n]},
                                       SegMode::Open)) {
                    return true;
                }
            }
            if (point_in_polygon(0.5 * (seg.a + seg.b), poly) == PointLocation::Inside) {
                return true;
            }
        }
        return false;
    };

    for (auto& [key, edge] : edges_) {
        const Point2& pa = vertices_.at(edge.a).position;
        const Point2& pb = vertices_.at(edge.b).position;
        const Segment2 seg{pa, pb};
        const bool hit = crossed_by(seg, transient_);
        if (hit && edge.status == EdgeStatus::Active) {
            edge.status = EdgeStatus::Blocked;
            ++revision_;
        } else if (!hit && edge.status == EdgeStatus::Blocked) {
            // Reconnect only when the whole segment is inside the sensed
            // region and no current polygon crosses it.
            if (!region.contains(pa) || !region.contains(pb)) continue;
            if (crossed_by(seg, last_local_polys_)) continue;
            edge.status = EdgeStatus::Active;
            ++revision_;
        }
    }
}

void VGraph::update_space_labels(const Point2& robot) {
    for (auto& [gid, v] : vertices_) {
        if (v.label == SpaceLabel::Free) continue;
        const double len = (v.position - robot).norm();
        if (len <= kGeomEps) {
            v.label = SpaceLabel::Free;
            continue;
        }
        const Segment2 seg{robot, v.position};
        if (segment_hits_contour(seg)) continue;
        if (segment_hits_transient(seg)) continue;
        if (len > params.long_edge_threshold && !escape_ok(v, (robot - v.position) / len)) continue;
        v.label = SpaceLabel::Free;
        ++revision_;
    }
}

void VGraph::clear() {
    vertices_.clear();
    edges_.clear();
    rings_.clear();
    pending_.clear();
    transient_.clear();
    last_local_polys_.clear();
    next_vertex_id_ = 0;
    next_polygon_id_ = 0;
    ++revision_;
}

bool VGraph::in_material(const Point2& p) const {
    bool inside = false;
    for (const auto& [pid, ring] : rings_) {
        if (ring.size() < 3) continue;
        Polygon poly;
        for (int id : ring) poly.vertices.push_back(vertices_.at(id).position);
        if (point_in_polygon(p, poly) == PointLocation::Inside) inside = !inside;
    }
    return inside;
}

bool VGraph::segment_hits_contour(const Segment2& s) const {
    for (const auto& [key, edge] : edges_) {
        if (edge.kind != EdgeKind::Contour) continue;
        const Segment2 ce{vertices_.at(edge.a).position, vertices_.at(edge.b).position};
        if (segments_intersect(s, ce, SegMode::Open)) return true;
    }
    return false;
}

bool VGraph::segment_hits_transient(const Segment2& s) const {
    for (const Polygon& poly : transient_) {
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (segments_intersect(s, {poly.vertices[i], poly.vertices[(i + 1) % n]},
                                   SegMode::Open)) {
                return true;
            }
        }
        if (point_in_polygon(0.5 * (s.a + s.b), poly) == PointLocation::Inside) return true;
    }
    return false;
}

bool VGraph::escape_ok(const NavVertex& v, const Point2& dir) const {
    auto pit = vertices_.find(v.prev_id);
    auto nit = vertices_.find(v.next_id);
    if (pit == vertices_.end() || nit == vertices_.end()) return true;
    return is_escaping(v.position, pit->second.position, nit->second.position, dir);
}

void VGraph::adopt(std::map<int, NavVertex> vertices, std::map<EdgeKey, VisEdge> edges) {
    vertices_ = std::move(vertices);
    edges_ = std::move(edges);
    rings_.clear();
    pending_.clear();
    transient_.clear();
    last_local_polys_.clear();

    // Rebuild rings by walking next pointers.
    std::set<int> placed;
    for (const auto& [id, v] : vertices_) {
        if (placed.count(id)) continue;
        std::vector<int> ring;
        int cur = id;
        while (true) {
            if (placed.count(cur)) {
                throw std::runtime_error("vgraph adopt: contour ring does not close at vertex " +
                                         std::to_string(cur));
            }
            placed.insert(cur);
            ring.push_back(cur);
            const auto it = vertices_.find(cur);
            if (it == vertices_.end() || !vertices_.count(it->second.next_id)) {
                throw std::runtime_error("vgraph adopt: dangling contour neighbor at vertex " +
                                         std::to_string(cur));
            }
            cur = it->second.next_id;
            if (cur == id) break;
        }
        if (ring.size() < 3) {
            throw std::runtime_error("vgraph adopt: contour ring shorter than 3 vertices at vertex " +
                                     std::to_string(id));
        }
        const int pid = vertices_.at(id).polygon_id;
        rings_[pid] = ring;
    }
    for (const auto& [pid, ring] : rings_) {
        refresh_neighbor_fields(pid);
    }
    next_vertex_id_ = vertices_.empty() ? 0 : vertices_.rbegin()->first + 1;
    next_polygon_id_ = 0;
    for (const auto& [pid, ring] : rings_) next_polygon_id_ = std::max(next_polygon_id_, pid + 1);
    recompute_edge_lengths();
    ++revision_;
}

void VGraph::set_last_local_polygons(std::vector<Polygon> polys) {
    last_local_polys_ = std::move(polys);
}

}  // namespace vgnav
