#include "vgnav/planner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>

namespace vgnav {

const char* to_string(PlanStatus status) {
    switch (status) {
        case PlanStatus::Found: return "found";
        case PlanStatus::NoRoute: return "no_route";
        case PlanStatus::GoalUnreachableKnown: return "goal_unreachable_known";
        case PlanStatus::TerminalIsolated: return "terminal_isolated";
        case PlanStatus::TerminalInObstacle: return "terminal_in_obstacle";
    }
    return "unknown";
}

std::vector<TerminalConnection> connect_terminal(const Point2& p, const VGraph& graph,
                                                 PlanMode mode) {
    if (graph.in_material(p)) {
        throw PlanError(PlanStatus::TerminalInObstacle, "terminal_in_obstacle");
    }
    std::vector<TerminalConnection> out;
    for (const auto& [id, v] : graph.vertices()) {
        if (mode == PlanMode::NonAttemptable && v.label != SpaceLabel::Free) continue;
        const double len = (v.position - p).norm();
        if (len <= kGeomEps) {
            out.push_back({id, 0.0});
            continue;
        }
        const Segment2 seg{p, v.position};
        if (graph.segment_hits_contour(seg)) continue;
        if (graph.segment_hits_transient(seg)) continue;
        if (len > graph.params.long_edge_threshold &&
            !graph.escape_ok(v, (p - v.position) / len)) {
            continue;
        }
        out.push_back({id, len});
    }
    if (out.empty()) {
        throw PlanError(PlanStatus::TerminalIsolated, "terminal_isolated");
    }
    return out;
}

namespace {

// Search node ids: graph vertex ids, plus -1 for the start and -2 for the goal.
constexpr int kStartId = -1;
constexpr int kGoalId = -2;

struct SearchNode {
    double dist = std::numeric_limits<double>::infinity();
    int hops = std::numeric_limits<int>::max();
    int parent = std::numeric_limits<int>::min();
    bool done = false;
};

bool direct_terminal_edge(const Point2& a, const Point2& b, const VGraph& graph) {
    if ((a - b).norm() <= kGeomEps) return true;
    const Segment2 seg{a, b};
    if (graph.segment_hits_contour(seg)) return false;
    if (graph.segment_hits_transient(seg)) return false;
    return !graph.in_material(0.5 * (a + b));
}

}  // namespace

PlanResult plan(const PlanRequest& req, const VGraph& graph) {
    PlanResult result;

    std::vector<TerminalConnection> start_conn;
    std::vector<TerminalConnection> goal_conn;
    try {
        start_conn = connect_terminal(req.start, graph, req.mode);
    } catch (const PlanError& e) {
        if (e.code == PlanStatus::TerminalInObstacle) {
            result.status = e.code;
            return result;
        }
    }
    try {
        goal_conn = connect_terminal(req.goal, graph, req.mode);
    } catch (const PlanError& e) {
        if (e.code == PlanStatus::TerminalInObstacle) {
            result.status = e.code;
            return result;
        }
    }

    // A straight start->goal connection exists only in attemptable mode: with
    // no vertex in between its free-space status cannot be established.
    const bool direct = req.mode == PlanMode::Attemptable &&
                        direct_terminal_edge(req.start, req.goal, graph);

    if (!direct && (start_conn.empty() || goal_conn.empty())) {
        result.status = PlanStatus::TerminalIsolated;
        return result;
    }

    // Adjacency over active edges; in non-attemptable mode both endpoints
    // must be labeled free.
    std::map<int, std::vector<std::pair<int, double>>> adj;
    for (const auto& [key, e] : graph.edges()) {
        if (e.status != EdgeStatus::Active) continue;
        if (req.mode == PlanMode::NonAttemptable) {
            if (graph.vertices().at(e.a).label != SpaceLabel::Free) continue;
            if (graph.vertices().at(e.b).label != SpaceLabel::Free) continue;
        }
        adj[e.a].push_back({e.b, e.length});
        adj[e.b].push_back({e.a, e.length});
    }
    for (const TerminalConnection& c : start_conn) {
        adj[kStartId].push_back({c.vertex_id, c.length});
        adj[c.vertex_id].push_back({kStartId, c.length});
    }
    for (const TerminalConnection& c : goal_conn) {
        adj[kGoalId].push_back({c.vertex_id, c.length});
        adj[c.vertex_id].push_back({kGoalId, c.length});
    }
    if (direct) {
        const double d = (req.goal - req.start).norm();
        adj[kStartId].push_back({kGoalId, d});
        adj[kGoalId].push_back({kStartId, d});
    }

    std::map<int, SearchNode> nodes;
    nodes[kStartId].dist = 0.0;
    nodes[kStartId].hops = 0;
    nodes[kStartId].parent = kStartId;

    using QE = std::tuple<double, int, int>;  // dist, hops, node
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
    pq.push({0.0, 0, kStartId});

    while (!pq.empty()) {
        const auto [d, hops, u] = pq.top();
        pq.pop();
        SearchNode& nu = nodes[u];
        if (nu.done || d > nu.dist + 1e-12) continue;
        nu.done = true;
        if (u == kGoalId) break;
        for (const auto& [v, w] : adj[u]) {
            SearchNode& nv = nodes[v];
            if (nv.done) continue;
            const double nd = d + w;
            const double teps = 1e-12 * (1.0 + nd);
            bool better = false;
            if (nd < nv.dist - teps) {
                better = true;
            } else if (nd <= nv.dist + teps) {
                if (hops + 1 < nv.hops) {
                    better = true;
                } else if (hops + 1 == nv.hops && u < nv.parent) {
                    better = true;
                }
            }
            if (better) {
                nv.dist = nd;
                nv.hops = hops + 1;
                nv.parent = u;
                pq.push({nd, nv.hops, v});
            }
        }
    }

    const auto goal_node = nodes.find(kGoalId);
    if (goal_node == nodes.end() || !std::isfinite(goal_node->second.dist)) {
        result.status = req.mode == PlanMode::NonAttemptable ? PlanStatus::GoalUnreachableKnown
                                                             : PlanStatus::NoRoute;
        return result;
    }

    // Reconstruct, translate to waypoints, and drop zero-length steps (a
    // terminal may coincide with a graph vertex).
    std::vector<int> chain;
    for (int cur = kGoalId; cur != kStartId; cur = nodes[cur].parent) chain.push_back(cur);
    chain.push_back(kStartId);
    std::reverse(chain.begin(), chain.end());

    NavPath path;
    path.length = goal_node->second.dist;
    for (int id : chain) {
        Point2 p;
        if (id == kStartId) {
            p = req.start;
        } else if (id == kGoalId) {
            p = req.goal;
        } else {
            const NavVertex& v = graph.vertices().at(id);
            p = v.position;
            if (v.label == SpaceLabel::Unknown) path.via_unknown = true;
        }
        if (!path.waypoints.empty() && (path.waypoints.back() - p).norm() <= kGeomEps) continue;
        path.waypoints.push_back(p);
    }
    if (path.waypoints.size() < 2) {
        // Degenerate request (start == goal): report a trivial found path.
        path.waypoints = {req.start, req.goal};
    }
    result.status = PlanStatus::Found;
    result.path = std::move(path);
    return result;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

double parse_double(const std::string& tok, int line) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
        throw GraphIoError(line, "bad float `" + tok + "`");
    }
    return v;
}

}  // namespace

void save_graph(const VGraph& graph, std::ostream& os) {
    os << "vgraph 1\n";
    for (const auto& [id, v] : graph.vertices()) {
        os << "V " << id << " " << fmt_double(v.position.x()) << " " << fmt_double(v.position.y())
           << " " << v.polygon_id << " " << v.prev_id << " " << v.next_id << " "
           << (v.label == SpaceLabel::Free ? "free" : "unknown") << " " << (v.boundary ? 1 : 0)
           << "\n";
    }
    for (const auto& [key, e] : graph.edges()) {
        os << "E " << e.a << " " << e.b << " "
           << (e.kind == EdgeKind::Contour ? "contour" : "vis") << " "
           << (e.status == EdgeStatus::Active ? "active" : "blocked") << "\n";
    }
}

VGraph load_graph(std::istream& is) {
    std::string line;
    int lineno = 0;

    if (!std::getline(is, line)) throw GraphIoError(1, "empty file");
    ++lineno;
    if (line != "vgraph 1") throw GraphIoError(1, "bad header `" + line + "` (want `vgraph 1`)");

    std::map<int, NavVertex> vertices;
    std::map<EdgeKey, VisEdge> edges;

    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "V") {
            std::string sx, sy, slabel;
            NavVertex v;
            int boundary = 0;
            ss >> v.id >> sx >> sy >> v.polygon_id >> v.prev_id >> v.next_id >> slabel >> boundary;
            if (!ss) throw GraphIoError(lineno, "malformed vertex record");
            v.position = {parse_double(sx, lineno), parse_double(sy, lineno)};
            if (!std::isfinite(v.position.x()) || !std::isfinite(v.position.y())) {
                throw GraphIoError(lineno, "non-finite vertex position");
            }
            if (slabel == "free") {
                v.label = SpaceLabel::Free;
            } else if (slabel == "unknown") {
                v.label = SpaceLabel::Unknown;
            } else {
                throw GraphIoError(lineno, "bad label `" + slabel + "`");
            }
            v.boundary = boundary != 0;
            v.hit_count = 1;
            v.history.push_back(v.position);
            if (vertices.count(v.id)) {
                throw GraphIoError(lineno, "duplicate vertex id " + std::to_string(v.id));
            }
            vertices.emplace(v.id, std::move(v));
        } else if (tag == "E") {
            std::string skind, sstatus;
            int a = 0, b = 0;
            ss >> a >> b >> skind >> sstatus;
            if (!ss) throw GraphIoError(lineno, "malformed edge record");
            if (!vertices.count(a)) {
                throw GraphIoError(lineno, "edge references missing vertex id " + std::to_string(a));
            }
            if (!vertices.count(b)) {
                throw GraphIoError(lineno, "edge references missing vertex id " + std::to_string(b));
            }
            if (a == b) throw GraphIoError(lineno, "degenerate edge " + std::to_string(a));
            VisEdge e;
            e.a = std::min(a, b);
            e.b = std::max(a, b);
            if (skind == "contour") {
                e.kind = EdgeKind::Contour;
            } else if (skind == "vis") {
                e.kind = EdgeKind::Visibility;
            } else {
                throw GraphIoError(lineno, "bad edge kind `" + skind + "`");
            }
            if (sstatus == "active") {
                e.status = EdgeStatus::Active;
            } else if (sstatus == "blocked") {
                e.status = EdgeStatus::Blocked;
            } else {
                throw GraphIoError(lineno, "bad edge status `" + sstatus + "`");
            }
            edges.emplace(make_edge_key(a, b), e);
        } else {
            throw GraphIoError(lineno, "unknown record `" + tag + "`");
        }
    }

    // Structural validation before adopting.
    for (const auto& [id, v] : vertices) {
        if (!vertices.count(v.prev_id) || !vertices.count(v.next_id)) {
            throw GraphIoError(lineno, "vertex " + std::to_string(id) +
                                           " has dangling contour neighbors");
        }
        if (vertices.at(v.next_id).prev_id != id || vertices.at(v.prev_id).next_id != id) {
            throw GraphIoError(lineno, "vertex " + std::to_string(id) +
                                           " has inconsistent contour neighbors");
        }
    }

    VGraph graph;
    try {
        graph.adopt(std::move(vertices), std::move(edges));
    } catch (const std::runtime_error& e) {
        throw GraphIoError(lineno, e.what());
    }
    return graph;
}

}  // namespace vgnav
