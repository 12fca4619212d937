#pragma once
// Path search over the global layer: the robot and goal attach as transient
// vertices with non-blocking visibility edges, then a uniform-cost search
// finds the shortest route. Attemptable mode traverses free and unknown
// vertices; non-attemptable mode stays in confirmed free space. The graph can
// be saved and reloaded as a prior map.

#include "vgnav/geometry.hpp"
#include "vgnav/vgraph.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace vgnav {

enum class PlanMode : std::uint8_t { Attemptable, NonAttemptable };

enum class PlanStatus : std::uint8_t {
    Found,
    NoRoute,               // attemptable search exhausted
    GoalUnreachableKnown,  // non-attemptable search exhausted
    TerminalIsolated,      // a terminal has no connection into the graph
    TerminalInObstacle,    // a terminal lies inside observed material
};

const char* to_string(PlanStatus status);

struct PlanRequest {
    Point2 start{0.0, 0.0};
    Point2 goal{0.0, 0.0};
    PlanMode mode = PlanMode::Attemptable;
};

struct NavPath {
    std::vector<Point2> waypoints;  // first == start, last == goal
    double length = 0.0;
    bool via_unknown = false;
};

struct PlanResult {
    PlanStatus status = PlanStatus::NoRoute;
    NavPath path;

    bool found() const { return status == PlanStatus::Found; }
};

struct PlanError : std::runtime_error {
    PlanError(PlanStatus code_, const std::string& what_) : std::runtime_error(what_), code(code_) {}
    PlanStatus code;
};

struct TerminalConnection {
    int vertex_id = -1;
    double length = 0.0;
};

// Connects a terminal point to every global vertex reachable by a
// non-blocking visibility edge (escape-gated beyond long_edge_threshold; in
// non-attemptable mode only free-labeled vertices qualify).
// Throws PlanError: TerminalInObstacle, TerminalIsolated.
std::vector<TerminalConnection> connect_terminal(const Point2& p, const VGraph& graph,
                                                 PlanMode mode);

// Minimal-total-length path over active edges plus terminal connections.
// Ties break by (length, hop count, smaller predecessor id) so results are
// deterministic for a given snapshot.
PlanResult plan(const PlanRequest& req, const VGraph& graph);

// Versioned line-oriented text serialization:
//   vgraph 1
//   V <id> <x> <y> <polygon_id> <prev_id> <next_id> <free|unknown> <boundary>
//   E <id_a> <id_b> <contour|vis> <active|blocked>
// Floats print in shortest round-trip form, so save/load is bit-exact.
void save_graph(const VGraph& graph, std::ostream& os);

struct GraphIoError : std::runtime_error {
    GraphIoError(int line_, const std::string& what_)
        : std::runtime_error("graph file line " + std::to_string(line_) + ": " + what_),
          line(line_) {}
    int line;
};

VGraph load_graph(std::istream& is);

}  // namespace vgnav
