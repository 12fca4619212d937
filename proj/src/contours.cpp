#include "vgnav/contours.hpp"

#include <array>
#include <cstdlib>

namespace vgnav {

namespace {

// 8-neighborhood in clockwise order starting east, in (drow, dcol).
constexpr std::array<std::pair<int, int>, 8> kDirs = {{
    {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1},
}};

int dir_index(int drow, int dcol) {
    for (int k = 0; k < 8; ++k) {
        if (kDirs[k].first == drow && kDirs[k].second == dcol) return k;
    }
    return 0;
}

struct Tracer {
    // Label image: 0 background, 1 unvisited foreground, +/-nbd border marks.
    std::vector<int> f;
    int w = 0;
    int h = 0;

    int get(int row, int col) const {
        if (row < 0 || col < 0 || row >= h || col >= w) return 0;
        return f[static_cast<std::size_t>(row) * w + col];
    }
    void set(int row, int col, int v) { f[static_cast<std::size_t>(row) * w + col] = v; }
};

}  // namespace

std::vector<Polygon> extract_contours(const RasterImage& img, double threshold) {
    Tracer t;
    t.w = img.width;
    t.h = img.height;
    t.f.assign(static_cast<std::size_t>(t.w) * t.h, 0);
    for (int row = 0; row < t.h; ++row) {
        for (int col = 0; col < t.w; ++col) {
            if (img.at(col, row) >= threshold) t.set(row, col, 1);
        }
    }

    std::vector<Polygon> out;
    int nbd = 1;

    for (int row = 0; row < t.h; ++row) {
        for (int col = 0; col < t.w; ++col) {
            const int fij = t.get(row, col);
            if (fij == 0) continue;

            bool hole = false;
            int r2 = row, c2 = col;
            if (fij == 1 && t.get(row, col - 1) == 0) {
                c2 = col - 1;
            } else if (fij >= 1 && t.get(row, col + 1) == 0) {
                hole = true;
                c2 = col + 1;
            } else {
                continue;
            }
            ++nbd;

            std::vector<std::pair<int, int>> chain;

            // 3.1: clockwise search around (row,col) from (r2,c2) for a
            // foreground pixel.
            const int start_dir = dir_index(r2 - row, c2 - col);
            int found = -1;
            for (int k = 1; k <= 8; ++k) {
                const int d = (start_dir + k) % 8;
                if (t.get(row + kDirs[d].first, col + kDirs[d].second) != 0) {
                    found = d;
                    break;
                }
            }
            if (found < 0) {
                // Isolated pixel; mark and move on (too small to be a polygon).
                t.set(row, col, -nbd);
                continue;
            }
            int r1 = row + kDirs[found].first;
            int c1 = col + kDirs[found].second;

            // 3.2
            r2 = r1;
            c2 = c1;
            int r3 = row, c3 = col;

            while (true) {
                chain.emplace_back(r3, c3);

                // 3.3: counterclockwise search around (r3,c3) starting just
                // after (r2,c2); remember whether the east neighbor was
                // examined while it is background.
                const int from = dir_index(r2 - r3, c2 - c3);
                bool east_seen_zero = false;
                int r4 = r3, c4 = c3;
                for (int k = 1; k <= 8; ++k) {
                    const int d = ((from - k) % 8 + 8) % 8;
                    const int nr = r3 + kDirs[d].first;
                    const int nc = c3 + kDirs[d].second;
                    if (t.get(nr, nc) != 0) {
                        r4 = nr;
                        c4 = nc;
                        break;
                    }
                    if (d == 0) east_seen_zero = true;  // east examined and zero
                }

                // 3.4: marking
                if (east_seen_zero) {
                    t.set(r3, c3, -nbd);
                } else if (t.get(r3, c3) == 1) {
                    t.set(r3, c3, nbd);
                }

                // 3.5: termination — back at the start in the start direction.
                if (r4 == row && c4 == col && r3 == r1 && c3 == c1) break;
                r2 = r3;
                c2 = c3;
                r3 = r4;
                c3 = c4;
            }

            // Convert pixel chain to a world-space polygon.
            Polygon poly;
            poly.hole = hole;
            for (const auto& [pr, pc] : chain) {
                const Point2 p = img.cell_center(pc, pr);
                if (!poly.vertices.empty() && (poly.vertices.back() - p).norm() <= kGeomEps) continue;
                poly.vertices.push_back(p);
                const bool near_border = pr <= 1 || pc <= 1 || pr >= t.h - 2 || pc >= t.w - 2;
                poly.boundary.push_back(near_border ? 1 : 0);
            }
            while (poly.vertices.size() > 1 &&
                   (poly.vertices.front() - poly.vertices.back()).norm() <= kGeomEps) {
                poly.vertices.pop_back();
                poly.boundary.pop_back();
            }
            if (poly.vertices.size() < 3) continue;
            normalize_ccw(poly);
            poly.id = static_cast<int>(out.size());
            out.push_back(std::move(poly));
        }
    }
    return out;
}

}  // namespace vgnav
