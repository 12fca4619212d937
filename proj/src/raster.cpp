#include "vgnav/raster.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace vgnav {

RasterImage rasterize(const SensorScan& scan, const ExtractionParams& params) {
    if (params.resolution <= 0.0) {
        throw std::invalid_argument("rasterize: resolution must be positive");
    }
    const int side = std::max(1, static_cast<int>(std::lround(params.local_extent / params.resolution)));
    RasterImage img;
    img.resolution = params.resolution;
    img.width = side;
    img.height = side;
    img.origin = scan.origin - 0.5 * side * params.resolution * Point2(1.0, 1.0);
    img.cells.assign(static_cast<std::size_t>(side) * side, 0.0);

    const double half = 0.5 * params.local_extent;
    const double r = params.inflation_radius;
    for (const Point2& p : scan.points) {
        const Point2 rel = p - scan.origin;
        if (std::abs(rel.x()) > half || std::abs(rel.y()) > half) continue;
        // Stamp all cells whose centers fall within the inflation disk.
        const int ix0 = static_cast<int>(std::floor((p.x() - r - img.origin.x()) / img.resolution));
        const int ix1 = static_cast<int>(std::floor((p.x() + r - img.origin.x()) / img.resolution));
        const int iy0 = static_cast<int>(std::floor((p.y() - r - img.origin.y()) / img.resolution));
        const int iy1 = static_cast<int>(std::floor((p.y() + r - img.origin.y()) / img.resolution));
        for (int iy = std::max(0, iy0); iy <= std::min(side - 1, iy1); ++iy) {
            for (int ix = std::max(0, ix0); ix <= std::min(side - 1, ix1); ++ix) {
                if ((img.cell_center(ix, iy) - p).norm() <= r) img.at(ix, iy) = 1.0;
            }
        }
    }
    return img;
}

RasterImage blur(const RasterImage& img, int kernel) {
    if (kernel < 1 || kernel % 2 == 0) {
        throw std::invalid_argument("blur: kernel must be odd and >= 1");
    }
    RasterImage out = img;
    const int hk = kernel / 2;
    const double inv = 1.0 / (static_cast<double>(kernel) * kernel);
    for (int iy = 0; iy < img.height; ++iy) {
        for (int ix = 0; ix < img.width; ++ix) {
            double sum = 0.0;
            for (int dy = -hk; dy <= hk; ++dy) {
                for (int dx = -hk; dx <= hk; ++dx) {
                    if (img.in_bounds(ix + dx, iy + dy)) sum += img.at(ix + dx, iy + dy);
                }
            }
            out.at(ix, iy) = sum * inv;
        }
    }
    return out;
}

void write_pgm(const RasterImage& img, std::ostream& os) {
    os << "P2\n" << img.width << " " << img.height << "\n255\n";
    // Top row of the file is the highest-y row so the image reads upright.
    for (int iy = img.height - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < img.width; ++ix) {
            const int v = std::clamp(static_cast<int>(std::lround(img.at(ix, iy) * 255.0)), 0, 255);
            os << v << (ix + 1 == img.width ? '\n' : ' ');
        }
    }
}

std::vector<SensorScan> read_scans(std::istream& is) {
    std::vector<SensorScan> scans;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "frame") {
            SensorScan scan;
            std::string pose_tag;
            ss >> scan.frame_index >> pose_tag >> scan.origin.x() >> scan.origin.y();
            if (!ss || pose_tag != "pose") {
                throw std::runtime_error("scan file line " + std::to_string(lineno) +
                                         ": expected `frame <k> pose <x> <y>`");
            }
            scans.push_back(std::move(scan));
        } else if (tag == "p") {
            if (scans.empty()) {
                throw std::runtime_error("scan file line " + std::to_string(lineno) +
                                         ": point before any frame header");
            }
            Point2 p;
            ss >> p.x() >> p.y();
            if (!ss) {
                throw std::runtime_error("scan file line " + std::to_string(lineno) +
                                         ": expected `p <x> <y>`");
            }
            scans.back().points.push_back(p);
        } else {
            throw std::runtime_error("scan file line " + std::to_string(lineno) +
                                     ": unknown record `" + tag + "`");
        }
    }
    return scans;
}

void write_scans(std::span<const SensorScan> scans, std::ostream& os) {
    for (const SensorScan& scan : scans) {
        os << "frame " << scan.frame_index << " pose " << scan.origin.x() << " "
           << scan.origin.y() << "\n";
        for (const Point2& p : scan.points) {
            os << "p " << p.x() << " " << p.y() << "\n";
        }
    }
}

}  // namespace vgnav
