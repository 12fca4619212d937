#pragma once
// Robot-centered occupancy raster and the image-space steps of the polygon
// extraction pipeline: scan projection with vehicle-size inflation, and the
// average-filter blur that precedes contour extraction.

#include "vgnav/geometry.hpp"

#include <iosfwd>
#include <vector>

namespace vgnav {

struct SensorScan {
    std::vector<Point2> points;  // obstacle hits, world frame
    Point2 origin{0.0, 0.0};     // vehicle position at capture
    int frame_index = 0;
};

struct RasterImage {
    std::vector<double> cells;  // row-major, intensity in [0,1]
    double resolution = 0.0;    // meters per pixel
    Point2 origin{0.0, 0.0};    // world position of the (0,0) cell corner
    int width = 0;
    int height = 0;

    double at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy) * width + ix]; }
    double& at(int ix, int iy) { return cells[static_cast<std::size_t>(iy) * width + ix]; }
    bool in_bounds(int ix, int iy) const {
        return ix >= 0 && iy >= 0 && ix < width && iy < height;
    }
    Point2 cell_center(int ix, int iy) const {
        return origin + Point2((ix + 0.5) * resolution, (iy + 0.5) * resolution);
    }
};

struct ExtractionParams {
    double resolution = 0.2;         // meters per pixel
    double inflation_radius = 0.4;   // vehicle size
    int blur_kernel = 3;             // pixels, odd
    double binarize_threshold = 0.3; // intensity after blur
    double dp_epsilon = 0.3;         // simplification tolerance, meters
    double zeta = 0.5235987755982988; // pi/6, inner-angle threshold
    double local_extent = 40.0;      // side of the robot-centered region
};

// Projects the scan onto a robot-centered image of side local_extent. Every
// point inflates to the cells whose centers lie within inflation_radius;
// points outside the local extent are discarded.
// Throws std::invalid_argument on non-positive resolution.
RasterImage rasterize(const SensorScan& scan, const ExtractionParams& params);

// Box-filter average with zero padding; output has the same dimensions.
// Throws std::invalid_argument on an even kernel.
RasterImage blur(const RasterImage& img, int kernel);

// Debug dump as ASCII PGM (intensities scaled to 0..255).
void write_pgm(const RasterImage& img, std::ostream& os);

// Newline-delimited scan files: `frame <k> pose <x> <y>` then `p <x> <y>` lines.
std::vector<SensorScan> read_scans(std::istream& is);
void write_scans(std::span<const SensorScan> scans, std::ostream& os);

}  // namespace vgnav
