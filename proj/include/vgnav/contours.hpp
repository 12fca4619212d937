#pragma once
// Border following over a binarized raster: one CCW outer contour per
// 8-connected obstacle component plus its hole contours (re-wound CCW and
// flagged), with vertices placed at cell centers in world meters.

#include "vgnav/geometry.hpp"
#include "vgnav/raster.hpp"

#include <vector>

namespace vgnav {

// A cell is an obstacle iff intensity >= threshold. Contours with fewer than
// three distinct cells are discarded. Vertices whose cell lies within one
// pixel of the image border are flagged `boundary` (region-clipping
// artifacts, not observed obstacle corners).
std::vector<Polygon> extract_contours(const RasterImage& img, double threshold);

}  // namespace vgnav
