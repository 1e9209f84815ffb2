#pragma once

// Truncated supports T_N = sum_{k<=N} (R_k ... R_1)^{-1} D_k and simple figure output.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "moran/exact.hpp"
#include "moran/system.hpp"

namespace moran {

struct PointCloud {
    std::size_t level = 0;  // N
    long m = 0;
    std::vector<std::vector<double>> points;
    std::vector<double> lower, upper;  // bounding box
};

/// Exact points in odometer order (d_1 varies fastest). CapExceeded when m^N > cap.
std::vector<RationalVector> support_points_exact(const MoranSystem& system, std::size_t N, std::size_t cap = 1000000);

/// Same enumeration converted to double after exact accumulation.
PointCloud support_points(const MoranSystem& system, std::size_t N, std::size_t cap = 1000000);

enum class ImageFormat { Csv, Svg, Ppm };
ImageFormat parse_image_format(const std::string& name);  // ParameterError

/// csv: "x,y,..." per point with %.17g. svg/ppm need a planar cloud; points are drawn
/// in [0,1]^2 when the box fits there, otherwise the box is scaled onto it.
/// svg squares have side 1/(2 m^N); ppm is a size x size P6 raster, 1px black dots on white.
std::string render_to_string(const PointCloud& cloud, ImageFormat format, std::size_t size = 512);

/// Writes render_to_string to `out`. IoFailure when the file cannot be written.
void render(const PointCloud& cloud, ImageFormat format, std::size_t size, const std::filesystem::path& out);

}  // namespace moran
