#include "moran/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "moran/errors.hpp"

namespace moran {

std::vector<RationalVector> support_points_exact(const MoranSystem& system, std::size_t N, std::size_t cap) {
    if (N == 0) throw ParameterError("support level N must be at least 1");
    std::size_t count = 1;
    for (std::size_t k = 1; k <= N; ++k) {
        const std::size_t sz = system.level(k).D.size();
        if (count > cap / sz) throw CapExceeded("support at level " + std::to_string(N) + " exceeds cap " + std::to_string(cap));
        count *= sz;
    }

    std::vector<RationalVector> pts{RationalVector(system.dimension(), Rational(0))};
    IntMatrix P = IntMatrix::identity(system.dimension());
    for (std::size_t k = 1; k <= N; ++k) {
        const Level& L = system.level(k);
        P = L.R * P;
        const RationalMatrix T = rational_inverse(P);
        std::vector<RationalVector> next;
        next.reserve(pts.size() * L.D.size());
        for (const auto& d : L.D) {
            RationalVector shift = T * d;
            for (const auto& x : pts) next.push_back(x + shift);
        }
        pts = std::move(next);
    }
    return pts;
}

PointCloud support_points(const MoranSystem& system, std::size_t N, std::size_t cap) {
    PointCloud cloud;
    cloud.level = N;
    cloud.m = system.prime();
    const std::size_t n = system.dimension();
    cloud.lower.assign(n, HUGE_VAL);
    cloud.upper.assign(n, -HUGE_VAL);
    for (const auto& x : support_points_exact(system, N, cap)) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = x[i].get_d();
            cloud.lower[i] = std::min(cloud.lower[i], p[i]);
            cloud.upper[i] = std::max(cloud.upper[i], p[i]);
        }
        cloud.points.push_back(std::move(p));
    }
    return cloud;
}

ImageFormat parse_image_format(const std::string& name) {
    if (name == "csv") return ImageFormat::Csv;
    if (name == "svg") return ImageFormat::Svg;
    if (name == "ppm") return ImageFormat::Ppm;
    throw ParameterError("unknown image format '" + name + "' (csv, svg, ppm)");
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Maps planar points into [0,1]^2.
struct UnitMap {
    double ox = 0, oy = 0, scale = 1;
    explicit UnitMap(const PointCloud& c) {
        const bool inside = c.lower[0] >= 0 && c.lower[1] >= 0 && c.upper[0] <= 1 && c.upper[1] <= 1;
        if (inside) return;
        ox = c.lower[0];
        oy = c.lower[1];
        const double span = std::max(c.upper[0] - c.lower[0], c.upper[1] - c.lower[1]);
        scale = span > 0 ? 1.0 / span : 1.0;
    }
    double x(const std::vector<double>& p) const { return (p[0] - ox) * scale; }
    double y(const std::vector<double>& p) const { return (p[1] - oy) * scale; }
};

std::string to_csv(const PointCloud& c) {
    std::string s;
    for (const auto& p : c.points) {
        for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + fmt(p[i]);
        s += '\n';
    }
    return s;
}

std::string to_svg(const PointCloud& c, std::size_t size) {
    UnitMap map(c);
    const double side = 0.5 / std::pow(static_cast<double>(c.m), static_cast<double>(c.level));
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) + "\" height=\"" +
                    std::to_string(size) + "\" viewBox=\"0 0 1 1\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"white\"/>\n";
    // SVG y grows downward.
    s += "<g fill=\"black\" transform=\"translate(0,1) scale(1,-1)\">\n";
    for (const auto& p : c.points)
        s += "<rect x=\"" + fmt(map.x(p)) + "\" y=\"" + fmt(map.y(p)) + "\" width=\"" + fmt(side) + "\" height=\"" +
             fmt(side) + "\"/>\n";
    s += "</g>\n</svg>\n";
    return s;
}

std::string to_ppm(const PointCloud& c, std::size_t size) {
    UnitMap map(c);
    std::string header = "P6 " + std::to_string(size) + " " + std::to_string(size) + " 255\n";
    std::string px(size * size * 3, static_cast<char>(255));
    const double last = static_cast<double>(size - 1);
    for (const auto& p : c.points) {
        const auto col = static_cast<std::size_t>(std::lround(std::clamp(map.x(p), 0.0, 1.0) * last));
        const auto row = static_cast<std::size_t>(std::lround((1.0 - std::clamp(map.y(p), 0.0, 1.0)) * last));
        const std::size_t at = (row * size + col) * 3;
        px[at] = px[at + 1] = px[at + 2] = 0;
    }
    return header + px;
}

}  // namespace

std::string render_to_string(const PointCloud& cloud, ImageFormat format, std::size_t size) {
    if (cloud.points.empty()) throw ParameterError("cannot render an empty point cloud");
    if (format == ImageFormat::Csv) return to_csv(cloud);
    if (cloud.lower.size() != 2) throw DimensionMismatch("image output needs planar points");
    if (size < 2) throw ParameterError("image size must be at least 2");
    return format == ImageFormat::Svg ? to_svg(cloud, size) : to_ppm(cloud, size);
}

void render(const PointCloud& cloud, ImageFormat format, std::size_t size, const std::filesystem::path& out) {
    const std::string data = render_to_string(cloud, format, size);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw IoFailure("cannot open " + out.string() + " for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw IoFailure("failed writing " + out.string());
}

}  // namespace moran
