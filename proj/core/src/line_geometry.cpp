#include "renewal/line_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace renewal {

AngleSet make_angle_set(std::size_t n_angles) {
    if (n_angles == 0) throw std::invalid_argument("make_angle_set: n_angles must be >= 1");
    AngleSet set;
    set.angles_deg.resize(n_angles);
    for (std::size_t k = 0; k < n_angles; ++k)
        set.angles_deg[k] = static_cast<double>(k) * 180.0 / static_cast<double>(n_angles);
    return set;
}

LineCoord project(double x, double y, double angle_deg) {
    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    return LineCoord{x * c + y * s, -x * s + y * c};
}

std::pair<double, double> perpendicular_range(const Rect& bounds, double angle_deg) {
    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double x : {bounds.x_min, bounds.x_max}) {
        for (double y : {bounds.y_min, bounds.y_max}) {
            const double d = -x * s + y * c;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    return {lo, hi};
}

std::optional<std::pair<double, double>> line_chord(const Rect& bounds, double angle_deg,
                                                    double d) {
    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    // Point on the line: (t*c - d*s, t*s + d*c).
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    auto clip = [&](double coef, double base, double min_v, double max_v) {
        if (std::abs(coef) < 1e-12) return base >= min_v && base <= max_v;
        double a = (min_v - base) / coef;
        double b = (max_v - base) / coef;
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
        return true;
    };
    if (!clip(c, -d * s, bounds.x_min, bounds.x_max)) return std::nullopt;
    if (!clip(s, d * c, bounds.y_min, bounds.y_max)) return std::nullopt;
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

LineFamily make_line_family(const Rect& bounds, double angle_deg, double width) {
    if (width <= 0.0) throw std::invalid_argument("line family width must be positive");
    auto [d_lo, d_hi] = perpendicular_range(bounds, angle_deg);
    LineFamily family;
    family.angle_deg = angle_deg;
    family.width = width;
    // Offset the origin a full width below the band so every point of the
    // bounds maps to two non-negative strip indices.
    family.origin_offset = d_lo - width;
    family.line_count =
        static_cast<std::int64_t>(std::floor(2.0 * (d_hi - family.origin_offset) / width)) + 2;
    return family;
}

LineFamily make_line_family_fixed(const Rect& bounds, double angle_deg, double width,
                                  std::int64_t line_count) {
    if (width <= 0.0) throw std::invalid_argument("line family width must be positive");
    if (line_count < 2) throw std::invalid_argument("fixed line family needs at least 2 lines");
    auto [d_lo, d_hi] = perpendicular_range(bounds, angle_deg);
    LineFamily family;
    family.angle_deg = angle_deg;
    family.width = width;
    family.line_count = line_count;
    const double band_center = 0.5 * (d_lo + d_hi);
    // Band of a count-c family spans (c + 1) * w/2 from origin.
    family.origin_offset =
        band_center - (static_cast<double>(line_count) + 1.0) * width / 4.0;
    return family;
}

std::pair<std::int64_t, std::int64_t> bin_point(double d, const LineFamily& family) {
    const auto k =
        static_cast<std::int64_t>(std::floor(2.0 * (d - family.origin_offset) / family.width));
    if (family.line_count > 0 && (k - 1 < 0 || k >= family.line_count))
        throw std::out_of_range("bin_point: offset " + std::to_string(d) +
                                " outside the covered band");
    return {k - 1, k};
}

LineBins build_line_bins(const Catalog& catalog, const LineFamily& family) {
    if (family.line_count <= 0)
        throw std::invalid_argument("build_line_bins requires a bounded family");
    const std::size_t n = catalog.records.size();
    const double rad = family.angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    const double inv_half_w = 2.0 / family.width;

    std::vector<double> ts(n), ds(n);
    std::vector<std::int64_t> ks(n);
    std::vector<std::uint32_t> offsets(static_cast<std::size_t>(family.line_count) + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const ObjectRecord& r = catalog.records[i];
        ts[i] = r.x * c + r.y * s;
        ds[i] = -r.x * s + r.y * c;
        const auto k =
            static_cast<std::int64_t>(std::floor((ds[i] - family.origin_offset) * inv_half_w));
        if (k - 1 < 0 || k >= family.line_count)
            throw std::out_of_range("record " + std::to_string(r.id) +
                                    " falls outside the line family band");
        ks[i] = k;
        ++offsets[static_cast<std::size_t>(k)];      // counts for bin k, shifted later
        ++offsets[static_cast<std::size_t>(k - 1)];  // and bin k-1
    }
    // Exclusive prefix sum; offsets[j] becomes the start of bin j.
    std::uint32_t running = 0;
    for (auto& o : offsets) {
        const std::uint32_t count = o;
        o = running;
        running += count;
    }
    std::vector<LinePoint> points(2 * n);
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const LinePoint p{catalog.records[i].id, static_cast<std::uint32_t>(i), ts[i], ds[i]};
        points[cursor[static_cast<std::size_t>(ks[i] - 1)]++] = p;
        points[cursor[static_cast<std::size_t>(ks[i])]++] = p;
    }
    for (std::int64_t j = 0; j < family.line_count; ++j) {
        auto* first = points.data() + offsets[static_cast<std::size_t>(j)];
        auto* last = points.data() + offsets[static_cast<std::size_t>(j) + 1];
        std::sort(first, last, [](const LinePoint& a, const LinePoint& b) {
            if (a.t != b.t) return a.t < b.t;
            return a.record_id < b.record_id;
        });
    }
    return LineBins(family, std::move(offsets), std::move(points));
}

}  // namespace renewal
