#ifndef RENEWAL_LINE_GEOMETRY_HPP
#define RENEWAL_LINE_GEOMETRY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "renewal/catalog.hpp"

namespace renewal {

/// Regularly spaced candidate angles, theta_k = k * 180 / n in [0, 180).
struct AngleSet {
    std::vector<double> angles_deg;

    std::size_t size() const { return angles_deg.size(); }
    double step_deg() const { return 180.0 / static_cast<double>(angles_deg.size()); }
};

AngleSet make_angle_set(std::size_t n_angles);

/// Rotates (x, y) by -theta: t runs along the line direction, d is the
/// signed perpendicular offset.
struct LineCoord {
    double t;
    double d;
};
LineCoord project(double x, double y, double angle_deg);

/// Range of the perpendicular coordinate d over the rectangle corners.
std::pair<double, double> perpendicular_range(const Rect& bounds, double angle_deg);

/// t-interval of the line with perpendicular offset d inside the rectangle,
/// or nullopt when the line misses it.
std::optional<std::pair<double, double>> line_chord(const Rect& bounds, double angle_deg, double d);

/// The strip family at one angle. Line j covers the half-open perpendicular
/// interval [origin_offset + j*w/2, origin_offset + j*w/2 + w), so strips
/// are spaced w/2 apart and every offset inside the covered band lies in
/// exactly two of them.
struct LineFamily {
    double angle_deg = 0.0;
    double width = 0.0;           // w, microns
    double origin_offset = 0.0;   // perpendicular coordinate of line 0
    std::int64_t line_count = 0;

    /// Perpendicular band [lo, hi) within which both covering strips exist.
    double band_lo() const { return origin_offset + width / 2.0; }
    double band_hi() const { return origin_offset + static_cast<double>(line_count) * width / 2.0; }
};

/// Family that covers every point of `bounds` rotated to `angle_deg`, with
/// room to spare so boundary records always fall in two valid strips.
LineFamily make_line_family(const Rect& bounds, double angle_deg, double width);

/// Family with a fixed strip count, centered on the rotated bounds. Points
/// outside the covered band are a caller error downstream.
LineFamily make_line_family_fixed(const Rect& bounds, double angle_deg, double width,
                                  std::int64_t line_count);

/// The exactly-two strip indices containing perpendicular offset d.
/// Throws std::out_of_range when d is outside the family's covered band.
std::pair<std::int64_t, std::int64_t> bin_point(double d, const LineFamily& family);

/// One record projected onto a line: position t along the line and the
/// signed perpendicular offset d.
struct LinePoint {
    std::int64_t record_id;
    std::uint32_t record_index;  // index into Catalog::records
    double t;
    double d;
};

/// All strip memberships at one angle, bins sorted ascending by t with ties
/// broken by record id. Stored flat: bin j is points[offsets[j]..offsets[j+1]).
class LineBins {
public:
    LineBins(LineFamily family, std::vector<std::uint32_t> offsets,
             std::vector<LinePoint> points)
        : family_(std::move(family)), offsets_(std::move(offsets)), points_(std::move(points)) {}

    const LineFamily& family() const { return family_; }
    std::int64_t bin_count() const { return family_.line_count; }
    std::span<const LinePoint> bin(std::int64_t j) const {
        return std::span<const LinePoint>(points_.data() + offsets_[static_cast<std::size_t>(j)],
                                          points_.data() + offsets_[static_cast<std::size_t>(j) + 1]);
    }
    std::size_t total_memberships() const { return points_.size(); }

private:
    LineFamily family_;
    std::vector<std::uint32_t> offsets_;  // size line_count + 1
    std::vector<LinePoint> points_;
};

/// Bins every catalog record into its two strips at this angle and sorts
/// each bin by (t, id). Every record appears exactly twice.
LineBins build_line_bins(const Catalog& catalog, const LineFamily& family);

}  // namespace renewal

#endif
