#ifndef RENEWAL_CATALOG_HPP
#define RENEWAL_CATALOG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace renewal {

/// Axis-aligned rectangle in plate microns.
struct Rect {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    double diagonal() const;
    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    bool valid() const { return x_max > x_min && y_max > y_min; }
};

/// Ground-truth label: 0 is background, k >= 1 is track class k.
using Label = std::int32_t;
constexpr Label kLabelBackground = 0;

/// One catalog detection. Positions are plate coordinates in microns.
/// Ellipse shape parameters and the ground-truth label are optional.
struct ObjectRecord {
    std::int64_t id = 0;
    double x = 0.0;
    double y = 0.0;
    std::optional<double> semi_major;      // microns
    std::optional<double> semi_minor;      // microns
    std::optional<double> position_angle;  // degrees in [0, 180)
    std::optional<Label> true_label;

    bool is_track_label() const { return true_label && *true_label > kLabelBackground; }
};

/// An ordered set of records together with the plate bounds that contain
/// every record. Immutable after load; safe to share across threads.
struct Catalog {
    std::vector<ObjectRecord> records;
    Rect bounds;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

/// Per-record detector output. Parallel arrays indexed like Catalog::records.
/// detect_angle_deg is NaN while no line posterior has been computed for the
/// record; p_track is the maximum track-state posterior over every
/// (angle, line) membership.
struct DetectionResult {
    std::vector<double> p_track;
    std::vector<double> detect_angle_deg;  // NaN = never computed
    std::vector<std::uint8_t> flag;
    double threshold = 0.5;

    std::size_t size() const { return p_track.size(); }
    bool has_angle(std::size_t i) const;
};

std::string label_to_string(Label label);
std::optional<Label> label_from_string(const std::string& text);

/// Reads the CSV catalog format (header `id,x,y,semi_major,semi_minor,
/// position_angle,label`, detection columns tolerated and ignored).
/// Without explicit bounds the tight bounding box of the points is expanded
/// by 1 micron on each side. Throws std::runtime_error naming the offending
/// line on malformed input, and when a record lies outside explicit bounds.
Catalog read_catalog(const std::string& path, std::optional<Rect> bounds = std::nullopt);

/// Variant of read_catalog that also recovers the p_track/flag/detect_angle
/// columns when the file carries them (output of a detect run).
struct DetectedCatalog {
    Catalog catalog;
    std::optional<DetectionResult> detections;
};
DetectedCatalog read_detected_catalog(const std::string& path,
                                      std::optional<Rect> bounds = std::nullopt);

/// Writes records (and detection columns when given) as CSV. Positions
/// round-trip through read_catalog to 1e-6 micron. Record order is preserved.
void write_catalog(const Catalog& catalog, const std::string& path,
                   const DetectionResult* detections = nullptr);

}  // namespace renewal

#endif
