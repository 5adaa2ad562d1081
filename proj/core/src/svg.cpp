#include "renewal/svg.hpp"

#include <cstdio>
#include <ostream>

namespace renewal {

void render_svg(const Catalog& catalog, const DetectionResult* detections,
                const SvgOptions& options, std::ostream& out) {
    const double scale = options.pixels_per_micron;
    const double width_px = catalog.bounds.width() * scale;
    const double height_px = catalog.bounds.height() * scale;
    char buf[512];

    std::snprintf(buf, sizeof buf,
                  "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.2f\" height=\"%.2f\" "
                  "viewBox=\"0 0 %.2f %.2f\">\n",
                  width_px, height_px, width_px, height_px);
    out << buf;
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t i = 0; i < catalog.records.size(); ++i) {
        const ObjectRecord& r = catalog.records[i];
        const double cx = (r.x - catalog.bounds.x_min) * scale;
        // SVG y grows downward.
        const double cy = (catalog.bounds.y_max - r.y) * scale;
        double rx = options.default_radius_microns * scale;
        double ry = rx;
        if (r.semi_major) rx = *r.semi_major * scale;
        if (r.semi_minor) ry = *r.semi_minor * scale;
        const bool flagged = detections && detections->flag[i] != 0;
        const char* stroke = flagged ? "#d62728" : "#404040";
        const double stroke_width = flagged ? 1.2 : 0.4;
        if (r.position_angle) {
            std::snprintf(buf, sizeof buf,
                          "<ellipse cx=\"%.3f\" cy=\"%.3f\" rx=\"%.3f\" ry=\"%.3f\" "
                          "transform=\"rotate(%.3f %.3f %.3f)\" fill=\"none\" stroke=\"%s\" "
                          "stroke-width=\"%.2f\"/>\n",
                          cx, cy, rx, ry, -*r.position_angle, cx, cy, stroke, stroke_width);
        } else {
            std::snprintf(buf, sizeof buf,
                          "<ellipse cx=\"%.3f\" cy=\"%.3f\" rx=\"%.3f\" ry=\"%.3f\" "
                          "fill=\"none\" stroke=\"%s\" stroke-width=\"%.2f\"/>\n",
                          cx, cy, rx, ry, stroke, stroke_width);
        }
        out << buf;
    }
    out << "</svg>\n";
}

}  // namespace renewal
