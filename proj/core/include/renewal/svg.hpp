#ifndef RENEWAL_SVG_HPP
#define RENEWAL_SVG_HPP

#include <iosfwd>

#include "renewal/catalog.hpp"

namespace renewal {

struct SvgOptions {
    double pixels_per_micron = 0.003;
    double default_radius_microns = 120.0;  // records without ellipse shape
};

/// Standalone SVG scatter plot of the catalog: one <ellipse> per record,
/// flagged records stroked in a distinct color. Detections may be null.
void render_svg(const Catalog& catalog, const DetectionResult* detections,
                const SvgOptions& options, std::ostream& out);

}  // namespace renewal

#endif
