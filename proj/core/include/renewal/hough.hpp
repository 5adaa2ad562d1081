#ifndef RENEWAL_HOUGH_HPP
#define RENEWAL_HOUGH_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "renewal/catalog.hpp"

namespace renewal {

struct HoughConfig {
    std::size_t n_angles = 1000;
    std::int64_t lines_per_angle = 9000;  // non-overlapping strips per angle
    double exclusion_deg = 1.5;           // wedge about horizontal and vertical
    double min_expected = 12.0;           // accumulators with mu below this are ignored
    double siglev = 1.0 - 1e-7;
};

/// One accumulator per (angle, line): observed count, expected count under
/// the homogeneous null, and the upper-tail Poisson p-value.
struct HoughResult {
    std::size_t n_angles = 0;
    std::int64_t lines_per_angle = 0;
    std::vector<double> angles_deg;      // size n_angles
    std::vector<double> band_lo;         // per angle, perpendicular band start
    std::vector<double> strip_width;     // per angle
    std::vector<std::uint32_t> counts;   // n_angles * lines_per_angle
    std::vector<double> mu;              // expected counts
    std::vector<double> p_value;

    std::size_t cell(std::size_t angle_idx, std::int64_t line) const {
        return angle_idx * static_cast<std::size_t>(lines_per_angle) + static_cast<std::size_t>(line);
    }
    /// Strip index of perpendicular offset d at this angle (clamped to the
    /// closed top edge).
    std::int64_t line_index(std::size_t angle_idx, double d) const;
};

struct FlaggedLine {
    std::size_t angle_idx;
    std::int64_t line;
    std::uint32_t count;
    double mu;
    double p_value;
};

/// Fraction of the bounds rectangle whose perpendicular coordinate at
/// `angle_deg` lies in [d_lo, d_hi): the trapezoidal CDF of the projection.
double strip_area_fraction(const Rect& bounds, double angle_deg, double d_lo, double d_hi);

/// Counts points per non-overlapping strip (one line per point per angle)
/// and computes each accumulator's expected count under a homogeneous null,
/// using the exact strip-bounds intersection area.
HoughResult accumulate(const Catalog& catalog, const HoughConfig& config);

/// True when the angle (as a band one step wide) lies wholly within
/// `exclusion_deg` of the horizontal or vertical.
bool angle_excluded(double angle_deg, double step_deg, double exclusion_deg);

/// Number of angles of make_angle_set(n_angles) that survive the exclusion
/// wedges.
std::size_t considered_angles(std::size_t n_angles, double exclusion_deg);

/// Flags accumulators outside the exclusion wedges with mu >= min_expected
/// and p_value <= 1 - siglev.
std::vector<FlaggedLine> flag_lines(const HoughResult& result, const HoughConfig& config);

/// CSV dump, one row per accumulator: angle_deg,line_index,count,mu,p_value,flagged.
void dump_hough_csv(const HoughResult& result, const HoughConfig& config, std::ostream& out);

}  // namespace renewal

#endif
