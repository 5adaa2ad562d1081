#ifndef RENEWAL_TRACK_DETECTOR_HPP
#define RENEWAL_TRACK_DETECTOR_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "renewal/catalog.hpp"
#include "renewal/density_grid.hpp"
#include "renewal/line_geometry.hpp"
#include "renewal/renewal_hmm.hpp"

namespace renewal {

struct DetectorConfig {
    std::size_t n_angles = 1000;
    double width = 50.0;                 // strip width w, microns
    std::int64_t lines_per_angle = 0;    // 0 = auto: cover rotated bounds at w/2 spacing
    double flag_threshold = 0.5;
    std::size_t min_points_per_line = 2;
    std::size_t grid_nx = 200;
    std::size_t grid_ny = 200;
    RenewalHmmModel model;
    double alignment_tolerance_deg = 10.0;  // ellipse counts as aligned within this of the line angle
    unsigned threads = 0;                   // 0 = hardware concurrency

    DetectorConfig();
};

/// Runs the renewal HMM along one sorted line (strip `line_index` of
/// `family`). Observation i is the gap ending at point i; the first
/// observation is the censored run-in gap from the strip center line's entry
/// into the plate bounds (survival factor only). Returns the per-point track
/// posterior mass. Lines with fewer than min_points points get
/// all-background posteriors (zeros).
std::vector<double> detect_line(std::span<const LinePoint> points, const Catalog& catalog,
                                const RenewalHmmModel& model, const DensityGrid& grid,
                                const LineFamily& family, std::int64_t line_index,
                                std::size_t min_points,
                                double alignment_tolerance_deg = 10.0);

/// Sweeps every angle, runs detect_line per populated strip, and aggregates
/// per-record track posteriors by maximum over all (angle, line)
/// memberships. Deterministic for any thread count: ties resolve to the
/// smaller angle, then the smaller line index.
DetectionResult sweep(const Catalog& catalog, const DetectorConfig& config);

/// Recomputes flag bits at a new threshold; posteriors are untouched.
void flag(DetectionResult& result, double threshold);

}  // namespace renewal

#endif
