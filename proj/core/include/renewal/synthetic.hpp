#ifndef RENEWAL_SYNTHETIC_HPP
#define RENEWAL_SYNTHETIC_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "renewal/catalog.hpp"

namespace renewal {

/// Background rate specification for generation: either a constant rate, a
/// left-to-right linear gradient, or explicit per-box rates. Unlike the
/// estimated DensityGrid, generation rates may be zero.
struct BackgroundSpec {
    enum class Kind { Constant, GradientX, Grid };
    Kind kind = Kind::Constant;
    double rate = 1e-6;       // Constant: points per square micron
    double rate_min = 0.0;    // GradientX: rate of the leftmost column
    double rate_max = 0.0;    // GradientX: rate of the rightmost column
    std::size_t nx = 200;
    std::size_t ny = 200;
    std::vector<double> rates;  // Grid: nx*ny row-major

    /// Materializes the per-box rate table over `bounds`.
    std::vector<double> box_rates(const Rect& bounds) const;
};

/// One generative track class: exponential gap law, per-point stop chance,
/// and the chance that a point's ellipse is drawn aligned with the track.
struct TrackClassConfig {
    double mean_gap = 360.0;       // microns
    double stop_probability = 0.01;
    double alignment_prob = 0.8;
    double semi_major = 300.0;     // ellipse shape given to track points
    double semi_minor = 60.0;
};

/// Deterministically injected track, bypassing the birth process. Positions
/// left unset are drawn from the seeded stream. Exactly one of mean-gap
/// placement (renewal gaps) or span placement (points uniform over the span,
/// the renewal law conditioned on its count) applies.
struct ForcedTrack {
    double angle_deg = 0.0;
    std::size_t class_index = 0;
    std::size_t n_points = 0;
    std::optional<double> t_start;   // along-line start, microns
    std::optional<double> offset_d;  // perpendicular offset of the track line
    std::optional<double> span;      // when set: points uniform over [t_start, t_start+span]
    std::optional<double> width;     // jitter width override (thin scratches)
};

struct GeneratorConfig {
    Rect bounds{0.0, 320000.0, 0.0, 320000.0};
    BackgroundSpec background;
    // Mean gap of the per-line birth process; zero (or non-finite) turns
    // births off entirely. Note the edge carry-in: births up to 3*birth_mean
    // before the plate are simulated, so a class with stop_probability 0
    // contributes a few edge-straddling tracks per line no matter how large
    // the mean is. Labeled test plates usually disable births and use
    // forced_tracks instead.
    double birth_mean = 1e8;
    std::vector<TrackClassConfig> track_classes{TrackClassConfig{}};
    std::vector<double> class_prior{1.0};  // P(X_0) over track classes
    double width = 50.0;                   // track width w: perpendicular jitter is U(-w/2, w/2)
    std::size_t n_angles = 8;
    std::int64_t lines_per_angle = 128;
    std::vector<ForcedTrack> forced_tracks;
    std::uint64_t seed = 1;
};

/// Poisson background draw: per grid box, count ~ Poisson(rate * area),
/// positions uniform within the box. Records are labeled background.
std::vector<ObjectRecord> sample_background(const GeneratorConfig& config, std::uint64_t seed);

/// Track draw over the generator's (angle, line) family: a Poisson birth
/// process along each line starts tracks; each track emits exponential gaps
/// until it stops or leaves the plate, points jittered across the track
/// width. Births up to 3*gamma before the plate edge are carried in, so
/// tracks may start at the edge. Forced tracks are appended after the birth
/// sweep. Records are labeled by 1-based track class.
std::vector<ObjectRecord> sample_tracks(const GeneratorConfig& config, std::uint64_t seed);

/// Full plate: background plus tracks, ids assigned sequentially,
/// reproducible from config.seed alone.
Catalog sample_plate(const GeneratorConfig& config);

}  // namespace renewal

#endif
