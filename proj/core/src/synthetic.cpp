#include "renewal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "renewal/line_geometry.hpp"

namespace renewal {

std::vector<double> BackgroundSpec::box_rates(const Rect& bounds) const {
    if (!bounds.valid()) throw std::invalid_argument("generator bounds are degenerate");
    if (nx == 0 || ny == 0) throw std::invalid_argument("background grid needs boxes");
    std::vector<double> out(nx * ny, 0.0);
    switch (kind) {
        case Kind::Constant:
            if (rate < 0.0) throw std::invalid_argument("background rate must be >= 0");
            std::fill(out.begin(), out.end(), rate);
            break;
        case Kind::GradientX: {
            if (rate_min < 0.0 || rate_max < 0.0)
                throw std::invalid_argument("background rates must be >= 0");
            for (std::size_t iy = 0; iy < ny; ++iy)
                for (std::size_t ix = 0; ix < nx; ++ix) {
                    const double f = (static_cast<double>(ix) + 0.5) / static_cast<double>(nx);
                    out[iy * nx + ix] = rate_min + (rate_max - rate_min) * f;
                }
            break;
        }
        case Kind::Grid:
            if (rates.size() != nx * ny)
                throw std::invalid_argument("background rate table size mismatch");
            for (double r : rates)
                if (r < 0.0) throw std::invalid_argument("background rates must be >= 0");
            out = rates;
            break;
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent substream per (purpose, index): reordering the generation
// loops cannot change the output.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed ^ purpose) ^ index));
}

// Hand-rolled transforms instead of std::*_distribution: the mt19937_64 bit
// stream is pinned by the standard but the distribution algorithms are not,
// and fixed-seed plates must reproduce across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

double exponential_gap(std::mt19937_64& rng, double mean) {
    return -mean * std::log1p(-uniform01(rng));
}

std::int64_t poisson_count(std::mt19937_64& rng, double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 64.0) {
        // Poisson(m) = Poisson(m/2) + Poisson(m/2); keeps exp(-mean) in range.
        const double half = mean / 2.0;
        return poisson_count(rng, half) + poisson_count(rng, half);
    }
    const double limit = std::exp(-mean);
    std::int64_t k = -1;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01(rng);
    } while (p > limit);
    return k;
}

constexpr std::uint64_t kPurposeBackground = 0xb15a9c0de5ULL;
constexpr std::uint64_t kPurposeBirths = 0x7ac45eedULL;
constexpr std::uint64_t kPurposeForced = 0xf02cedULL;

void validate(const GeneratorConfig& config) {
    if (!config.bounds.valid()) throw std::invalid_argument("generator bounds are degenerate");
    if (config.track_classes.empty())
        throw std::invalid_argument("at least one track class is required");
    if (config.class_prior.size() != config.track_classes.size())
        throw std::invalid_argument("class prior size must match the track class list");
    double prior_sum = 0.0;
    for (double p : config.class_prior) {
        if (p < 0.0) throw std::invalid_argument("class prior entries must be >= 0");
        prior_sum += p;
    }
    if (std::abs(prior_sum - 1.0) > 1e-9)
        throw std::invalid_argument("class prior must sum to 1");
    for (const TrackClassConfig& c : config.track_classes) {
        if (!(c.mean_gap > 0.0)) throw std::invalid_argument("track mean gap must be positive");
        if (c.stop_probability < 0.0 || c.stop_probability > 1.0)
            throw std::invalid_argument("stop probability must lie in [0, 1]");
        if (c.alignment_prob < 0.0 || c.alignment_prob > 1.0)
            throw std::invalid_argument("alignment probability must lie in [0, 1]");
        if (!(c.semi_major >= c.semi_minor && c.semi_minor >= 0.0))
            throw std::invalid_argument("track ellipse axes must satisfy a >= b >= 0");
    }
    if (config.width <= 0.0) throw std::invalid_argument("track width must be positive");
    if (config.n_angles == 0) throw std::invalid_argument("generator needs at least one angle");
    if (config.lines_per_angle <= 0)
        throw std::invalid_argument("generator needs at least one line per angle");
    for (const ForcedTrack& f : config.forced_tracks) {
        if (f.class_index >= config.track_classes.size())
            throw std::invalid_argument("forced track references an unknown class");
        if (f.span && !(*f.span > 0.0))
            throw std::invalid_argument("forced track span must be positive");
        if (f.width && !(*f.width > 0.0))
            throw std::invalid_argument("forced track width must be positive");
    }
}

std::size_t draw_class(const std::vector<double>& prior, std::mt19937_64& rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t k = 0; k < prior.size(); ++k) {
        acc += prior[k];
        if (u < acc) return k;
    }
    return prior.size() - 1;
}

struct TrackPointSink {
    const GeneratorConfig& config;
    std::vector<ObjectRecord>& out;

    // Places a track point at along-line t with perpendicular jitter,
    // dropping it when the jittered position leaves the plate.
    void emit(double t, double center_d, double angle_deg, double cos_a, double sin_a,
              std::size_t class_index, double jitter_width, std::mt19937_64& rng) {
        const double d = center_d + uniform_in(rng, -jitter_width / 2.0, jitter_width / 2.0);
        const double x = t * cos_a - d * sin_a;
        const double y = t * sin_a + d * cos_a;
        const TrackClassConfig& cls = config.track_classes[class_index];
        const bool aligned = uniform01(rng) < cls.alignment_prob;
        double pa = aligned ? std::fmod(angle_deg, 180.0) : uniform_in(rng, 0.0, 180.0);
        if (pa < 0.0) pa += 180.0;
        if (pa >= 180.0) pa = 0.0;
        if (!config.bounds.contains(x, y)) return;
        ObjectRecord rec;
        rec.x = x;
        rec.y = y;
        rec.semi_major = cls.semi_major;
        rec.semi_minor = cls.semi_minor;
        rec.position_angle = pa;
        rec.true_label = static_cast<Label>(class_index + 1);
        out.push_back(rec);
    }
};

}  // namespace

std::vector<ObjectRecord> sample_background(const GeneratorConfig& config, std::uint64_t seed) {
    validate(config);
    const BackgroundSpec& bg = config.background;
    const std::vector<double> rates = bg.box_rates(config.bounds);
    const double box_w = config.bounds.width() / static_cast<double>(bg.nx);
    const double box_h = config.bounds.height() / static_cast<double>(bg.ny);
    const double area = box_w * box_h;

    std::vector<ObjectRecord> out;
    for (std::size_t iy = 0; iy < bg.ny; ++iy) {
        for (std::size_t ix = 0; ix < bg.nx; ++ix) {
            const double mean = rates[iy * bg.nx + ix] * area;
            if (mean <= 0.0) continue;
            auto rng = substream(seed, kPurposeBackground, iy * bg.nx + ix);
            const std::int64_t count = poisson_count(rng, mean);
            const double x0 = config.bounds.x_min + static_cast<double>(ix) * box_w;
            const double y0 = config.bounds.y_min + static_cast<double>(iy) * box_h;
            for (std::int64_t i = 0; i < count; ++i) {
                ObjectRecord rec;
                rec.x = uniform_in(rng, x0, x0 + box_w);
                rec.y = uniform_in(rng, y0, y0 + box_h);
                rec.true_label = kLabelBackground;
                out.push_back(rec);
            }
        }
    }
    return out;
}

std::vector<ObjectRecord> sample_tracks(const GeneratorConfig& config, std::uint64_t seed) {
    validate(config);
    std::vector<ObjectRecord> out;
    TrackPointSink sink{config, out};
    const AngleSet angles = make_angle_set(config.n_angles);
    const double gamma = config.birth_mean;
    const bool births_enabled = gamma > 0.0 && std::isfinite(gamma);  // 0 = off

    for (std::size_t a = 0; a < angles.size() && births_enabled; ++a) {
        const double angle = angles.angles_deg[a];
        const double rad = angle * std::numbers::pi / 180.0;
        const double cos_a = std::cos(rad);
        const double sin_a = std::sin(rad);
        const auto [d_lo, d_hi] = perpendicular_range(config.bounds, angle);
        const double spacing =
            (d_hi - d_lo) / static_cast<double>(config.lines_per_angle);
        for (std::int64_t l = 0; l < config.lines_per_angle; ++l) {
            const double center_d = d_lo + (static_cast<double>(l) + 0.5) * spacing;
            const auto chord = line_chord(config.bounds, angle, center_d);
            if (!chord) continue;
            const auto [t_enter, t_exit] = *chord;
            auto rng = substream(seed, kPurposeBirths,
                                 a * static_cast<std::uint64_t>(config.lines_per_angle) +
                                     static_cast<std::uint64_t>(l));

            // Alternate birth waits and track generation. Starting 3*gamma
            // before the entry edge lets tracks that were born off-plate and
            // have not yet stopped straddle the boundary.
            double pos = t_enter - 3.0 * gamma;
            while (true) {
                pos += exponential_gap(rng, gamma);
                if (pos > t_exit) break;
                const std::size_t cls_idx = draw_class(config.class_prior, rng);
                const TrackClassConfig& cls = config.track_classes[cls_idx];
                double t = pos;
                // A zero stop probability means the pre-plate stretch cannot
                // end the track; the exponential gaps are memoryless, so the
                // walk may fast-forward to the entry edge.
                if (cls.stop_probability == 0.0 && t < t_enter) t = t_enter;
                bool alive = true;
                while (alive) {
                    t += exponential_gap(rng, cls.mean_gap);
                    if (t > t_exit) break;
                    if (t >= t_enter)
                        sink.emit(t, center_d, angle, cos_a, sin_a, cls_idx, config.width, rng);
                    if (uniform01(rng) < cls.stop_probability) alive = false;
                }
                pos = std::min(t, t_exit);
            }
        }
    }

    for (std::size_t f = 0; f < config.forced_tracks.size(); ++f) {
        const ForcedTrack& forced = config.forced_tracks[f];
        auto rng = substream(seed, kPurposeForced, f);
        const double angle = forced.angle_deg;
        const double rad = angle * std::numbers::pi / 180.0;
        const double cos_a = std::cos(rad);
        const double sin_a = std::sin(rad);
        const auto [d_lo, d_hi] = perpendicular_range(config.bounds, angle);
        const double center_d = forced.offset_d ? *forced.offset_d : uniform_in(rng, d_lo, d_hi);
        const auto chord = line_chord(config.bounds, angle, center_d);
        if (!chord) continue;
        const auto [t_enter, t_exit] = *chord;
        const double t_start = forced.t_start ? *forced.t_start : uniform_in(rng, t_enter, t_exit);
        const double jitter_width = forced.width.value_or(config.width);
        const TrackClassConfig& cls = config.track_classes[forced.class_index];

        if (forced.span) {
            // The renewal law conditioned on the point count over a fixed
            // window: points are iid uniform over the span.
            std::vector<double> ts(forced.n_points);
            for (double& t : ts) t = t_start + uniform_in(rng, 0.0, *forced.span);
            std::sort(ts.begin(), ts.end());
            for (double t : ts) {
                if (t > t_exit) break;
                if (t >= t_enter)
                    sink.emit(t, center_d, angle, cos_a, sin_a, forced.class_index, jitter_width,
                              rng);
            }
        } else {
            double t = t_start;
            for (std::size_t i = 0; i < forced.n_points; ++i) {
                if (i > 0) t += exponential_gap(rng, cls.mean_gap);
                if (t > t_exit) break;
                if (t >= t_enter)
                    sink.emit(t, center_d, angle, cos_a, sin_a, forced.class_index, jitter_width,
                              rng);
            }
        }
    }
    return out;
}

Catalog sample_plate(const GeneratorConfig& config) {
    Catalog catalog;
    catalog.bounds = config.bounds;
    catalog.records = sample_background(config, config.seed);
    std::vector<ObjectRecord> tracks = sample_tracks(config, config.seed);
    catalog.records.insert(catalog.records.end(), tracks.begin(), tracks.end());
    for (std::size_t i = 0; i < catalog.records.size(); ++i)
        catalog.records[i].id = static_cast<std::int64_t>(i);
    return catalog;
}

}  // namespace renewal
