#include "renewal/track_detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "renewal/log.hpp"

namespace renewal {

DetectorConfig::DetectorConfig() : model(default_model()) {}

namespace {

// Per-record emission parameters, state-major. Rates do not depend on the
// sweep angle, so they are computed once per run.
struct EmissionCache {
    std::size_t n_states = 0;
    std::size_t n_records = 0;
    std::vector<double> rate;      // n_states * n_records
    std::vector<double> log_rate;  // n_states * n_records
    std::vector<double> log_aligned;      // per state
    std::vector<double> log_not_aligned;  // per state
};

EmissionCache build_emission_cache(const Catalog& catalog, const RenewalHmmModel& model,
                                   const DensityGrid& grid, double width) {
    EmissionCache cache;
    cache.n_states = model.n_states;
    cache.n_records = catalog.records.size();
    cache.rate.resize(cache.n_states * cache.n_records);
    cache.log_rate.resize(cache.n_states * cache.n_records);
    for (std::size_t r = 0; r < cache.n_records; ++r) {
        const ObjectRecord& rec = catalog.records[r];
        const double bg = grid.linear_rate(rec.x, rec.y, width);
        for (std::size_t s = 0; s < cache.n_states; ++s) {
            const double rate = model.state_rate(s, bg);
            cache.rate[s * cache.n_records + r] = rate;
            cache.log_rate[s * cache.n_records + r] = std::log(rate);
        }
    }
    if (model.alignment_enabled) {
        cache.log_aligned.resize(cache.n_states);
        cache.log_not_aligned.resize(cache.n_states);
        for (std::size_t s = 0; s < cache.n_states; ++s) {
            cache.log_aligned[s] = std::log(model.alignment_prob[s]);
            cache.log_not_aligned[s] = std::log(1.0 - model.alignment_prob[s]);
        }
    }
    return cache;
}

bool ellipse_aligned(double position_angle_deg, double line_angle_deg, double tolerance_deg) {
    double diff = std::fabs(position_angle_deg - line_angle_deg);
    diff = std::fmod(diff, 180.0);
    return std::min(diff, 180.0 - diff) <= tolerance_deg;
}

struct LineScratch {
    std::vector<double> log_emis;
    std::vector<double> posteriors;
    FbWorkspace fb;
};

// Entry coordinate of the strip center line into the plate; the first
// point's gap is measured from here.
double strip_entry_t(const Rect& bounds, const LineFamily& family, std::int64_t line_index) {
    const double center_d = family.origin_offset +
                            static_cast<double>(line_index) * family.width / 2.0 +
                            family.width / 2.0;
    const auto chord = line_chord(bounds, family.angle_deg, center_d);
    if (!chord) return std::numeric_limits<double>::quiet_NaN();
    return chord->first;
}

// Shared by the public detect_line and the sweep loop: fills per-point
// background posteriors into `out` (size points.size()). The background
// posterior is the working quantity because the track mass saturates to
// exactly 1.0 in doubles on strong runs, which would leave the angle argmax
// to tie-breaking; the background mass keeps resolving differences instead.
void detect_line_into(std::span<const LinePoint> points, const Catalog& catalog,
                      const RenewalHmmModel& model, const EmissionCache& cache,
                      const Rect& bounds, const LineFamily& family, std::int64_t line_index,
                      std::size_t min_points, double alignment_tolerance_deg, LineScratch& scratch,
                      double* out) {
    const std::size_t n_pts = points.size();
    if (n_pts < std::max<std::size_t>(min_points, 1)) {
        std::fill(out, out + n_pts, 1.0);
        return;
    }
    const std::size_t n = model.n_states;
    scratch.log_emis.resize(n_pts * n);
    scratch.posteriors.resize(n_pts * n);

    const double entry = strip_entry_t(bounds, family, line_index);
    double prev_t = std::isnan(entry) ? points[0].t : std::min(entry, points[0].t);
    for (std::size_t i = 0; i < n_pts; ++i) {
        const LinePoint& pt = points[i];
        const double delta = pt.t - prev_t;
        prev_t = pt.t;
        double* row = scratch.log_emis.data() + i * n;
        // The first gap runs in from the plate edge and is censored: only
        // the survival factor applies, no density prefactor.
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t idx = s * cache.n_records + pt.record_index;
            row[s] = i == 0 ? -cache.rate[idx] * delta
                            : cache.log_rate[idx] - cache.rate[idx] * delta;
        }
        if (model.alignment_enabled) {
            const auto& pa = catalog.records[pt.record_index].position_angle;
            if (pa.has_value()) {
                const bool aligned =
                    ellipse_aligned(*pa, family.angle_deg, alignment_tolerance_deg);
                const double* term =
                    aligned ? cache.log_aligned.data() : cache.log_not_aligned.data();
                for (std::size_t s = 0; s < n; ++s) row[s] += term[s];
            }
        }
    }
    forward_backward_from_log(scratch.log_emis, n_pts, model, scratch.posteriors.data(),
                              scratch.fb);
    for (std::size_t i = 0; i < n_pts; ++i) out[i] = scratch.posteriors[i * n];
}

struct BestCell {
    double p_bg = 1.0;  // minimized; p_track = 1 - p_bg
    std::int32_t angle_idx = -1;
    std::int32_t line_idx = -1;
};

// Total order over computed cells: lower background posterior (higher track
// posterior) wins, ties resolve to the smaller angle then the smaller line,
// so any execution order yields the same result.
inline bool improves(double p_bg, std::int32_t angle_idx, std::int32_t line_idx,
                     const BestCell& cur) {
    if (cur.angle_idx < 0) return true;
    if (p_bg != cur.p_bg) return p_bg < cur.p_bg;
    if (angle_idx != cur.angle_idx) return angle_idx < cur.angle_idx;
    return line_idx < cur.line_idx;
}

void validate_config(const DetectorConfig& config) {
    if (!(config.flag_threshold > 0.0 && config.flag_threshold < 1.0))
        throw std::invalid_argument("flag_threshold must lie in (0, 1)");
    if (!(config.width > 0.0)) throw std::invalid_argument("detector width must be positive");
    if (config.n_angles == 0) throw std::invalid_argument("detector needs at least one angle");
    if (config.min_points_per_line == 0)
        throw std::invalid_argument("min_points_per_line must be >= 1");
    if (config.grid_nx == 0 || config.grid_ny == 0)
        throw std::invalid_argument("density grid needs at least one box per axis");
    validate_model(config.model);
}

}  // namespace

std::vector<double> detect_line(std::span<const LinePoint> points, const Catalog& catalog,
                                const RenewalHmmModel& model, const DensityGrid& grid,
                                const LineFamily& family, std::int64_t line_index,
                                std::size_t min_points, double alignment_tolerance_deg) {
    validate_model(model);
    std::vector<double> result(points.size(), 0.0);
    if (points.empty()) return result;
    // Cache only the records on this line.
    EmissionCache cache;
    cache.n_states = model.n_states;
    cache.n_records = catalog.records.size();
    cache.rate.resize(cache.n_states * cache.n_records, 0.0);
    cache.log_rate.resize(cache.n_states * cache.n_records, 0.0);
    for (const LinePoint& pt : points) {
        const ObjectRecord& rec = catalog.records[pt.record_index];
        const double bg = grid.linear_rate(rec.x, rec.y, family.width);
        for (std::size_t s = 0; s < model.n_states; ++s) {
            const double rate = model.state_rate(s, bg);
            cache.rate[s * cache.n_records + pt.record_index] = rate;
            cache.log_rate[s * cache.n_records + pt.record_index] = std::log(rate);
        }
    }
    if (model.alignment_enabled) {
        cache.log_aligned.resize(model.n_states);
        cache.log_not_aligned.resize(model.n_states);
        for (std::size_t s = 0; s < model.n_states; ++s) {
            cache.log_aligned[s] = std::log(model.alignment_prob[s]);
            cache.log_not_aligned[s] = std::log(1.0 - model.alignment_prob[s]);
        }
    }
    LineScratch scratch;
    detect_line_into(points, catalog, model, cache, grid.bounds(), family, line_index, min_points,
                     alignment_tolerance_deg, scratch, result.data());
    for (double& v : result) v = 1.0 - v;  // background posterior -> track mass
    return result;
}

DetectionResult sweep(const Catalog& catalog, const DetectorConfig& config) {
    validate_config(config);
    if (catalog.empty()) throw std::invalid_argument("sweep requires a non-empty catalog");
    if (catalog.records.size() > std::numeric_limits<std::uint32_t>::max() / 2)
        throw std::invalid_argument("catalog too large for the line binning index");

    const DensityGrid grid = estimate_grid(catalog, config.grid_nx, config.grid_ny);
    const AngleSet angles = make_angle_set(config.n_angles);
    const EmissionCache cache = build_emission_cache(catalog, config.model, grid, config.width);
    const std::size_t n_records = catalog.records.size();

    unsigned n_threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(config.n_angles));

    std::vector<std::vector<BestCell>> locals(n_threads);
    auto worker = [&](unsigned worker_idx, std::size_t angle_begin, std::size_t angle_end) {
        std::vector<BestCell>& best = locals[worker_idx];
        best.assign(n_records, BestCell{});
        LineScratch scratch;
        std::vector<double> line_post;
        for (std::size_t a = angle_begin; a < angle_end; ++a) {
            const double angle = angles.angles_deg[a];
            const LineFamily family =
                config.lines_per_angle > 0
                    ? make_line_family_fixed(catalog.bounds, angle, config.width,
                                             config.lines_per_angle)
                    : make_line_family(catalog.bounds, angle, config.width);
            const LineBins bins = build_line_bins(catalog, family);
            for (std::int64_t j = 0; j < bins.bin_count(); ++j) {
                const auto pts = bins.bin(j);
                if (pts.size() < config.min_points_per_line) continue;
                line_post.resize(pts.size());
                detect_line_into(pts, catalog, config.model, cache, catalog.bounds, family, j,
                                 config.min_points_per_line, config.alignment_tolerance_deg,
                                 scratch, line_post.data());
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    BestCell& cell = best[pts[i].record_index];
                    if (improves(line_post[i], static_cast<std::int32_t>(a),
                                 static_cast<std::int32_t>(j), cell)) {
                        cell.p_bg = line_post[i];
                        cell.angle_idx = static_cast<std::int32_t>(a);
                        cell.line_idx = static_cast<std::int32_t>(j);
                    }
                }
            }
            if (log_enabled(LogLevel::Debug))
                log_message(LogLevel::Debug, "sweep: finished angle " + std::to_string(a));
        }
    };

    if (n_threads == 1) {
        worker(0, 0, config.n_angles);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        const std::size_t per = (config.n_angles + n_threads - 1) / n_threads;
        for (unsigned w = 0; w < n_threads; ++w) {
            const std::size_t begin = std::min<std::size_t>(w * per, config.n_angles);
            const std::size_t end = std::min<std::size_t>(begin + per, config.n_angles);
            pool.emplace_back(worker, w, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    // Merge worker-local bests; the total order makes this independent of
    // the partitioning.
    std::vector<BestCell>& merged = locals[0];
    for (unsigned w = 1; w < n_threads; ++w) {
        for (std::size_t r = 0; r < n_records; ++r) {
            const BestCell& cand = locals[w][r];
            if (cand.angle_idx < 0) continue;
            if (improves(cand.p_bg, cand.angle_idx, cand.line_idx, merged[r])) merged[r] = cand;
        }
    }

    DetectionResult result;
    result.threshold = config.flag_threshold;
    result.p_track.resize(n_records);
    result.detect_angle_deg.resize(n_records);
    result.flag.resize(n_records);
    for (std::size_t r = 0; r < n_records; ++r) {
        const BestCell& cell = merged[r];
        const double p_track = cell.angle_idx >= 0 ? 1.0 - cell.p_bg : 0.0;
        result.p_track[r] = p_track;
        result.detect_angle_deg[r] = cell.angle_idx >= 0
                                         ? angles.angles_deg[static_cast<std::size_t>(cell.angle_idx)]
                                         : std::numeric_limits<double>::quiet_NaN();
        result.flag[r] = p_track > config.flag_threshold ? 1 : 0;
    }
    return result;
}

void flag(DetectionResult& result, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("flag threshold must lie in (0, 1)");
    result.threshold = threshold;
    for (std::size_t r = 0; r < result.p_track.size(); ++r)
        result.flag[r] = result.p_track[r] > threshold ? 1 : 0;
}

}  // namespace renewal
