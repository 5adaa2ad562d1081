#include "renewal/hough.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "renewal/line_geometry.hpp"
#include "renewal/stats.hpp"

namespace renewal {

std::int64_t HoughResult::line_index(std::size_t angle_idx, double d) const {
    const double sw = strip_width[angle_idx];
    auto idx = static_cast<std::int64_t>(std::floor((d - band_lo[angle_idx]) / sw));
    if (idx < 0) idx = 0;
    if (idx >= lines_per_angle) idx = lines_per_angle - 1;
    return idx;
}

double strip_area_fraction(const Rect& bounds, double angle_deg, double d_lo, double d_hi) {
    if (d_hi <= d_lo) return 0.0;
    // d = -x sin + y cos over a uniform point in the rectangle is the sum of
    // two independent uniforms; its CDF is the trapezoid law.
    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double s = std::sin(rad);
    const double c = std::cos(rad);
    double a1 = -bounds.x_min * s, b1 = -bounds.x_max * s;
    if (a1 > b1) std::swap(a1, b1);
    double a2 = bounds.y_min * c, b2 = bounds.y_max * c;
    if (a2 > b2) std::swap(a2, b2);
    double w1 = b1 - a1;
    double w2 = b2 - a2;
    if (w1 > w2) std::swap(w1, w2);
    const double base = a1 + a2;

    auto cdf = [&](double z) {
        const double v = z - base;
        if (v <= 0.0) return 0.0;
        if (v >= w1 + w2) return 1.0;
        if (w1 <= 0.0) return std::clamp(v / w2, 0.0, 1.0);
        if (v <= w1) return v * v / (2.0 * w1 * w2);
        if (v <= w2) return (v - w1 / 2.0) / w2;
        const double r = w1 + w2 - v;
        return 1.0 - r * r / (2.0 * w1 * w2);
    };
    return cdf(d_hi) - cdf(d_lo);
}

HoughResult accumulate(const Catalog& catalog, const HoughConfig& config) {
    if (catalog.empty()) throw std::invalid_argument("hough accumulate requires records");
    if (config.n_angles == 0 || config.lines_per_angle <= 0)
        throw std::invalid_argument("hough needs angles and lines");
    if (!(config.siglev > 0.0 && config.siglev < 1.0))
        throw std::invalid_argument("siglev must lie in (0, 1)");

    const AngleSet angles = make_angle_set(config.n_angles);
    HoughResult result;
    result.n_angles = config.n_angles;
    result.lines_per_angle = config.lines_per_angle;
    result.angles_deg = angles.angles_deg;
    result.band_lo.resize(config.n_angles);
    result.strip_width.resize(config.n_angles);
    const std::size_t cells = config.n_angles * static_cast<std::size_t>(config.lines_per_angle);
    result.counts.assign(cells, 0);
    result.mu.resize(cells);
    result.p_value.resize(cells);

    const auto total = static_cast<double>(catalog.records.size());
    // Each angle owns a private slice of the accumulator table, so angles
    // run in parallel with no shared mutable state and any partitioning
    // yields the same counts.
    auto process_angle = [&](std::size_t a) {
        const double angle = angles.angles_deg[a];
        const auto [d_lo, d_hi] = perpendicular_range(catalog.bounds, angle);
        const double sw = (d_hi - d_lo) / static_cast<double>(config.lines_per_angle);
        result.band_lo[a] = d_lo;
        result.strip_width[a] = sw;

        const double rad = angle * std::numbers::pi / 180.0;
        const double s = std::sin(rad);
        const double c = std::cos(rad);
        std::uint32_t* counts = result.counts.data() + result.cell(a, 0);
        for (const ObjectRecord& r : catalog.records) {
            const double d = -r.x * s + r.y * c;
            auto idx = static_cast<std::int64_t>(std::floor((d - d_lo) / sw));
            // The top of the band is closed so corner records stay in range.
            if (idx >= config.lines_per_angle) idx = config.lines_per_angle - 1;
            if (idx < 0) idx = 0;
            ++counts[idx];
        }
        for (std::int64_t j = 0; j < config.lines_per_angle; ++j) {
            const double lo = d_lo + static_cast<double>(j) * sw;
            const double mu = total * strip_area_fraction(catalog.bounds, angle, lo, lo + sw);
            const std::size_t cell = result.cell(a, j);
            result.mu[cell] = mu;
            result.p_value[cell] = poisson_tail(result.counts[cell], mu);
        }
    };

    unsigned n_threads = std::min<unsigned>(std::thread::hardware_concurrency(),
                                            static_cast<unsigned>(config.n_angles));
    if (n_threads <= 1) {
        for (std::size_t a = 0; a < config.n_angles; ++a) process_angle(a);
    } else {
        std::vector<std::thread> pool;
        const std::size_t per = (config.n_angles + n_threads - 1) / n_threads;
        for (unsigned w = 0; w < n_threads; ++w) {
            const std::size_t begin = std::min<std::size_t>(w * per, config.n_angles);
            const std::size_t end = std::min<std::size_t>(begin + per, config.n_angles);
            pool.emplace_back([&, begin, end] {
                for (std::size_t a = begin; a < end; ++a) process_angle(a);
            });
        }
        for (auto& t : pool) t.join();
    }
    return result;
}

bool angle_excluded(double angle_deg, double step_deg, double exclusion_deg) {
    // Each discrete angle stands for the band [angle, angle + step); the
    // angle is excluded when that whole band sits inside a wedge about the
    // horizontal (0 or 180) or vertical (90).
    for (double axis : {0.0, 90.0, 180.0}) {
        if (angle_deg >= axis - exclusion_deg && angle_deg + step_deg <= axis + exclusion_deg)
            return true;
    }
    return false;
}

std::size_t considered_angles(std::size_t n_angles, double exclusion_deg) {
    const AngleSet angles = make_angle_set(n_angles);
    const double step = angles.step_deg();
    std::size_t kept = 0;
    for (double a : angles.angles_deg)
        if (!angle_excluded(a, step, exclusion_deg)) ++kept;
    return kept;
}

std::vector<FlaggedLine> flag_lines(const HoughResult& result, const HoughConfig& config) {
    std::vector<FlaggedLine> flagged;
    const double step = 180.0 / static_cast<double>(result.n_angles);
    const double alpha = 1.0 - config.siglev;
    for (std::size_t a = 0; a < result.n_angles; ++a) {
        if (angle_excluded(result.angles_deg[a], step, config.exclusion_deg)) continue;
        for (std::int64_t j = 0; j < result.lines_per_angle; ++j) {
            const std::size_t cell = result.cell(a, j);
            if (result.mu[cell] < config.min_expected) continue;
            if (result.p_value[cell] <= alpha)
                flagged.push_back(FlaggedLine{a, j, result.counts[cell], result.mu[cell],
                                              result.p_value[cell]});
        }
    }
    return flagged;
}

void dump_hough_csv(const HoughResult& result, const HoughConfig& config, std::ostream& out) {
    const double step = 180.0 / static_cast<double>(result.n_angles);
    const double alpha = 1.0 - config.siglev;
    out << "angle_deg,line_index,count,mu,p_value,flagged\n";
    char buf[128];
    for (std::size_t a = 0; a < result.n_angles; ++a) {
        const bool excluded = angle_excluded(result.angles_deg[a], step, config.exclusion_deg);
        for (std::int64_t j = 0; j < result.lines_per_angle; ++j) {
            const std::size_t cell = result.cell(a, j);
            const bool flagged = !excluded && result.mu[cell] >= config.min_expected &&
                                 result.p_value[cell] <= alpha;
            std::snprintf(buf, sizeof buf, "%.6f,%lld,%u,%.9g,%.9g,%d\n", result.angles_deg[a],
                          static_cast<long long>(j), result.counts[cell], result.mu[cell],
                          result.p_value[cell], flagged ? 1 : 0);
            out << buf;
        }
    }
}

}  // namespace renewal
