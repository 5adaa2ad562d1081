#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "renewal/hough.hpp"
#include "renewal/line_geometry.hpp"
#include "renewal/stats.hpp"
#include "support/oracle.hpp"

using namespace renewal;

namespace {

Catalog uniform_catalog(std::size_t n, Rect bounds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(bounds.x_min, bounds.x_max);
    std::uniform_real_distribution<double> uy(bounds.y_min, bounds.y_max);
    Catalog c;
    c.bounds = bounds;
    for (std::size_t i = 0; i < n; ++i) {
        ObjectRecord r;
        r.id = static_cast<std::int64_t>(i);
        r.x = ux(rng);
        r.y = uy(rng);
        c.records.push_back(r);
    }
    return c;
}

}  // namespace

TEST_CASE("poisson_tail") {
    SUBCASE("n = 0 is certain") {
        CHECK(poisson_tail(0, 5.0) == 1.0);
        CHECK(poisson_tail(0, 1e6) == 1.0);
    }
    SUBCASE("mu = 5, n = 5") {
        CHECK(poisson_tail(5, 5.0) == doctest::Approx(0.559507).epsilon(1e-5));
    }
    SUBCASE("matches direct pmf summation for small mu") {
        for (double mu : {0.5, 1.0, 5.0, 12.0, 20.0, 30.0}) {
            for (std::int64_t n = 0; n <= 80; ++n) {
                CAPTURE(mu);
                CAPTURE(n);
                CHECK(std::abs(poisson_tail(n, mu) - oracle::poisson_tail_direct(n, mu)) < 1e-10);
            }
        }
    }
    SUBCASE("monotone decreasing in n") {
        double prev = 1.0;
        for (std::int64_t n = 0; n < 60; ++n) {
            const double p = poisson_tail(n, 12.0);
            CHECK(p <= prev + 1e-15);
            prev = p;
        }
    }
    SUBCASE("stable for huge means") {
        const double p = poisson_tail(1000000, 1e6);
        CHECK(p > 0.4);
        CHECK(p < 0.6);
        CHECK(poisson_tail(1010000, 1e6) < 1e-20);
        CHECK(poisson_tail(990000, 1e6) >= 1.0 - 1e-15);
    }
}

TEST_CASE("strip_area_fraction matches monte carlo") {
    const Rect bounds{0.0, 800.0, 0.0, 500.0};
    std::mt19937_64 rng(3131);
    std::uniform_real_distribution<double> ux(bounds.x_min, bounds.x_max);
    std::uniform_real_distribution<double> uy(bounds.y_min, bounds.y_max);
    const int samples = 200000;
    for (double angle : {0.0, 22.5, 45.0, 90.0, 133.0}) {
        const auto [d_lo, d_hi] = perpendicular_range(bounds, angle);
        const double band = d_hi - d_lo;
        for (double f0 : {0.0, 0.3, 0.7}) {
            const double lo = d_lo + f0 * band;
            const double hi = lo + 0.15 * band;
            std::size_t inside = 0;
            std::mt19937_64 mc(rng());
            for (int i = 0; i < samples; ++i) {
                const auto lc = project(ux(mc), uy(mc), angle);
                if (lc.d >= lo && lc.d < hi) ++inside;
            }
            const double expected = static_cast<double>(inside) / samples;
            const double got = strip_area_fraction(bounds, angle, lo, hi);
            CAPTURE(angle);
            CAPTURE(f0);
            CHECK(std::abs(got - expected) < 0.005);
        }
    }
    // full band covers everything
    const auto [lo, hi] = perpendicular_range(bounds, 60.0);
    CHECK(strip_area_fraction(bounds, 60.0, lo - 1.0, hi + 1.0) == doctest::Approx(1.0));
}

TEST_CASE("accumulate counts every point exactly once per angle") {
    const Catalog c = uniform_catalog(2000, Rect{0.0, 10000.0, 0.0, 10000.0}, 88);
    HoughConfig config;
    config.n_angles = 12;
    config.lines_per_angle = 64;
    const HoughResult result = accumulate(c, config);
    for (std::size_t a = 0; a < config.n_angles; ++a) {
        std::int64_t total = 0;
        for (std::int64_t j = 0; j < config.lines_per_angle; ++j)
            total += result.counts[result.cell(a, j)];
        CHECK(total == 2000);
    }
}

TEST_CASE("homogeneous catalog stays within poisson concentration") {
    const Catalog c = uniform_catalog(20000, Rect{0.0, 50000.0, 0.0, 50000.0}, 17);
    HoughConfig config;
    config.n_angles = 16;
    config.lines_per_angle = 40;
    const HoughResult result = accumulate(c, config);
    for (std::size_t a = 0; a < config.n_angles; ++a)
        for (std::int64_t j = 0; j < config.lines_per_angle; ++j) {
            const std::size_t cell = result.cell(a, j);
            const double mu = result.mu[cell];
            if (mu < 5.0) continue;
            CHECK(std::abs(static_cast<double>(result.counts[cell]) - mu) <=
                  5.0 * std::sqrt(mu));
        }
}

TEST_CASE("single point hits one line per angle") {
    Catalog c;
    c.bounds = Rect{0.0, 1000.0, 0.0, 1000.0};
    ObjectRecord r;
    r.id = 0;
    r.x = 321.0;
    r.y = 654.0;
    c.records.push_back(r);
    HoughConfig config;
    config.n_angles = 9;
    config.lines_per_angle = 21;
    const HoughResult result = accumulate(c, config);
    std::size_t ones = 0;
    for (std::uint32_t v : result.counts) ones += v;
    CHECK(ones == config.n_angles);
}

TEST_CASE("corner clusters break the homogeneous null") {
    // Inhomogeneity failure mode: a dense corner clump inflates the
    // accumulators passing through it.
    Catalog c = uniform_catalog(3000, Rect{0.0, 10000.0, 0.0, 10000.0}, 3);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 600.0);
    for (int i = 0; i < 600; ++i) {
        ObjectRecord r;
        r.id = 3000 + i;
        r.x = u(rng);
        r.y = u(rng);
        c.records.push_back(r);
    }
    HoughConfig config;
    config.n_angles = 8;
    config.lines_per_angle = 32;
    config.min_expected = 5.0;
    config.siglev = 1.0 - 1e-7;
    const HoughResult result = accumulate(c, config);
    const auto flagged = flag_lines(result, config);
    CHECK_FALSE(flagged.empty());
    // every flagged strip passes near the corner clump
    for (const auto& f : flagged) {
        const double d_lo = result.band_lo[f.angle_idx] +
                            static_cast<double>(f.line) * result.strip_width[f.angle_idx];
        const auto corner = project(300.0, 300.0, result.angles_deg[f.angle_idx]);
        CHECK(corner.d >= d_lo - result.strip_width[f.angle_idx]);
        CHECK(corner.d <= d_lo + 2.0 * result.strip_width[f.angle_idx]);
    }
}

TEST_CASE("angle exclusion reproduces the 968 considered angles") {
    CHECK(considered_angles(1000, 1.5) == 968);
    // the wedges cut both horizontal representations and the vertical
    CHECK(considered_angles(1000, 0.0) == 1000);
    CHECK(considered_angles(4, 1.5) == 4);
}

TEST_CASE("flag_lines applies the wedge, floor, and significance rules") {
    const Catalog c = uniform_catalog(4000, Rect{0.0, 20000.0, 0.0, 20000.0}, 5);
    HoughConfig config;
    config.n_angles = 100;
    config.lines_per_angle = 30;
    config.exclusion_deg = 3.6;  // two grid steps on each side
    config.min_expected = 12.0;
    config.siglev = 0.999;
    const HoughResult result = accumulate(c, config);
    const auto flagged = flag_lines(result, config);
    const double step = 1.8;
    for (const auto& f : flagged) {
        CHECK_FALSE(angle_excluded(result.angles_deg[f.angle_idx], step, config.exclusion_deg));
        CHECK(f.mu >= config.min_expected);
        CHECK(f.p_value <= 1.0 - config.siglev);
    }

    // monotone: a stricter level flags a subset
    HoughConfig strict = config;
    strict.siglev = 0.99999;
    const auto strict_flags = flag_lines(result, strict);
    CHECK(strict_flags.size() <= flagged.size());
}

TEST_CASE("hough csv dump shape") {
    const Catalog c = uniform_catalog(100, Rect{0.0, 1000.0, 0.0, 1000.0}, 6);
    HoughConfig config;
    config.n_angles = 4;
    config.lines_per_angle = 8;
    const HoughResult result = accumulate(c, config);
    std::ostringstream out;
    dump_hough_csv(result, config, out);
    const std::string text = out.str();
    CHECK(text.rfind("angle_deg,line_index,count,mu,p_value,flagged\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 8);
}
