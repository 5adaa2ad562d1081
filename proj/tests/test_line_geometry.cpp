#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "renewal/line_geometry.hpp"
#include "support/oracle.hpp"

using namespace renewal;

TEST_CASE("make_angle_set spacing") {
    SUBCASE("n=4") {
        const AngleSet s = make_angle_set(4);
        REQUIRE(s.size() == 4);
        CHECK(s.angles_deg[0] == 0.0);
        CHECK(s.angles_deg[1] == doctest::Approx(45.0));
        CHECK(s.angles_deg[2] == doctest::Approx(90.0));
        CHECK(s.angles_deg[3] == doctest::Approx(135.0));
    }
    SUBCASE("n=1000 has 0.18 degree spacing") {
        const AngleSet s = make_angle_set(1000);
        CHECK(s.step_deg() == doctest::Approx(0.18));
        CHECK(s.angles_deg[1] == doctest::Approx(0.18));
        CHECK(s.angles_deg.back() < 180.0);
    }
    SUBCASE("n=1") {
        const AngleSet s = make_angle_set(1);
        REQUIRE(s.size() == 1);
        CHECK(s.angles_deg[0] == 0.0);
    }
    SUBCASE("n=0 rejected") { CHECK_THROWS_AS(make_angle_set(0), std::invalid_argument); }
}

TEST_CASE("project rotates by minus theta") {
    auto p = project(1.0, 0.0, 0.0);
    CHECK(p.t == doctest::Approx(1.0));
    CHECK(p.d == doctest::Approx(0.0));

    p = project(0.0, 1.0, 0.0);
    CHECK(p.t == doctest::Approx(0.0));
    CHECK(p.d == doctest::Approx(1.0));

    p = project(1.0, 1.0, 45.0);
    CHECK(p.t == doctest::Approx(std::sqrt(2.0)));
    CHECK(p.d == doctest::Approx(0.0));
}

TEST_CASE("projection at theta+90 swaps and negates") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-1000.0, 1000.0);
    std::uniform_real_distribution<double> angle(0.0, 90.0);
    for (int i = 0; i < 200; ++i) {
        const double x = coord(rng), y = coord(rng), a = angle(rng);
        const auto p = project(x, y, a);
        const auto q = project(x, y, a + 90.0);
        CHECK(q.t == doctest::Approx(p.d).epsilon(1e-12));
        CHECK(q.d == doctest::Approx(-p.t).epsilon(1e-12));
    }
}

TEST_CASE("bin_point returns the two covering strips") {
    LineFamily unbounded;
    unbounded.width = 2.0;
    unbounded.origin_offset = 0.0;
    unbounded.line_count = 0;  // arithmetic only

    SUBCASE("half-open boundary") {
        const auto [a, b] = bin_point(0.0, unbounded);
        CHECK(a == -1);
        CHECK(b == 0);
    }
    SUBCASE("interior") {
        const auto [a, b] = bin_point(1.0, unbounded);
        CHECK(a == 0);
        CHECK(b == 1);
    }
    SUBCASE("w=50 d=130") {
        LineFamily f;
        f.width = 50.0;
        f.origin_offset = 0.0;
        f.line_count = 0;
        const auto [a, b] = bin_point(130.0, f);
        CHECK(a == 4);
        CHECK(b == 5);
    }
    SUBCASE("bounded family rejects out-of-band offsets") {
        LineFamily f;
        f.width = 2.0;
        f.origin_offset = 0.0;
        f.line_count = 10;
        CHECK_THROWS_AS(bin_point(0.5, f), std::out_of_range);   // strip -1 does not exist
        CHECK_THROWS_AS(bin_point(10.0, f), std::out_of_range);  // beyond the last strip
        CHECK_NOTHROW(bin_point(1.0, f));
    }
}

TEST_CASE("auto family covers the rotated bounds in exactly two strips") {
    const Rect bounds{0.0, 5000.0, 0.0, 3000.0};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(bounds.x_min, bounds.x_max);
    std::uniform_real_distribution<double> uy(bounds.y_min, bounds.y_max);
    for (double angle : {0.0, 13.7, 45.0, 90.0, 121.9, 179.82}) {
        const LineFamily f = make_line_family(bounds, angle, 50.0);
        for (int i = 0; i < 300; ++i) {
            const auto lc = project(ux(rng), uy(rng), angle);
            const auto [a, b] = bin_point(lc.d, f);
            CHECK(a >= 0);
            CHECK(b == a + 1);
            CHECK(b < f.line_count);
        }
    }
}

TEST_CASE("build_line_bins matches the naive double loop") {
    std::mt19937_64 rng(23);
    Catalog catalog;
    catalog.bounds = Rect{0.0, 10000.0, 0.0, 10000.0};
    std::uniform_real_distribution<double> coord(0.0, 10000.0);
    for (int i = 0; i < 1000; ++i) {
        ObjectRecord r;
        r.id = i;
        r.x = coord(rng);
        r.y = coord(rng);
        catalog.records.push_back(r);
    }
    const LineFamily family = make_line_family(catalog.bounds, 31.0, 80.0);
    const LineBins bins = build_line_bins(catalog, family);

    CHECK(bins.total_memberships() == 2000);

    const auto naive = oracle::naive_memberships(catalog, family);
    // Each record sits in exactly the two strips the naive scan finds.
    std::vector<std::set<std::int64_t>> from_bins(catalog.records.size());
    for (std::int64_t j = 0; j < bins.bin_count(); ++j) {
        double prev_t = -std::numeric_limits<double>::infinity();
        for (const LinePoint& p : bins.bin(j)) {
            CHECK(p.t >= prev_t);  // sorted
            prev_t = p.t;
            from_bins[p.record_index].insert(j);
        }
    }
    for (std::size_t i = 0; i < catalog.records.size(); ++i) {
        CAPTURE(i);
        REQUIRE(naive[i].size() == 2);
        CHECK(from_bins[i] == std::set<std::int64_t>(naive[i].begin(), naive[i].end()));
    }
}

TEST_CASE("build_line_bins on an empty catalog") {
    Catalog catalog;
    catalog.bounds = Rect{0.0, 100.0, 0.0, 100.0};
    const LineFamily family = make_line_family(catalog.bounds, 10.0, 10.0);
    const LineBins bins = build_line_bins(catalog, family);
    CHECK(bins.total_memberships() == 0);
    for (std::int64_t j = 0; j < bins.bin_count(); ++j) CHECK(bins.bin(j).empty());
}

TEST_CASE("single point lands in exactly two bins") {
    Catalog catalog;
    catalog.bounds = Rect{0.0, 100.0, 0.0, 100.0};
    ObjectRecord r;
    r.id = 0;
    r.x = 37.0;
    r.y = 81.0;
    catalog.records.push_back(r);
    const LineFamily family = make_line_family(catalog.bounds, 73.1, 7.0);
    const LineBins bins = build_line_bins(catalog, family);
    CHECK(bins.total_memberships() == 2);
    int containing = 0;
    for (std::int64_t j = 0; j < bins.bin_count(); ++j)
        if (!bins.bin(j).empty()) {
            containing += 1;
            CHECK(bins.bin(j).size() == 1);
        }
    CHECK(containing == 2);
}

TEST_CASE("ties in t are broken by record id") {
    Catalog catalog;
    catalog.bounds = Rect{0.0, 100.0, 0.0, 100.0};
    for (int i : {4, 2, 8}) {
        ObjectRecord r;
        r.id = i;
        r.x = 50.0;
        r.y = 50.0;  // identical projections
        catalog.records.push_back(r);
    }
    const LineFamily family = make_line_family(catalog.bounds, 0.0, 10.0);
    const LineBins bins = build_line_bins(catalog, family);
    for (std::int64_t j = 0; j < bins.bin_count(); ++j) {
        const auto pts = bins.bin(j);
        if (pts.empty()) continue;
        REQUIRE(pts.size() == 3);
        CHECK(pts[0].record_id == 2);
        CHECK(pts[1].record_id == 4);
        CHECK(pts[2].record_id == 8);
    }
}

TEST_CASE("line_chord clips against the plate") {
    const Rect bounds{0.0, 100.0, 0.0, 50.0};
    SUBCASE("horizontal line through the middle") {
        const auto chord = line_chord(bounds, 0.0, 25.0);
        REQUIRE(chord.has_value());
        CHECK(chord->first == doctest::Approx(0.0));
        CHECK(chord->second == doctest::Approx(100.0));
    }
    SUBCASE("horizontal line outside") {
        CHECK_FALSE(line_chord(bounds, 0.0, 60.0).has_value());
    }
    SUBCASE("vertical line") {
        const auto chord = line_chord(bounds, 90.0, -40.0);  // x = 40
        REQUIRE(chord.has_value());
        CHECK(chord->second - chord->first == doctest::Approx(50.0));
    }
}
