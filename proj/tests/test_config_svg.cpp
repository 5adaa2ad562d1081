#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "renewal/config.hpp"
#include "renewal/svg.hpp"

using namespace renewal;

TEST_CASE("empty config takes full defaults") {
    const RunConfig cfg = parse_run_config("{}");
    CHECK(cfg.detector.n_angles == 1000);
    CHECK(cfg.detector.width == 50.0);
    CHECK(cfg.detector.flag_threshold == 0.5);
    CHECK(cfg.detector.lines_per_angle == 0);  // auto
    CHECK(cfg.detector.grid_nx == 200);
    CHECK(cfg.detector.grid_ny == 200);
    CHECK(cfg.detector.model.n_states == 2);
    CHECK(cfg.detector.model.track_mean[0] == 360.0);
    CHECK_FALSE(cfg.detector.model.alignment_enabled);
    CHECK(cfg.hough.n_angles == 1000);
    CHECK(cfg.hough.lines_per_angle == 9000);
    CHECK(cfg.hough.exclusion_deg == 1.5);
    CHECK(cfg.hough.min_expected == 12.0);
    CHECK(cfg.generator.birth_mean == 1e8);
    CHECK(cfg.generator.width == 50.0);
    CHECK(cfg.generator.seed == 1);
}

TEST_CASE("unknown keys are rejected with their path") {
    CHECK_THROWS_WITH_AS(parse_run_config(R"({"detektor": {}})"),
                         doctest::Contains("detektor"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_run_config(R"({"detector": {"n_angels": 10}})"),
                         doctest::Contains("n_angels"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_run_config(R"({"generator": {"bounds": {"xmin": 0}}})"),
                         doctest::Contains("xmin"), std::runtime_error);
    CHECK_THROWS_AS(parse_run_config("not json"), std::runtime_error);
}

TEST_CASE("detector model parses and validates") {
    const char* text = R"({
      "detector": {
        "n_angles": 200,
        "lines_per_angle": "auto",
        "model": {
          "transition": [[0.99, 0.1], [0.01, 0.9]],
          "track_means": [500.0],
          "initial": "equilibrium",
          "alignment": {"enabled": true, "prob_aligned": [0.2, 0.7]}
        }
      }
    })";
    const RunConfig cfg = parse_run_config(text);
    CHECK(cfg.detector.n_angles == 200);
    CHECK(cfg.detector.model.at(1, 0) == doctest::Approx(0.01));
    CHECK(cfg.detector.model.track_mean[0] == 500.0);
    CHECK(cfg.detector.model.alignment_enabled);
    CHECK(cfg.detector.model.alignment_prob[1] == 0.7);
    // equilibrium initial: pi = P pi
    const auto& m = cfg.detector.model;
    for (std::size_t i = 0; i < 2; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < 2; ++j) v += m.at(i, j) * m.initial[j];
        CHECK(v == doctest::Approx(m.initial[i]).epsilon(1e-9));
    }

    CHECK_THROWS_AS(parse_run_config(R"({"detector": {"model": {"transition": [[0.5, 0.5]]}}})"),
                    std::runtime_error);
    // columns not summing to one fail validation
    CHECK_THROWS_AS(
        parse_run_config(R"({"detector": {"model": {"transition": [[0.9, 0.2], [0.2, 0.8]]}}})"),
        std::exception);
}

TEST_CASE("generator section round trip") {
    const char* text = R"({
      "generator": {
        "bounds": {"x_min": 0, "x_max": 320000, "y_min": 0, "y_max": 320000},
        "background": {"type": "gradient_x", "rate_min": 6.5e-7, "rate_max": 1.3e-6},
        "birth_mean": 1e9,
        "track_classes": [
          {"mean_gap": 360.0, "stop_probability": 0.01, "alignment_prob": 0.8}
        ],
        "forced_tracks": [
          {"angle_deg": 30.0, "class_index": 0, "n_points": 50, "t_start": 1000.0}
        ],
        "seed": 9
      }
    })";
    const RunConfig cfg = parse_run_config(text);
    CHECK(cfg.generator.bounds.x_max == 320000.0);
    CHECK(cfg.generator.background.kind == BackgroundSpec::Kind::GradientX);
    CHECK(cfg.generator.background.rate_min == doctest::Approx(6.5e-7));
    CHECK(cfg.generator.birth_mean == 1e9);
    REQUIRE(cfg.generator.forced_tracks.size() == 1);
    CHECK(cfg.generator.forced_tracks[0].n_points == 50);
    CHECK(cfg.generator.forced_tracks[0].t_start == 1000.0);
    CHECK_FALSE(cfg.generator.forced_tracks[0].offset_d.has_value());
    CHECK(cfg.generator.seed == 9);
}

TEST_CASE("io section controls threads and svg scale") {
    const RunConfig cfg = parse_run_config(R"({"io": {"threads": 3, "svg_pixels_per_micron": 0.01}})");
    CHECK(cfg.io.threads == 3);
    CHECK(cfg.detector.threads == 3);
    CHECK(cfg.io.svg_pixels_per_micron == 0.01);
    CHECK_THROWS_AS(parse_run_config(R"({"io": {"svg_pixels_per_micron": 0}})"),
                    std::runtime_error);
}

TEST_CASE("svg render emits one ellipse per record") {
    Catalog c;
    c.bounds = Rect{0.0, 1000.0, 0.0, 1000.0};
    for (int i = 0; i < 3; ++i) {
        ObjectRecord r;
        r.id = i;
        r.x = 100.0 * (i + 1);
        r.y = 500.0;
        if (i == 1) {
            r.semi_major = 30.0;
            r.semi_minor = 10.0;
            r.position_angle = 45.0;
        }
        c.records.push_back(r);
    }
    DetectionResult det;
    det.p_track = {0.9, 0.2, 0.1};
    det.detect_angle_deg.assign(3, 0.0);
    det.flag = {1, 0, 0};

    std::ostringstream out;
    render_svg(c, &det, SvgOptions{}, out);
    const std::string svg = out.str();

    auto count_substr = [&](const std::string& needle) {
        std::size_t n = 0, pos = 0;
        while ((pos = svg.find(needle, pos)) != std::string::npos) {
            ++n;
            pos += needle.size();
        }
        return n;
    };
    CHECK(count_substr("<ellipse") == 3);
    CHECK(count_substr("#d62728") == 1);  // flagged stroke
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("rotate(-45") != std::string::npos);
}
