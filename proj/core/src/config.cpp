#include "renewal/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "renewal/renewal_hmm.hpp"

namespace renewal {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("config: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) config_fail(path, "expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known) config_fail(path + "." + item.key(), "unknown key");
    }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) config_fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::size_t get_count(const json& obj, const std::string& path, const char* key,
                      std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) config_fail(path + "." + key, "expected a non-negative integer");
    return v.get<std::size_t>();
}

Rect parse_bounds(const json& obj, const std::string& path, Rect fallback) {
    if (!obj.contains("bounds")) return fallback;
    const json& b = obj.at("bounds");
    const std::string bpath = path + ".bounds";
    check_keys(b, bpath, {"x_min", "x_max", "y_min", "y_max"});
    Rect r;
    r.x_min = get_number(b, bpath, "x_min", 0.0);
    r.x_max = get_number(b, bpath, "x_max", 0.0);
    r.y_min = get_number(b, bpath, "y_min", 0.0);
    r.y_max = get_number(b, bpath, "y_max", 0.0);
    if (!r.valid()) config_fail(bpath, "bounds must enclose a positive area");
    return r;
}

BackgroundSpec parse_background(const json& obj, const std::string& path) {
    BackgroundSpec spec;
    if (!obj.contains("background")) return spec;
    const json& b = obj.at("background");
    const std::string bpath = path + ".background";
    check_keys(b, bpath, {"type", "rate", "rate_min", "rate_max", "nx", "ny", "rates"});
    const std::string type = b.value("type", "constant");
    if (type == "constant") {
        spec.kind = BackgroundSpec::Kind::Constant;
    } else if (type == "gradient_x") {
        spec.kind = BackgroundSpec::Kind::GradientX;
    } else if (type == "grid") {
        spec.kind = BackgroundSpec::Kind::Grid;
    } else {
        config_fail(bpath + ".type", "expected constant, gradient_x or grid");
    }
    spec.rate = get_number(b, bpath, "rate", spec.rate);
    spec.rate_min = get_number(b, bpath, "rate_min", spec.rate_min);
    spec.rate_max = get_number(b, bpath, "rate_max", spec.rate_max);
    spec.nx = get_count(b, bpath, "nx", spec.nx);
    spec.ny = get_count(b, bpath, "ny", spec.ny);
    if (b.contains("rates")) {
        const json& r = b.at("rates");
        if (!r.is_array()) config_fail(bpath + ".rates", "expected an array");
        spec.rates.clear();
        for (const auto& v : r) {
            if (!v.is_number()) config_fail(bpath + ".rates", "expected numbers");
            spec.rates.push_back(v.get<double>());
        }
    }
    return spec;
}

GeneratorConfig parse_generator(const json& root) {
    GeneratorConfig cfg;
    if (!root.contains("generator")) return cfg;
    const json& g = root.at("generator");
    const std::string path = "generator";
    check_keys(g, path,
               {"bounds", "background", "birth_mean", "track_classes", "class_prior", "width",
                "n_angles", "lines_per_angle", "forced_tracks", "seed"});
    cfg.bounds = parse_bounds(g, path, cfg.bounds);
    cfg.background = parse_background(g, path);
    cfg.birth_mean = get_number(g, path, "birth_mean", cfg.birth_mean);
    cfg.width = get_number(g, path, "width", cfg.width);
    cfg.n_angles = get_count(g, path, "n_angles", cfg.n_angles);
    if (g.contains("lines_per_angle")) {
        const json& v = g.at("lines_per_angle");
        if (!v.is_number_integer()) config_fail(path + ".lines_per_angle", "expected an integer");
        cfg.lines_per_angle = v.get<std::int64_t>();
    }
    if (g.contains("seed")) {
        const json& v = g.at("seed");
        if (!v.is_number_unsigned()) config_fail(path + ".seed", "expected a non-negative integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    if (g.contains("track_classes")) {
        const json& arr = g.at("track_classes");
        if (!arr.is_array() || arr.empty())
            config_fail(path + ".track_classes", "expected a non-empty array");
        cfg.track_classes.clear();
        std::size_t idx = 0;
        for (const auto& c : arr) {
            const std::string cpath = path + ".track_classes[" + std::to_string(idx++) + "]";
            check_keys(c, cpath,
                       {"mean_gap", "stop_probability", "alignment_prob", "semi_major",
                        "semi_minor"});
            TrackClassConfig tc;
            tc.mean_gap = get_number(c, cpath, "mean_gap", tc.mean_gap);
            tc.stop_probability = get_number(c, cpath, "stop_probability", tc.stop_probability);
            tc.alignment_prob = get_number(c, cpath, "alignment_prob", tc.alignment_prob);
            tc.semi_major = get_number(c, cpath, "semi_major", tc.semi_major);
            tc.semi_minor = get_number(c, cpath, "semi_minor", tc.semi_minor);
            cfg.track_classes.push_back(tc);
        }
        // A single class keeps the default prior; larger lists must spell it out.
        if (cfg.track_classes.size() == 1) cfg.class_prior = {1.0};
    }
    if (g.contains("class_prior")) {
        const json& arr = g.at("class_prior");
        if (!arr.is_array()) config_fail(path + ".class_prior", "expected an array");
        cfg.class_prior.clear();
        for (const auto& v : arr) {
            if (!v.is_number()) config_fail(path + ".class_prior", "expected numbers");
            cfg.class_prior.push_back(v.get<double>());
        }
    } else if (cfg.track_classes.size() > 1) {
        config_fail(path + ".class_prior", "required when several track classes are given");
    }
    if (g.contains("forced_tracks")) {
        const json& arr = g.at("forced_tracks");
        if (!arr.is_array()) config_fail(path + ".forced_tracks", "expected an array");
        std::size_t idx = 0;
        for (const auto& f : arr) {
            const std::string fpath = path + ".forced_tracks[" + std::to_string(idx++) + "]";
            check_keys(f, fpath,
                       {"angle_deg", "class_index", "n_points", "t_start", "offset_d", "span",
                        "width"});
            ForcedTrack ft;
            ft.angle_deg = get_number(f, fpath, "angle_deg", 0.0);
            ft.class_index = get_count(f, fpath, "class_index", 0);
            ft.n_points = get_count(f, fpath, "n_points", 0);
            if (f.contains("t_start")) ft.t_start = get_number(f, fpath, "t_start", 0.0);
            if (f.contains("offset_d")) ft.offset_d = get_number(f, fpath, "offset_d", 0.0);
            if (f.contains("span")) ft.span = get_number(f, fpath, "span", 0.0);
            if (f.contains("width")) ft.width = get_number(f, fpath, "width", 0.0);
            cfg.forced_tracks.push_back(ft);
        }
    }
    return cfg;
}

RenewalHmmModel parse_model(const json& d, const std::string& dpath) {
    RenewalHmmModel model = default_model();
    if (!d.contains("model")) return model;
    const json& m = d.at("model");
    const std::string path = dpath + ".model";
    check_keys(m, path, {"transition", "track_means", "initial", "alignment"});
    if (m.contains("transition")) {
        const json& t = m.at("transition");
        if (!t.is_array() || t.empty()) config_fail(path + ".transition", "expected a matrix");
        const std::size_t n = t.size();
        model.n_states = n;
        model.transition.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const json& row = t.at(i);
            if (!row.is_array() || row.size() != n)
                config_fail(path + ".transition", "expected a square matrix");
            for (std::size_t j = 0; j < n; ++j) {
                if (!row.at(j).is_number())
                    config_fail(path + ".transition", "expected numbers");
                model.at(i, j) = row.at(j).get<double>();
            }
        }
        model.initial.clear();
        model.track_mean.assign(n - 1, 360.0);
    }
    if (m.contains("track_means")) {
        const json& tm = m.at("track_means");
        if (!tm.is_array() || tm.size() != model.n_states - 1)
            config_fail(path + ".track_means", "expected one mean per non-background state");
        model.track_mean.clear();
        for (const auto& v : tm) {
            if (!v.is_number()) config_fail(path + ".track_means", "expected numbers");
            model.track_mean.push_back(v.get<double>());
        }
    }
    if (m.contains("initial") && m.at("initial").is_array()) {
        const json& init = m.at("initial");
        if (init.size() != model.n_states)
            config_fail(path + ".initial", "expected one probability per state");
        model.initial.clear();
        for (const auto& v : init) {
            if (!v.is_number()) config_fail(path + ".initial", "expected numbers");
            model.initial.push_back(v.get<double>());
        }
    } else if (m.contains("initial") && !m.at("initial").is_string()) {
        config_fail(path + ".initial", "expected \"equilibrium\" or an array");
    } else if (m.contains("initial") && m.at("initial").get<std::string>() != "equilibrium") {
        config_fail(path + ".initial", "expected \"equilibrium\" or an array");
    }
    if (model.initial.empty())
        model.initial = equilibrium(model.transition, model.n_states);
    if (m.contains("alignment")) {
        const json& al = m.at("alignment");
        const std::string apath = path + ".alignment";
        check_keys(al, apath, {"enabled", "prob_aligned"});
        if (al.contains("enabled")) {
            if (!al.at("enabled").is_boolean()) config_fail(apath + ".enabled", "expected a bool");
            model.alignment_enabled = al.at("enabled").get<bool>();
        }
        if (model.alignment_enabled) {
            model.alignment_prob.assign(model.n_states, 0.1);
            for (std::size_t s = 1; s < model.n_states; ++s) model.alignment_prob[s] = 0.8;
            if (al.contains("prob_aligned")) {
                const json& pa = al.at("prob_aligned");
                if (!pa.is_array() || pa.size() != model.n_states)
                    config_fail(apath + ".prob_aligned", "expected one probability per state");
                model.alignment_prob.clear();
                for (const auto& v : pa) {
                    if (!v.is_number()) config_fail(apath + ".prob_aligned", "expected numbers");
                    model.alignment_prob.push_back(v.get<double>());
                }
            }
        }
    }
    validate_model(model);
    return model;
}

DetectorConfig parse_detector(const json& root) {
    DetectorConfig cfg;
    if (!root.contains("detector")) return cfg;
    const json& d = root.at("detector");
    const std::string path = "detector";
    check_keys(d, path,
               {"n_angles", "width", "lines_per_angle", "flag_threshold", "min_points_per_line",
                "grid_nx", "grid_ny", "model", "alignment_tolerance_deg"});
    cfg.n_angles = get_count(d, path, "n_angles", cfg.n_angles);
    cfg.width = get_number(d, path, "width", cfg.width);
    if (d.contains("lines_per_angle")) {
        const json& v = d.at("lines_per_angle");
        if (v.is_string()) {
            if (v.get<std::string>() != "auto")
                config_fail(path + ".lines_per_angle", "expected \"auto\" or an integer");
            cfg.lines_per_angle = 0;
        } else if (v.is_number_integer()) {
            cfg.lines_per_angle = v.get<std::int64_t>();
            if (cfg.lines_per_angle < 2)
                config_fail(path + ".lines_per_angle", "needs at least 2 lines, or \"auto\"");
        } else {
            config_fail(path + ".lines_per_angle", "expected \"auto\" or an integer");
        }
    }
    cfg.flag_threshold = get_number(d, path, "flag_threshold", cfg.flag_threshold);
    cfg.min_points_per_line = get_count(d, path, "min_points_per_line", cfg.min_points_per_line);
    cfg.grid_nx = get_count(d, path, "grid_nx", cfg.grid_nx);
    cfg.grid_ny = get_count(d, path, "grid_ny", cfg.grid_ny);
    cfg.alignment_tolerance_deg =
        get_number(d, path, "alignment_tolerance_deg", cfg.alignment_tolerance_deg);
    cfg.model = parse_model(d, path);
    if (!(cfg.flag_threshold > 0.0 && cfg.flag_threshold < 1.0))
        config_fail(path + ".flag_threshold", "must lie strictly between 0 and 1");
    if (!(cfg.width > 0.0)) config_fail(path + ".width", "must be positive");
    if (cfg.n_angles == 0) config_fail(path + ".n_angles", "must be at least 1");
    if (cfg.min_points_per_line == 0)
        config_fail(path + ".min_points_per_line", "must be at least 1");
    if (cfg.grid_nx == 0 || cfg.grid_ny == 0)
        config_fail(path + ".grid_nx/grid_ny", "must be at least 1");
    return cfg;
}

HoughConfig parse_hough(const json& root) {
    HoughConfig cfg;
    if (!root.contains("hough")) return cfg;
    const json& h = root.at("hough");
    const std::string path = "hough";
    check_keys(h, path, {"n_angles", "lines_per_angle", "exclusion_deg", "min_expected", "siglev"});
    cfg.n_angles = get_count(h, path, "n_angles", cfg.n_angles);
    if (h.contains("lines_per_angle")) {
        const json& v = h.at("lines_per_angle");
        if (!v.is_number_integer()) config_fail(path + ".lines_per_angle", "expected an integer");
        cfg.lines_per_angle = v.get<std::int64_t>();
    }
    cfg.exclusion_deg = get_number(h, path, "exclusion_deg", cfg.exclusion_deg);
    cfg.min_expected = get_number(h, path, "min_expected", cfg.min_expected);
    cfg.siglev = get_number(h, path, "siglev", cfg.siglev);
    if (!(cfg.siglev > 0.0 && cfg.siglev < 1.0))
        config_fail(path + ".siglev", "must lie strictly between 0 and 1");
    return cfg;
}

IoConfig parse_io(const json& root) {
    IoConfig cfg;
    if (!root.contains("io")) return cfg;
    const json& io = root.at("io");
    const std::string path = "io";
    check_keys(io, path, {"threads", "svg_pixels_per_micron"});
    cfg.threads = static_cast<unsigned>(get_count(io, path, "threads", cfg.threads));
    cfg.svg_pixels_per_micron =
        get_number(io, path, "svg_pixels_per_micron", cfg.svg_pixels_per_micron);
    if (!(cfg.svg_pixels_per_micron > 0.0))
        config_fail(path + ".svg_pixels_per_micron", "must be positive");
    return cfg;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(root, "$", {"generator", "detector", "hough", "io"});
    RunConfig cfg;
    cfg.generator = parse_generator(root);
    cfg.detector = parse_detector(root);
    cfg.hough = parse_hough(root);
    cfg.io = parse_io(root);
    cfg.detector.threads = cfg.io.threads;
    return cfg;
}

RunConfig load_run_config(const std::optional<std::string>& path) {
    if (!path) return RunConfig{};
    std::ifstream in(*path);
    if (!in) throw std::runtime_error("config: cannot open " + *path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

}  // namespace renewal
