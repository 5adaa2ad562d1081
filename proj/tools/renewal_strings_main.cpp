#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "renewal/catalog.hpp"
#include "renewal/config.hpp"
#include "renewal/evaluation.hpp"
#include "renewal/hough.hpp"
#include "renewal/log.hpp"
#include "renewal/svg.hpp"
#include "renewal/synthetic.hpp"
#include "renewal/track_detector.hpp"

namespace {

// Bad input from the user: config, flags, unreadable or inconsistent files.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::optional<std::string> config;
    std::string in_path;
    std::string out_path;
    std::string truth_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> threshold;
    std::optional<unsigned> threads;
};

renewal::RunConfig load_config(const Options& opt) {
    try {
        return renewal::load_run_config(opt.config);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

void require_input(const std::string& path) {
    if (!std::filesystem::exists(path)) throw UsageError("input file not found: " + path);
}

renewal::Catalog read_catalog_checked(const std::string& path) {
    require_input(path);
    try {
        return renewal::read_catalog(path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open output file: " + path);
    return out;
}

int cmd_generate(const Options& opt) {
    renewal::RunConfig cfg = load_config(opt);
    if (opt.seed) cfg.generator.seed = *opt.seed;
    const renewal::Catalog plate = renewal::sample_plate(cfg.generator);
    renewal::write_catalog(plate, opt.out_path);

    std::map<renewal::Label, std::size_t> by_label;
    for (const auto& r : plate.records) by_label[r.true_label.value_or(-1)]++;
    for (const auto& [label, count] : by_label)
        std::cout << (label < 0 ? std::string("unlabeled") : renewal::label_to_string(label))
                  << " " << count << "\n";
    std::cout << "total " << plate.records.size() << "\n";
    return 0;
}

int cmd_detect(const Options& opt) {
    renewal::RunConfig cfg = load_config(opt);
    const renewal::Catalog catalog = read_catalog_checked(opt.in_path);
    if (opt.threshold) {
        if (!(*opt.threshold > 0.0 && *opt.threshold < 1.0))
            throw UsageError("--threshold must lie in (0, 1)");
        cfg.detector.flag_threshold = *opt.threshold;
    }
    if (opt.threads) cfg.detector.threads = *opt.threads;
    const renewal::DetectionResult result = renewal::sweep(catalog, cfg.detector);
    renewal::write_catalog(catalog, opt.out_path, &result);
    std::size_t det = 0;
    for (auto f : result.flag) det += f;
    std::cout << "DET " << det << " TOT " << result.size() << "\n";
    return 0;
}

int cmd_hough(const Options& opt) {
    renewal::RunConfig cfg = load_config(opt);
    const renewal::Catalog catalog = read_catalog_checked(opt.in_path);
    const renewal::HoughResult result = renewal::accumulate(catalog, cfg.hough);
    auto out = open_output(opt.out_path);
    renewal::dump_hough_csv(result, cfg.hough, out);
    const auto flagged = renewal::flag_lines(result, cfg.hough);
    char siglev[32];
    std::snprintf(siglev, sizeof siglev, "%.9g", cfg.hough.siglev);
    std::cout << "flagged " << flagged.size() << " lines at siglev " << siglev << "\n";
    return 0;
}

int cmd_evaluate(const Options& opt) {
    require_input(opt.in_path);
    require_input(opt.truth_path);
    renewal::DetectedCatalog detected;
    renewal::Catalog truth;
    try {
        detected = renewal::read_detected_catalog(opt.in_path);
        truth = renewal::read_catalog(opt.truth_path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (!detected.detections)
        throw UsageError("detected catalog carries no p_track/flag columns: " + opt.in_path);
    if (detected.catalog.records.size() != truth.records.size())
        throw UsageError("record counts differ between detected and truth catalogs");
    for (std::size_t i = 0; i < truth.records.size(); ++i)
        if (detected.catalog.records[i].id != truth.records[i].id)
            throw UsageError("record ids differ between detected and truth catalogs");

    const renewal::ConfusionSummary summary =
        renewal::confusion(*detected.detections, truth);
    auto out = open_output(opt.out_path);
    renewal::write_confusion_csv(summary, out);
    renewal::format_confusion(summary, std::cout);
    return 0;
}

int cmd_render(const Options& opt) {
    renewal::RunConfig cfg = load_config(opt);
    require_input(opt.in_path);
    renewal::DetectedCatalog detected;
    try {
        detected = renewal::read_detected_catalog(opt.in_path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    renewal::SvgOptions options;
    options.pixels_per_micron = cfg.io.svg_pixels_per_micron;
    auto out = open_output(opt.out_path);
    renewal::render_svg(detected.catalog,
                        detected.detections ? &*detected.detections : nullptr, options, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Track and scratch detection in object catalogs via renewal-process HMMs"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd, bool needs_in, bool needs_out) {
        cmd->add_option("--config", opt.config, "JSON run configuration");
        if (needs_in) cmd->add_option("--in", opt.in_path, "input catalog CSV")->required();
        if (needs_out) cmd->add_option("--out", opt.out_path, "output path")->required();
    };

    CLI::App* generate = app.add_subcommand("generate", "sample a synthetic labeled plate");
    add_common(generate, false, true);
    generate->add_option("--seed", opt.seed, "override the generator seed");

    CLI::App* detect = app.add_subcommand("detect", "flag track-like records");
    add_common(detect, true, true);
    detect->add_option("--threshold", opt.threshold, "override the flagging threshold");
    detect->add_option("--threads", opt.threads, "worker thread cap (1 reproduces any N)");

    CLI::App* hough = app.add_subcommand("hough", "run the Hough accumulator baseline");
    add_common(hough, true, true);

    CLI::App* evaluate = app.add_subcommand("evaluate", "score detections against truth labels");
    add_common(evaluate, true, true);
    evaluate->add_option("--truth", opt.truth_path, "ground-truth labeled catalog")->required();

    CLI::App* render = app.add_subcommand("render", "render a catalog as an SVG scatter plot");
    add_common(render, true, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(generate)) return cmd_generate(opt);
        if (app.got_subcommand(detect)) return cmd_detect(opt);
        if (app.got_subcommand(hough)) return cmd_hough(opt);
        if (app.got_subcommand(evaluate)) return cmd_evaluate(opt);
        if (app.got_subcommand(render)) return cmd_render(opt);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        // precondition violations surface from config-derived values
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
