#ifndef RENEWAL_CONFIG_HPP
#define RENEWAL_CONFIG_HPP

#include <optional>
#include <string>

#include "renewal/hough.hpp"
#include "renewal/synthetic.hpp"
#include "renewal/track_detector.hpp"

namespace renewal {

struct IoConfig {
    unsigned threads = 0;                  // 0 = hardware concurrency
    double svg_pixels_per_micron = 0.003;  // render scale
};

/// The JSON run configuration: sections generator, detector, hough, io.
/// Missing sections take full defaults; unknown keys are rejected.
struct RunConfig {
    GeneratorConfig generator;
    DetectorConfig detector;
    HoughConfig hough;
    IoConfig io;
};

/// Parses a config document. Throws std::runtime_error with the offending
/// key path on unknown keys, type mismatches, or invalid values.
RunConfig parse_run_config(const std::string& json_text);

/// Loads and parses a config file; a missing `path` yields all defaults.
RunConfig load_run_config(const std::optional<std::string>& path);

}  // namespace renewal

#endif
