#include "renewal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "renewal/log.hpp"

namespace renewal {

ConfusionSummary confusion(const DetectionResult& flags, const Catalog& labeled) {
    if (flags.size() != labeled.records.size())
        throw std::invalid_argument("confusion: flags and labels must cover the same records");
    ConfusionSummary s;
    s.tot = static_cast<std::int64_t>(labeled.records.size());
    for (std::size_t i = 0; i < labeled.records.size(); ++i) {
        const bool flagged = flags.flag[i] != 0;
        const bool is_track = labeled.records[i].is_track_label();
        if (flagged) {
            ++s.det;
            if (!is_track) ++s.fp;
        } else if (is_track) {
            ++s.fn;
        }
    }
    if (s.det > 0) {
        s.fp_pct = 100.0 * static_cast<double>(s.fp) / static_cast<double>(s.det);
    } else {
        s.fp_pct_undefined = true;
        log_message(LogLevel::Warn, "confusion: no detections, FP% reported as 0");
    }
    if (s.tot > s.det) {
        s.fn_pct = 100.0 * static_cast<double>(s.fn) / static_cast<double>(s.tot - s.det);
    } else {
        s.fn_pct_undefined = true;
        log_message(LogLevel::Warn, "confusion: everything detected, FN% reported as 0");
    }
    return s;
}

void write_confusion_csv(const ConfusionSummary& s, std::ostream& out) {
    char buf[160];
    out << "fp,fp_pct,fn,fn_pct,det,tot\n";
    std::snprintf(buf, sizeof buf, "%lld,%.6g,%lld,%.6g,%lld,%lld\n",
                  static_cast<long long>(s.fp), s.fp_pct, static_cast<long long>(s.fn), s.fn_pct,
                  static_cast<long long>(s.det), static_cast<long long>(s.tot));
    out << buf;
}

void format_confusion(const ConfusionSummary& s, std::ostream& out) {
    char buf[200];
    out << "FP      FP%     FN      FN%       DET      TOT\n";
    std::snprintf(buf, sizeof buf, "%-7lld %-7.2g %-7lld %-9.2g %-8lld %lld\n",
                  static_cast<long long>(s.fp), s.fp_pct, static_cast<long long>(s.fn), s.fn_pct,
                  static_cast<long long>(s.det), static_cast<long long>(s.tot));
    out << buf;
}

SignificanceTable significance_table(const HoughResult& hough, const HoughConfig& config,
                                     const std::vector<TrackReference>& truth_tracks,
                                     const std::vector<double>& levels) {
    SignificanceTable table;
    const double step = 180.0 / static_cast<double>(hough.n_angles);
    const double considered =
        static_cast<double>(considered_angles(hough.n_angles, config.exclusion_deg)) *
        static_cast<double>(hough.lines_per_angle);

    auto angle_distance = [](double a, double b) {
        double d = std::fabs(a - b);
        d = std::fmod(d, 180.0);
        return std::min(d, 180.0 - d);
    };

    for (double level : levels) {
        HoughConfig at_level = config;
        at_level.siglev = level;
        const std::vector<FlaggedLine> flags = flag_lines(hough, at_level);
        std::size_t detected = 0;
        for (const TrackReference& ref : truth_tracks) {
            const bool hit = std::any_of(flags.begin(), flags.end(), [&](const FlaggedLine& f) {
                return angle_distance(hough.angles_deg[f.angle_idx], ref.angle_deg) <=
                           step + 1e-9 &&
                       std::llabs(f.line - ref.line) <= 1;
            });
            if (hit) ++detected;
        }
        table.rows.push_back(SignificanceRow{level, detected, flags.size(),
                                             considered * (1.0 - level)});
    }
    return table;
}

void write_significance_csv(const SignificanceTable& table, std::ostream& out) {
    out << "siglev,tracks_detected,lines_flagged_total,theoretical_fp\n";
    char buf[160];
    for (const SignificanceRow& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%zu,%zu,%.6g\n", r.siglev, r.tracks_detected,
                      r.lines_flagged_total, r.theoretical_fp);
        out << buf;
    }
}

void format_significance(const SignificanceTable& table, std::ostream& out) {
    out << "SIGLEV          DET   TOT         THEOR\n";
    char buf[160];
    for (const SignificanceRow& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%-15.10g %-5zu %-11zu %.2g\n", r.siglev,
                      r.tracks_detected, r.lines_flagged_total, r.theoretical_fp);
        out << buf;
    }
}

}  // namespace renewal
