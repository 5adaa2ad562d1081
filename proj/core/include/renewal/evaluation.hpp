#ifndef RENEWAL_EVALUATION_HPP
#define RENEWAL_EVALUATION_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "renewal/catalog.hpp"
#include "renewal/hough.hpp"

namespace renewal {

/// Point-level detection quality against ground truth. Percentages follow
/// the plate-evaluation convention: FP as a percentage of detections, FN as
/// a percentage of non-detections.
struct ConfusionSummary {
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t det = 0;
    std::int64_t tot = 0;
    double fp_pct = 0.0;  // 100 * fp / det (0 with warning when det = 0)
    double fn_pct = 0.0;  // 100 * fn / (tot - det)
    bool fp_pct_undefined = false;
    bool fn_pct_undefined = false;
};

/// FP = flagged but labeled background; FN = unflagged but labeled track.
/// Unlabeled records count as background. Throws when sizes disagree.
ConfusionSummary confusion(const DetectionResult& flags, const Catalog& labeled);

void write_confusion_csv(const ConfusionSummary& s, std::ostream& out);
/// Aligned text block: FP FP% FN FN% DET TOT.
void format_confusion(const ConfusionSummary& s, std::ostream& out);

/// A ground-truth track located as a Hough (angle, line) reference.
struct TrackReference {
    double angle_deg;
    std::int64_t line;
};

struct SignificanceRow {
    double siglev;
    std::size_t tracks_detected;
    std::size_t lines_flagged_total;
    double theoretical_fp;  // considered accumulators * (1 - siglev)
};

struct SignificanceTable {
    std::vector<SignificanceRow> rows;
};

/// For each significance level: how many truth tracks have a flagged line
/// within one angle step and one line index of their reference, the total
/// flagged-line count, and the theoretical false positives for a homogeneous
/// Poisson null.
SignificanceTable significance_table(const HoughResult& hough, const HoughConfig& config,
                                     const std::vector<TrackReference>& truth_tracks,
                                     const std::vector<double>& levels);

void write_significance_csv(const SignificanceTable& table, std::ostream& out);
/// Aligned text block: SIGLEV DET TOT THEOR.
void format_significance(const SignificanceTable& table, std::ostream& out);

}  // namespace renewal

#endif
