#include "renewal/catalog.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace renewal {

double Rect::diagonal() const { return std::hypot(width(), height()); }

bool DetectionResult::has_angle(std::size_t i) const {
    return !std::isnan(detect_angle_deg[i]);
}

std::string label_to_string(Label label) {
    if (label == kLabelBackground) return "background";
    return "track" + std::to_string(label);
}

std::optional<Label> label_from_string(const std::string& text) {
    if (text.empty()) return std::nullopt;
    if (text == "background") return kLabelBackground;
    if (text.rfind("track", 0) == 0) {
        const char* first = text.data() + 5;
        const char* last = text.data() + text.size();
        Label k = 0;
        auto [ptr, ec] = std::from_chars(first, last, k);
        if (ec == std::errc() && ptr == last && k >= 1) return k;
    }
    throw std::runtime_error("unrecognized label '" + text + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& field, const std::string& path, std::size_t line_no,
                    const char* column) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        parse_fail(path, line_no, std::string("bad value for column ") + column + ": '" + field + "'");
    return value;
}

struct ColumnMap {
    int id = -1, x = -1, y = -1, semi_major = -1, semi_minor = -1, position_angle = -1,
        label = -1, p_track = -1, flag = -1, detect_angle = -1;
    int count = 0;
};

ColumnMap parse_header(const std::string& line, const std::string& path) {
    ColumnMap map;
    auto fields = split_csv_line(line);
    map.count = static_cast<int>(fields.size());
    for (int i = 0; i < map.count; ++i) {
        const std::string& name = fields[static_cast<std::size_t>(i)];
        if (name == "id") map.id = i;
        else if (name == "x") map.x = i;
        else if (name == "y") map.y = i;
        else if (name == "semi_major") map.semi_major = i;
        else if (name == "semi_minor") map.semi_minor = i;
        else if (name == "position_angle") map.position_angle = i;
        else if (name == "label") map.label = i;
        else if (name == "p_track") map.p_track = i;
        else if (name == "flag") map.flag = i;
        else if (name == "detect_angle") map.detect_angle = i;
        else parse_fail(path, 1, "unknown column '" + name + "'");
    }
    if (map.id < 0 || map.x < 0 || map.y < 0)
        parse_fail(path, 1, "header must contain id,x,y");
    return map;
}

}  // namespace

DetectedCatalog read_detected_catalog(const std::string& path, std::optional<Rect> bounds) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open catalog file: " + path);

    DetectedCatalog out;
    Catalog& catalog = out.catalog;

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header row");
    const ColumnMap cols = parse_header(line, path);
    const bool has_detections = cols.p_track >= 0 && cols.flag >= 0;
    DetectionResult det;

    std::unordered_set<std::int64_t> seen_ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != cols.count)
            parse_fail(path, line_no, "expected " + std::to_string(cols.count) + " fields, got " +
                                          std::to_string(fields.size()));
        auto field = [&](int idx) -> const std::string& { return fields[static_cast<std::size_t>(idx)]; };

        ObjectRecord rec;
        {
            const std::string& f = field(cols.id);
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), rec.id);
            if (ec != std::errc() || ptr != f.data() + f.size())
                parse_fail(path, line_no, "bad id '" + f + "'");
        }
        rec.x = parse_double(field(cols.x), path, line_no, "x");
        rec.y = parse_double(field(cols.y), path, line_no, "y");
        if (!std::isfinite(rec.x) || !std::isfinite(rec.y))
            parse_fail(path, line_no, "non-finite position");
        if (cols.semi_major >= 0 && !field(cols.semi_major).empty())
            rec.semi_major = parse_double(field(cols.semi_major), path, line_no, "semi_major");
        if (cols.semi_minor >= 0 && !field(cols.semi_minor).empty())
            rec.semi_minor = parse_double(field(cols.semi_minor), path, line_no, "semi_minor");
        if (rec.semi_major || rec.semi_minor) {
            const double a = rec.semi_major.value_or(0.0);
            const double b = rec.semi_minor.value_or(0.0);
            if (!(a >= b && b >= 0.0))
                parse_fail(path, line_no, "ellipse axes must satisfy semi_major >= semi_minor >= 0");
        }
        if (cols.position_angle >= 0 && !field(cols.position_angle).empty()) {
            const double pa = parse_double(field(cols.position_angle), path, line_no, "position_angle");
            if (!(pa >= 0.0 && pa < 180.0))
                parse_fail(path, line_no, "position_angle must lie in [0, 180)");
            rec.position_angle = pa;
        }
        if (cols.label >= 0 && !field(cols.label).empty()) {
            try {
                rec.true_label = label_from_string(field(cols.label));
            } catch (const std::exception& e) {
                parse_fail(path, line_no, e.what());
            }
        }
        if (!seen_ids.insert(rec.id).second)
            parse_fail(path, line_no, "duplicate record id " + std::to_string(rec.id));
        if (bounds && !bounds->contains(rec.x, rec.y))
            parse_fail(path, line_no, "record lies outside the explicit bounds");

        if (has_detections) {
            det.p_track.push_back(parse_double(field(cols.p_track), path, line_no, "p_track"));
            det.flag.push_back(field(cols.flag) == "1" ? 1 : 0);
            if (cols.detect_angle >= 0 && !field(cols.detect_angle).empty())
                det.detect_angle_deg.push_back(
                    parse_double(field(cols.detect_angle), path, line_no, "detect_angle"));
            else
                det.detect_angle_deg.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        catalog.records.push_back(std::move(rec));
    }

    if (bounds) {
        catalog.bounds = *bounds;
    } else {
        if (catalog.records.empty())
            throw std::runtime_error(path + ": empty catalog requires explicit bounds");
        Rect box{catalog.records[0].x, catalog.records[0].x, catalog.records[0].y,
                 catalog.records[0].y};
        for (const auto& r : catalog.records) {
            box.x_min = std::min(box.x_min, r.x);
            box.x_max = std::max(box.x_max, r.x);
            box.y_min = std::min(box.y_min, r.y);
            box.y_max = std::max(box.y_max, r.y);
        }
        catalog.bounds = Rect{box.x_min - 1.0, box.x_max + 1.0, box.y_min - 1.0, box.y_max + 1.0};
    }
    if (has_detections) out.detections = std::move(det);
    return out;
}

Catalog read_catalog(const std::string& path, std::optional<Rect> bounds) {
    return read_detected_catalog(path, bounds).catalog;
}

void write_catalog(const Catalog& catalog, const std::string& path,
                   const DetectionResult* detections) {
    if (detections && detections->size() != catalog.records.size())
        throw std::invalid_argument("detections must be indexed identically to records");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);

    out << "id,x,y,semi_major,semi_minor,position_angle,label";
    if (detections) out << ",p_track,flag,detect_angle";
    out << "\n";

    char buf[64];
    auto put_fixed = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        out << buf;
    };
    for (std::size_t i = 0; i < catalog.records.size(); ++i) {
        const ObjectRecord& r = catalog.records[i];
        out << r.id << ',';
        put_fixed(r.x);
        out << ',';
        put_fixed(r.y);
        out << ',';
        if (r.semi_major) put_fixed(*r.semi_major);
        out << ',';
        if (r.semi_minor) put_fixed(*r.semi_minor);
        out << ',';
        if (r.position_angle) put_fixed(*r.position_angle);
        out << ',';
        if (r.true_label) out << label_to_string(*r.true_label);
        if (detections) {
            out << ',';
            std::snprintf(buf, sizeof buf, "%.9f", detections->p_track[i]);
            out << buf << ',' << (detections->flag[i] ? '1' : '0') << ',';
            if (detections->flag[i] && detections->has_angle(i)) put_fixed(detections->detect_angle_deg[i]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace renewal
