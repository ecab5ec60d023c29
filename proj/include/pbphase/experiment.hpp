#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pbphase/common.hpp"

// Ingestion of experimental/theory overlay tables (digitized reference data)
// and the adjustment rule for two-measurement interferometer data.
//
// CSV dialect: comma separated, '.' decimal point, '#' starts a comment
// line, UTF-8, header line mandatory.

namespace pbphase {

struct ExperimentPoint {
    double n_bar = 0.0;
    double value = 0.0;
    std::optional<double> value_err;
    double n_bar_err = 0.0;  // defaults to sqrt(n_bar) when the file omits it
};

struct ExperimentTable {
    std::vector<ExperimentPoint> points;
    std::string label;
    std::vector<std::string> adjustments;  // applied transforms, append-only
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view tok, long line_no, const std::string& column) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ValidationError("line " + std::to_string(line_no) + ": non-numeric " +
                              column + " field '" + std::string(tok) + "'");
    return v;
}

}  // namespace detail

/// Load an overlay table.  Header must be
///   n_bar,value[,value_err[,n_bar_err]]
/// An optional comment of the form '# label: NAME' names the dataset;
/// otherwise the file stem is used.  Points are sorted by n_bar; missing
/// n_bar_err entries default to sqrt(n_bar).
inline ExperimentTable load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open overlay file: " + path.string());

    ExperimentTable table;
    table.label = path.stem().string();

    std::string line;
    long line_no = 0;
    bool header_seen = false;
    std::size_t header_fields = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = detail::trim(line);
        if (stripped.empty()) continue;
        if (stripped.front() == '#') {
            const std::string_view body = detail::trim(stripped.substr(1));
            constexpr std::string_view kLabelKey = "label:";
            if (body.substr(0, kLabelKey.size()) == kLabelKey)
                table.label = std::string(detail::trim(body.substr(kLabelKey.size())));
            continue;
        }

        const auto fields = detail::split_csv(stripped);
        if (!header_seen) {
            static const std::vector<std::string_view> kExpected = {
                "n_bar", "value", "value_err", "n_bar_err"};
            if (fields.size() < 2 || fields.size() > 4)
                throw ParseError("line " + std::to_string(line_no) +
                                 ": header must have 2-4 columns, got " +
                                 std::to_string(fields.size()));
            for (std::size_t i = 0; i < fields.size(); ++i)
                if (fields[i] != kExpected[i])
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": expected header column '" + std::string(kExpected[i]) +
                                     "', got '" + std::string(fields[i]) + "'");
            header_fields = fields.size();
            header_seen = true;
            continue;
        }

        if (fields.size() != header_fields)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header_fields) + " fields, got " +
                             std::to_string(fields.size()));
        ExperimentPoint p;
        p.n_bar = detail::parse_double(fields[0], line_no, "n_bar");
        p.value = detail::parse_double(fields[1], line_no, "value");
        if (header_fields >= 3 && !fields[2].empty())
            p.value_err = detail::parse_double(fields[2], line_no, "value_err");
        if (header_fields >= 4 && !fields[3].empty())
            p.n_bar_err = detail::parse_double(fields[3], line_no, "n_bar_err");
        else
            p.n_bar_err = std::sqrt(std::fabs(p.n_bar));

        if (!(p.n_bar > 0.0))
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": n_bar must be strictly positive, got " +
                                  std::to_string(p.n_bar));
        if (!std::isfinite(p.value))
            throw ValidationError("line " + std::to_string(line_no) + ": non-finite value");
        table.points.push_back(p);
    }
    if (!header_seen)
        throw ParseError(path.string() + ": missing mandatory header line");

    std::stable_sort(table.points.begin(), table.points.end(),
                     [](const ExperimentPoint& a, const ExperimentPoint& b) {
                         return a.n_bar < b.n_bar;
                     });
    return table;
}

inline constexpr const char* kGblAdjustment = "gbl-two-measurement";

/// Adjust two-measurement interferometer data to single-difference form:
/// values divided by 2 and quoted uncertainties by sqrt(2).  Returns a new
/// table; applying it twice is an error.
inline ExperimentTable gbl_adjust(const ExperimentTable& table) {
    for (const auto& a : table.adjustments)
        if (a == kGblAdjustment)
            throw ValidationError("gbl_adjust: adjustment already applied to '" +
                                  table.label + "'");
    ExperimentTable out = table;
    for (auto& p : out.points) {
        p.value /= 2.0;
        if (p.value_err) *p.value_err /= std::sqrt(2.0);
    }
    out.adjustments.push_back(kGblAdjustment);
    return out;
}

}  // namespace pbphase
