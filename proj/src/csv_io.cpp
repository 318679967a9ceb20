#include "rec/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rec/core_types.hpp"

namespace rec {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

const std::vector<double>& HourlySeries::column(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    throw InputError("series has no column " + std::string(name));
}

HourlySeries parse_hourly_csv(std::string_view text, const std::vector<std::string>& columns) {
    HourlySeries out;
    out.names = columns;
    out.columns.assign(columns.size(), {});

    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;

        const auto fields = split_commas(line);
        if (!header_seen) {
            if (fields.size() != columns.size() + 1 || fields[0] != "timestamp")
                throw InputError("line 1: header must be timestamp," + [&] {
                    std::string h;
                    for (std::size_t i = 0; i < columns.size(); ++i)
                        h += (i ? "," : "") + columns[i];
                    return h;
                }());
            for (std::size_t i = 0; i < columns.size(); ++i)
                if (fields[i + 1] != columns[i])
                    throw InputError("line 1: expected column " + columns[i] + ", found " +
                                     std::string(fields[i + 1]));
            header_seen = true;
            continue;
        }
        if (fields.size() != columns.size() + 1)
            throw InputError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(columns.size() + 1) + " fields, found " +
                             std::to_string(fields.size()));
        out.timestamps.emplace_back(fields[0]);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const std::string_view f = fields[i + 1];
            double v = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size())
                throw InputError("line " + std::to_string(line_no) + ": cannot parse '" +
                                 std::string(f) + "' as a number");
            if (!std::isfinite(v) || v < 0.0)
                throw InputError("line " + std::to_string(line_no) + ": invalid value " +
                                 std::string(f) + " in " + columns[i]);
            out.columns[i].push_back(v);
        }
    }
    if (!header_seen) throw InputError("csv: missing header row");
    return out;
}

HourlySeries read_hourly_csv(const std::string& path, const std::vector<std::string>& columns) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_hourly_csv(ss.str(), columns);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string format_double(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_hourly_csv(const HourlySeries& series) {
    std::string out = "timestamp";
    for (const auto& n : series.names) out += "," + n;
    out += "\n";
    for (std::size_t r = 0; r < series.rows(); ++r) {
        out += series.timestamps[r];
        for (const auto& col : series.columns) out += "," + format_double(col[r]);
        out += "\n";
    }
    return out;
}

}  // namespace rec
