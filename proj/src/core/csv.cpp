#include "hometwin/core/csv.hpp"

#include "hometwin/core/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace hometwin::core {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void row_error(std::string_view origin, std::size_t line, const std::string& what) {
    throw Error(ErrorCode::invalid_argument,
                std::string(origin) + ":" + std::to_string(line) + ": " + what);
}

} // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::string format_double(double value) {
    char buf[32];
    // shortest representation that round-trips
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        std::snprintf(buf, sizeof buf, "%.17g", value);
        return buf;
    }
    return std::string(buf, ptr);
}

std::vector<Observation> read_observations_csv(std::istream& in, std::string_view origin) {
    std::vector<Observation> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (!header_seen) {
            if (view != kObservationCsvHeader) {
                row_error(origin, line_no, "expected header '" + std::string(kObservationCsvHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(view);
        if (fields.size() != 3) {
            row_error(origin, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
        }
        if (fields[0].empty()) {
            row_error(origin, line_no, "empty sensor_id");
        }
        Observation obs;
        obs.sensor_id = fields[0];
        try {
            obs.time = Timestamp::parse(fields[1]);
        } catch (const Error& e) {
            row_error(origin, line_no, e.what());
        }
        if (!fields[2].empty()) {
            double v = 0.0;
            const char* first = fields[2].data();
            const char* last = first + fields[2].size();
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
                row_error(origin, line_no, "malformed value '" + fields[2] + "'");
            }
            obs.value = v;
        }
        rows.push_back(std::move(obs));
    }
    if (!header_seen) {
        row_error(origin, line_no == 0 ? 1 : line_no, "missing header");
    }
    return rows;
}

std::vector<Observation> read_observations_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::not_found, "cannot read '" + path.string() + "'");
    }
    return read_observations_csv(in, path.string());
}

void write_observations_csv(std::ostream& out, std::span<const Observation> rows) {
    out << kObservationCsvHeader << '\n';
    for (const Observation& o : rows) {
        out << o.sensor_id << ',' << o.time.to_string() << ',';
        if (o.value) {
            out << format_double(*o.value);
        }
        out << '\n';
    }
}

void write_series_csv(std::ostream& out, const TimeSeries& series, std::string_view model) {
    out << kObservationCsvHeader;
    if (!model.empty()) {
        out << ",model";
    }
    out << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.sensor_id << ',' << series.time_at(i).to_string() << ',' << format_double(series.values[i]);
        if (!model.empty()) {
            out << ',' << model;
        }
        out << '\n';
    }
}

} // namespace hometwin::core
