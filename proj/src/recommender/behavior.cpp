#include "hometwin/recommender/behavior.hpp"

#include "hometwin/core/csv.hpp"
#include "hometwin/core/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace hometwin::recommender {

std::optional<int> extract_lit_step(std::span<const double> fireplace_day, double threshold_c) {
    if (fireplace_day.size() != kStepsPerDay) {
        throw Error(ErrorCode::invalid_argument,
                    "fireplace day needs 288 values, got " + std::to_string(fireplace_day.size()));
    }
    int best = -1;
    double best_rise = -INFINITY;
    for (std::size_t i = 1; i < fireplace_day.size(); ++i) {
        const double rise = fireplace_day[i] - fireplace_day[i - 1];
        if (rise > best_rise) {
            best_rise = rise;
            best = static_cast<int>(i);
        }
    }
    if (!(best_rise > threshold_c)) {
        return std::nullopt;
    }
    return best;
}

void BehaviorMatrix::validate() const {
    if (cells.size() != users.size()) {
        throw Error(ErrorCode::invalid_argument, "behavior matrix has a row count different from its users");
    }
    if (std::set<std::string>(users.begin(), users.end()).size() != users.size()) {
        throw Error(ErrorCode::invalid_argument, "behavior matrix has duplicate users");
    }
    if (std::set<int>(days.begin(), days.end()).size() != days.size()) {
        throw Error(ErrorCode::invalid_argument, "behavior matrix has duplicate days");
    }
    for (std::size_t u = 0; u < users.size(); ++u) {
        if (cells[u].size() != days.size()) {
            throw Error(ErrorCode::invalid_argument, "user '" + users[u] + "' does not cover every day");
        }
        for (std::size_t d = 0; d < days.size(); ++d) {
            const ScenarioDay& c = cells[u][d];
            const std::string where = "user '" + users[u] + "' day " + std::to_string(days[d]);
            if (c.day != days[d]) {
                throw Error(ErrorCode::invalid_argument, where + ": cell out of order");
            }
            if (c.outdoor_temps.size() != kStepsPerDay) {
                throw Error(ErrorCode::invalid_argument, where + ": needs 288 outdoor temperatures");
            }
            for (double t : c.outdoor_temps) {
                if (!std::isfinite(t)) {
                    throw Error(ErrorCode::invalid_argument, where + ": non-finite outdoor temperature");
                }
            }
            if (c.lit_step && (*c.lit_step < 0 || *c.lit_step >= static_cast<int>(kStepsPerDay))) {
                throw Error(ErrorCode::invalid_argument, where + ": lit step outside [0, 287]");
            }
        }
    }
}

std::size_t BehaviorMatrix::user_index(const std::string& user) const {
    auto it = std::find(users.begin(), users.end(), user);
    if (it == users.end()) {
        throw Error(ErrorCode::not_found, "unknown user '" + user + "'");
    }
    return static_cast<std::size_t>(it - users.begin());
}

const ScenarioDay* BehaviorMatrix::find(const std::string& user, int day) const {
    auto u = std::find(users.begin(), users.end(), user);
    auto d = std::find(days.begin(), days.end(), day);
    if (u == users.end() || d == days.end()) {
        return nullptr;
    }
    return &cells[static_cast<std::size_t>(u - users.begin())][static_cast<std::size_t>(d - days.begin())];
}

BehaviorMatrix BehaviorMatrix::without_day(int day) const {
    BehaviorMatrix out;
    out.users = users;
    out.cells.resize(users.size());
    for (std::size_t d = 0; d < days.size(); ++d) {
        if (days[d] == day) {
            continue;
        }
        out.days.push_back(days[d]);
        for (std::size_t u = 0; u < users.size(); ++u) {
            out.cells[u].push_back(cells[u][d]);
        }
    }
    return out;
}

BehaviorMatrix BehaviorMatrix::only_users(const std::vector<std::string>& keep) const {
    BehaviorMatrix out;
    out.days = days;
    for (const auto& k : keep) {
        out.users.push_back(k);
        out.cells.push_back(cells[user_index(k)]);
    }
    return out;
}

std::size_t BehaviorMatrix::event_count(const std::string& user) const {
    const auto& row = cells[user_index(user)];
    return static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [](const ScenarioDay& c) { return c.lit_step.has_value(); }));
}

namespace {

double parse_number(std::string_view field, std::string_view origin, std::size_t line) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw Error(ErrorCode::invalid_argument,
                    std::string(origin) + ":" + std::to_string(line) + ": bad number '" + std::string(field) + "'");
    }
    return v;
}

int parse_int(std::string_view field, std::string_view origin, std::size_t line) {
    int v = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::invalid_argument,
                    std::string(origin) + ":" + std::to_string(line) + ": bad integer '" + std::string(field) + "'");
    }
    return v;
}

std::string trim_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') {
        s.pop_back();
    }
    return s;
}

} // namespace

BehaviorMatrix read_behavior_csv(std::istream& in, std::string_view origin) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorCode::invalid_argument, std::string(origin) + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::no_data, std::string(origin) + ": empty behavior file");
    }
    ++line_no;
    const auto header = core::split_csv_line(trim_cr(line));
    if (header.size() != kStepsPerDay + 3 || header[0] != "user" || header[1] != "day" || header[2] != "step0" ||
        header.back() != "lit_step") {
        fail("expected header user,day,step0..step287,lit_step");
    }

    std::map<std::string, std::map<int, ScenarioDay>> rows;
    std::vector<std::string> user_order;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = core::split_csv_line(line);
        if (f.size() != kStepsPerDay + 3) {
            fail("expected " + std::to_string(kStepsPerDay + 3) + " fields, got " + std::to_string(f.size()));
        }
        ScenarioDay c;
        c.day = parse_int(f[1], origin, line_no);
        c.outdoor_temps.reserve(kStepsPerDay);
        for (std::size_t k = 0; k < kStepsPerDay; ++k) {
            c.outdoor_temps.push_back(parse_number(f[2 + k], origin, line_no));
        }
        if (!f.back().empty()) {
            c.lit_step = parse_int(f.back(), origin, line_no);
            if (*c.lit_step < 0 || *c.lit_step >= static_cast<int>(kStepsPerDay)) {
                fail("lit_step outside [0, 287]");
            }
        }
        if (f[0].empty()) {
            fail("empty user");
        }
        if (!rows.count(f[0])) {
            user_order.push_back(f[0]);
        }
        if (!rows[f[0]].emplace(c.day, std::move(c)).second) {
            fail("duplicate row for user '" + f[0] + "' day " + f[1]);
        }
    }
    if (rows.empty()) {
        throw Error(ErrorCode::no_data, std::string(origin) + ": behavior file has no rows");
    }
    BehaviorMatrix m;
    for (const auto& [day, c] : rows.at(user_order.front())) {
        m.days.push_back(day);
    }
    for (const auto& u : user_order) {
        const auto& r = rows.at(u);
        if (r.size() != m.days.size()) {
            throw Error(ErrorCode::invalid_argument,
                        std::string(origin) + ": user '" + u + "' does not share the day axis of the first user");
        }
        m.users.push_back(u);
        auto& row = m.cells.emplace_back();
        for (int day : m.days) {
            auto it = r.find(day);
            if (it == r.end()) {
                throw Error(ErrorCode::invalid_argument,
                            std::string(origin) + ": user '" + u + "' lacks day " + std::to_string(day));
            }
            row.push_back(it->second);
        }
    }
    m.validate();
    return m;
}

BehaviorMatrix load_behavior_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::not_found, "cannot open behavior file " + path.string());
    }
    return read_behavior_csv(in, path.string());
}

void write_behavior_csv(std::ostream& out, const BehaviorMatrix& matrix) {
    matrix.validate();
    out << "user,day";
    for (std::size_t k = 0; k < kStepsPerDay; ++k) {
        out << ",step" << k;
    }
    out << ",lit_step\n";
    for (std::size_t u = 0; u < matrix.users.size(); ++u) {
        for (const auto& c : matrix.cells[u]) {
            out << matrix.users[u] << ',' << c.day;
            for (double t : c.outdoor_temps) {
                out << ',' << core::format_double(t);
            }
            out << ',';
            if (c.lit_step) {
                out << *c.lit_step;
            }
            out << '\n';
        }
    }
}

std::vector<double> read_scenario(std::istream& in, std::string_view origin) {
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    bool observation_format = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_cr(line);
        if (line.empty()) {
            continue;
        }
        if (line_no == 1 && line == core::kObservationCsvHeader) {
            observation_format = true;
            continue;
        }
        if (line_no == 1 && (line == "value" || line == "temperature")) {
            continue;
        }
        if (observation_format) {
            const auto f = core::split_csv_line(line);
            if (f.size() < 3 || f[2].empty()) {
                throw Error(ErrorCode::invalid_argument,
                            std::string(origin) + ":" + std::to_string(line_no) + ": scenario rows need a value");
            }
            out.push_back(parse_number(f[2], origin, line_no));
        } else {
            out.push_back(parse_number(line, origin, line_no));
        }
    }
    if (out.size() != kStepsPerDay) {
        throw Error(ErrorCode::invalid_argument,
                    std::string(origin) + ": scenario needs 288 values, got " + std::to_string(out.size()));
    }
    return out;
}

} // namespace hometwin::recommender
