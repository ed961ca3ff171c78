#include "hometwin/diagnostics/occupancy.hpp"

#include "hometwin/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace hometwin::diagnostics {

namespace {

/// Index of the last grid point at or before t, or npos before the series.
std::size_t index_at_or_before(const core::TimeSeries& s, core::Timestamp t) {
    if (s.empty() || t < s.start) {
        return core::TimeSeries::npos;
    }
    const auto i = static_cast<std::size_t>((t - s.start).count() / s.step_minutes);
    return std::min(i, s.size() - 1);
}

} // namespace

std::vector<OccupancyEvent> detect_occupancy(const core::TimeSeries& temperature, std::vector<DoorEvent> doors,
                                             const OccupancyOptions& options, const std::string& room) {
    if (!(options.rise_threshold_c > 0.0) || options.window_minutes <= 0) {
        throw Error(ErrorCode::invalid_argument, "occupancy thresholds must be positive");
    }
    std::vector<OccupancyEvent> out;
    if (temperature.empty()) {
        return out;
    }
    std::stable_sort(doors.begin(), doors.end(), [](const DoorEvent& a, const DoorEvent& b) { return a.time < b.time; });
    const double thr = options.rise_threshold_c;
    const core::Minutes window{options.window_minutes};
    const auto& v = temperature.values;
    core::Timestamp busy_until = temperature.start - core::Minutes{1};

    for (const auto& door : doors) {
        if (!door.open || door.time <= busy_until) {
            continue;
        }
        const std::size_t b = index_at_or_before(temperature, door.time);
        if (b == core::TimeSeries::npos) {
            continue;
        }
        const double baseline = v[b];
        std::size_t rise = core::TimeSeries::npos;
        for (std::size_t i = b + 1; i < v.size() && temperature.time_at(i) <= door.time + window; ++i) {
            if (v[i] - baseline >= thr) {
                rise = i;
                break;
            }
        }
        if (rise == core::TimeSeries::npos) {
            continue;
        }

        // natural end: back within half a threshold of the baseline
        std::size_t settle = v.size() - 1;
        for (std::size_t i = rise + 1; i < v.size(); ++i) {
            if (v[i] - baseline <= thr / 2.0) {
                settle = i;
                break;
            }
        }
        core::Timestamp end = temperature.time_at(settle);
        for (const auto& close : doors) {
            if (close.open || close.time <= temperature.time_at(rise) || close.time >= end) {
                continue;
            }
            const std::size_t c = index_at_or_before(temperature, close.time);
            const std::size_t later = index_at_or_before(temperature, close.time + window);
            if (later > c && v[c] - v[later] >= thr / 2.0) {
                end = close.time;
                break;
            }
        }

        double peak = 0.0;
        for (std::size_t i = b; i < v.size() && temperature.time_at(i) <= end; ++i) {
            peak = std::max(peak, v[i] - baseline);
        }
        out.push_back({room, door.time, end, peak, door.time});
        busy_until = end;
    }
    return out;
}

std::vector<DoorEvent> door_events_from_series(const core::TimeSeries& door) {
    std::vector<DoorEvent> out;
    bool state = false;
    for (std::size_t i = 0; i < door.size(); ++i) {
        const bool open = door.values[i] >= 0.5;
        if (i == 0 ? open : open != state) {
            out.push_back({door.time_at(i), open});
        }
        state = open;
    }
    return out;
}

double interval_overlap(core::Timestamp a_start, core::Timestamp a_end, core::Timestamp b_start, core::Timestamp b_end) {
    const auto inter = (std::min(a_end, b_end) - std::max(a_start, b_start)).count();
    const auto uni = (std::max(a_end, b_end) - std::min(a_start, b_start)).count();
    if (uni <= 0) {
        return a_start == b_start && a_end == b_end ? 1.0 : 0.0;
    }
    return std::max<double>(0.0, static_cast<double>(inter)) / static_cast<double>(uni);
}

} // namespace hometwin::diagnostics
