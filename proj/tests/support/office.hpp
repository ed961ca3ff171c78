#pragma once

#include "hometwin/core/series.hpp"
#include "hometwin/diagnostics/occupancy.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace office {

struct Episode {
    int enter_minute; // minute of day the door opens
    int leave_minute;
};

struct Day {
    hometwin::core::TimeSeries temperature;
    std::vector<hometwin::diagnostics::DoorEvent> doors;
};

/// Desk sensor on 2022-01-21: baseline 20 C, +1.5 C linear ramp over the 30 minutes
/// after entering, plateau, exponential decay (20 min) after leaving. The door opens
/// and closes a minute apart on entering and leaving.
inline Day day(const std::vector<Episode>& episodes, std::uint64_t seed = 7, double noise = 0.02) {
    using namespace hometwin::core;
    Day d;
    d.temperature.sensor_id = "2OfficeDesk";
    d.temperature.start = Timestamp::from_civil({2022, 1, 21});
    d.temperature.step_minutes = 5;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, noise);
    for (int m = 0; m < 1440; m += 5) {
        double delta = 0.0;
        for (const auto& e : episodes) {
            if (m < e.enter_minute) continue;
            const double ramp = 1.5 * std::min(1.0, (m - e.enter_minute) / 30.0);
            if (m <= e.leave_minute) {
                delta += ramp;
            } else {
                const double at_leave = 1.5 * std::min(1.0, (e.leave_minute - e.enter_minute) / 30.0);
                delta += at_leave * std::exp(-(m - e.leave_minute) / 20.0);
            }
        }
        d.temperature.values.push_back(20.0 + delta + n(rng));
    }
    const Timestamp day0 = d.temperature.start;
    for (const auto& e : episodes) {
        d.doors.push_back({day0 + Minutes{e.enter_minute}, true});
        d.doors.push_back({day0 + Minutes{e.enter_minute + 1}, false});
        d.doors.push_back({day0 + Minutes{e.leave_minute}, true});
        d.doors.push_back({day0 + Minutes{e.leave_minute + 1}, false});
    }
    return d;
}

} // namespace office
