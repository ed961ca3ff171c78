#pragma once

#include "hometwin/core/series.hpp"

#include <string>
#include <vector>

namespace hometwin::diagnostics {

struct DoorEvent {
    core::Timestamp time;
    bool open = true;
};

struct OccupancyOptions {
    double rise_threshold_c = 0.5;
    int window_minutes = 60;
};

struct OccupancyEvent {
    std::string room;
    core::Timestamp start;
    core::Timestamp end;
    double peak_delta_c = 0.0;
    core::Timestamp door_event;
};

/// An event starts at a door opening when the temperature climbs at least
/// rise_threshold_c above its value at the opening within window_minutes. It
/// ends at the first door closing whose following window shows a drop of at
/// least rise_threshold_c / 2, or when the temperature is back within
/// rise_threshold_c / 2 of the baseline, whichever comes first.
/// Throws Error(invalid_argument) for non-positive thresholds.
std::vector<OccupancyEvent> detect_occupancy(const core::TimeSeries& temperature, std::vector<DoorEvent> doors,
                                             const OccupancyOptions& options = {}, const std::string& room = {});

/// Door series (1 = open, 0 = closed) to transitions; the first sample counts
/// as a transition when it is open.
std::vector<DoorEvent> door_events_from_series(const core::TimeSeries& door);

/// |a ∩ b| / |a ∪ b| of two closed intervals, in minutes.
double interval_overlap(core::Timestamp a_start, core::Timestamp a_end, core::Timestamp b_start, core::Timestamp b_end);

} // namespace hometwin::diagnostics
