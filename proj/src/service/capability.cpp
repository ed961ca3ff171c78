#include "hometwin/service/capability.hpp"

#include <cstdio>

namespace hometwin::service {

std::string_view to_string(CapabilityLevel level) {
    switch (level) {
    case CapabilityLevel::standalone:
        return "standalone";
    case CapabilityLevel::descriptive:
        return "descriptive";
    case CapabilityLevel::diagnostic:
        return "diagnostic";
    case CapabilityLevel::predictive:
        return "predictive";
    case CapabilityLevel::prescriptive:
        return "prescriptive";
    }
    return "?";
}

const LevelStatus* CapabilityReport::highest() const {
    const LevelStatus* best = nullptr;
    for (const auto& l : levels) {
        if (l.available) {
            best = &l;
        }
    }
    return best;
}

CapabilityReport assess_capability(const CapabilityInputs& in) {
    struct Own {
        bool ok;
        std::string yes;
        std::string no;
    };
    char days[64];
    std::snprintf(days, sizeof days, "%.2f days of temperature history, %d needed", in.history_days, in.min_history_days);
    const Own own[] = {
        {in.house_valid, "house model loaded", "no valid house model"},
        {in.sources > 0, std::to_string(in.sources) + " source(s) configured", "no live or replayed source"},
        {in.mapped_temperature > 0, std::to_string(in.mapped_temperature) + " temperature sensor(s) placed in rooms",
         "no temperature sensor placed in a room"},
        {in.history_days >= in.min_history_days, days, days},
        {in.behavior_events > 0, std::to_string(in.behavior_events) + " lighting event(s) in the behavior matrix",
         "no behavioral data for the recommender user"},
    };
    CapabilityReport r;
    bool below = true;
    for (std::size_t i = 0; i < kCapabilityLevels.size(); ++i) {
        auto& l = r.levels[i];
        l.level = kCapabilityLevels[i];
        if (!below) {
            l.available = false;
            l.reason = "requires " + std::string(to_string(kCapabilityLevels[i - 1]));
            continue;
        }
        l.available = own[i].ok;
        l.reason = own[i].ok ? own[i].yes : own[i].no;
        below = l.available;
    }
    return r;
}

} // namespace hometwin::service
