#pragma once

#include <array>
#include <string>
#include <string_view>

namespace hometwin::service {

enum class CapabilityLevel { standalone, descriptive, diagnostic, predictive, prescriptive };

inline constexpr std::array<CapabilityLevel, 5> kCapabilityLevels = {
    CapabilityLevel::standalone, CapabilityLevel::descriptive, CapabilityLevel::diagnostic,
    CapabilityLevel::predictive, CapabilityLevel::prescriptive};

std::string_view to_string(CapabilityLevel level);

/// What the running twin has, gathered from its config and store.
struct CapabilityInputs {
    bool house_valid = false;
    std::size_t sources = 0;             // live or replayed
    std::size_t mapped_temperature = 0;  // temperature sensors placed in a room
    double history_days = 0.0;           // longest temperature history in the store
    int min_history_days = 4;
    std::size_t behavior_events = 0;     // lit days of the recommender's user
};

struct LevelStatus {
    CapabilityLevel level = CapabilityLevel::standalone;
    bool available = false;
    std::string reason;
};

/// A level is available only when its own condition holds and every lower level is available.
struct CapabilityReport {
    std::array<LevelStatus, 5> levels;

    const LevelStatus& at(CapabilityLevel level) const { return levels[static_cast<std::size_t>(level)]; }
    /// Highest available level, or nothing when even standalone is missing.
    const LevelStatus* highest() const;
};

CapabilityReport assess_capability(const CapabilityInputs& inputs);

} // namespace hometwin::service
