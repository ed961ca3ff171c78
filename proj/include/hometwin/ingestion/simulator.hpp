#pragma once

#include "hometwin/core/series.hpp"
#include "hometwin/core/types.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hometwin::ingestion {

inline constexpr const char* kFireplaceSensor = "2Fireplace";
inline constexpr const char* kOutdoorSensor = "Outdoor";

/// Second-floor sensors that are predicted from the fireplace series.
inline constexpr std::array<const char*, 8> kCoupledTargets = {
    "2BalconyEntrance", "2Cooking", "2LivingRoomCenter", "2LivingRoomCenterHumidity",
    "2LivingRoomHumidifier", "2LRWindow", "2OfficeDesk", "2Stair"};

struct SimulatorConfig {
    std::uint64_t seed = 42;
    core::Timestamp start = core::Timestamp::from_civil({2022, 1, 1});
    int days = 90;
    int step_minutes = 5;

    double indoor_mean_c = 21.0;
    double indoor_amplitude_c = 1.5;
    double outdoor_mean_c = -2.0;
    double outdoor_amplitude_c = 4.0;
    double noise_c = 0.05;

    /// Lighting events: a fast rise then exponential decay on the fireplace sensor.
    double fire_probability_per_day = 0.5;
    double fire_peak_c = 6.0;
    double fire_rise_minutes = 15.0;
    double fire_decay_minutes = 180.0;

    /// Report only when a value moves by at least this much, or when the
    /// heartbeat elapses. Zero threshold reports every step. The final step is always reported.
    double significant_change = 0.0;
    int heartbeat_minutes = 15;
};

/// Per-target affine coupling: target[t] = gain * fireplace[t - lag_steps] + offset.
struct Coupling {
    double gain = 1.0;
    double offset = 0.0;
    int lag_steps = 0;
};

std::map<std::string, Coupling> default_couplings();

struct SimulatedData {
    std::map<std::string, core::TimeSeries> series; // full-grid truth per sensor
    std::vector<core::Timestamp> fire_starts;
};

/// Deterministic for a given config: fireplace, outdoor and the eight coupled targets.
SimulatedData simulate(const SimulatorConfig& config);

/// Reported observations after the significant-change and heartbeat filter, sorted by time.
std::vector<core::Observation> simulate_observations(const SimulatorConfig& config);
std::vector<core::Observation> to_observations(const SimulatedData& data, const SimulatorConfig& config);

} // namespace hometwin::ingestion
