#pragma once

#include "hometwin/core/time.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hometwin::core {

enum class Unit { celsius, percent_rh, ppm, boolean, lux };

enum class SensorKind { temperature, humidity, proximity, water, co2, noise, pressure, light };

std::string_view to_string(Unit unit);
std::string_view to_string(SensorKind kind);
std::optional<Unit> parse_unit(std::string_view text);
std::optional<SensorKind> parse_sensor_kind(std::string_view text);
Unit default_unit(SensorKind kind);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct SensorDescriptor {
    std::string id;
    SensorKind kind = SensorKind::temperature;
    std::string room;
    Vec3 position;
    int floor = 0;
};

struct Room {
    std::string name;
    int floor = 0;
    std::vector<Vec2> polygon;
};

struct Bounds2 {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;
};

Bounds2 bounding_box(const std::vector<Vec2>& polygon);

struct HouseModel {
    double latitude = 63.4305;
    double longitude = 10.3951;
    double altitude_m = 211.0;
    double orientation_deg = 203.0;
    std::vector<SensorDescriptor> sensors;
    std::vector<Room> rooms;

    /// Throws Error(invalid_argument) on range violations or duplicate sensor ids.
    void validate() const;
    const SensorDescriptor* find_sensor(std::string_view id) const;
    const Room* find_room(std::string_view name) const;
};

/// One resampled-or-raw reading of a single channel.
struct Sample {
    Timestamp time;
    double value = 0.0;

    auto operator<=>(const Sample&) const = default;
};

/// Reading as it arrives from a source; `value` is empty for a reported gap.
struct Observation {
    std::string sensor_id;
    Timestamp time;
    std::optional<double> value;

    bool operator==(const Observation&) const = default;
};

} // namespace hometwin::core
