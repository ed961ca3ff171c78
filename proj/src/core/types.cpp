#include "hometwin/core/types.hpp"

#include "hometwin/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hometwin::core {

std::string_view to_string(Unit unit) {
    switch (unit) {
    case Unit::celsius: return "celsius";
    case Unit::percent_rh: return "percent-RH";
    case Unit::ppm: return "ppm";
    case Unit::boolean: return "boolean";
    case Unit::lux: return "lux";
    }
    return "celsius";
}

std::string_view to_string(SensorKind kind) {
    switch (kind) {
    case SensorKind::temperature: return "temperature";
    case SensorKind::humidity: return "humidity";
    case SensorKind::proximity: return "proximity";
    case SensorKind::water: return "water";
    case SensorKind::co2: return "co2";
    case SensorKind::noise: return "noise";
    case SensorKind::pressure: return "pressure";
    case SensorKind::light: return "light";
    }
    return "temperature";
}

std::optional<Unit> parse_unit(std::string_view text) {
    for (Unit u : {Unit::celsius, Unit::percent_rh, Unit::ppm, Unit::boolean, Unit::lux}) {
        if (to_string(u) == text) {
            return u;
        }
    }
    return std::nullopt;
}

std::optional<SensorKind> parse_sensor_kind(std::string_view text) {
    for (SensorKind k : {SensorKind::temperature, SensorKind::humidity, SensorKind::proximity, SensorKind::water,
                         SensorKind::co2, SensorKind::noise, SensorKind::pressure, SensorKind::light}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    return std::nullopt;
}

Unit default_unit(SensorKind kind) {
    switch (kind) {
    case SensorKind::humidity: return Unit::percent_rh;
    case SensorKind::co2: return Unit::ppm;
    case SensorKind::proximity:
    case SensorKind::water: return Unit::boolean;
    case SensorKind::light: return Unit::lux;
    default: return Unit::celsius;
    }
}

Bounds2 bounding_box(const std::vector<Vec2>& polygon) {
    if (polygon.empty()) {
        return {};
    }
    Bounds2 b{polygon.front().x, polygon.front().y, polygon.front().x, polygon.front().y};
    for (const Vec2& p : polygon) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

void HouseModel::validate() const {
    if (!(latitude >= -90.0 && latitude <= 90.0)) {
        throw Error(ErrorCode::invalid_argument, "latitude must lie in [-90, 90]");
    }
    if (!(longitude >= -180.0 && longitude <= 180.0)) {
        throw Error(ErrorCode::invalid_argument, "longitude must lie in [-180, 180]");
    }
    if (!(orientation_deg >= 0.0 && orientation_deg < 360.0)) {
        throw Error(ErrorCode::invalid_argument, "orientation_deg must lie in [0, 360)");
    }
    std::set<std::string_view> ids;
    for (const SensorDescriptor& s : sensors) {
        if (s.id.empty()) {
            throw Error(ErrorCode::invalid_argument, "sensor id must not be empty");
        }
        if (!ids.insert(s.id).second) {
            throw Error(ErrorCode::invalid_argument, "duplicate sensor id '" + s.id + "'");
        }
        if (!std::isfinite(s.position.x) || !std::isfinite(s.position.y) || !std::isfinite(s.position.z)) {
            throw Error(ErrorCode::invalid_argument, "sensor '" + s.id + "' has a non-finite position");
        }
    }
}

const SensorDescriptor* HouseModel::find_sensor(std::string_view id) const {
    auto it = std::find_if(sensors.begin(), sensors.end(), [&](const SensorDescriptor& s) { return s.id == id; });
    return it == sensors.end() ? nullptr : &*it;
}

const Room* HouseModel::find_room(std::string_view name) const {
    auto it = std::find_if(rooms.begin(), rooms.end(), [&](const Room& r) { return r.name == name; });
    return it == rooms.end() ? nullptr : &*it;
}

} // namespace hometwin::core
