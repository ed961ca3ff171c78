#include "hometwin/diagnostics/heatmap.hpp"

#include "hometwin/core/csv.hpp"
#include "hometwin/core/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hometwin::diagnostics {

double weighted_distance(core::Vec2 p, core::Vec2 q, double alpha) {
    return alpha / 2.0 * std::hypot(q.x - p.x, q.y - p.y);
}

void HeatMapConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorCode::invalid_argument, "heat map alpha must be > 0");
    }
    if (!(resolution >= 1.0) || !std::isfinite(resolution)) {
        throw Error(ErrorCode::invalid_argument, "heat map resolution must be >= 1 cell per meter");
    }
}

core::Vec2 HeatMapFrame::cell_center(int ix, int iy) const {
    return {bounds.min_x + (ix + 0.5) / resolution, bounds.min_y + (iy + 0.5) / resolution};
}

Rgb HeatMapFrame::color_of(double temperature) const {
    if (!(min_temp < max_temp)) {
        return hsv_to_rgb(120.0);
    }
    return temp_to_color(temperature, min_temp, max_temp);
}

std::optional<Rgb> HeatMapFrame::color_at(int ix, int iy) const {
    const auto& v = at(ix, iy);
    if (!v) {
        return std::nullopt;
    }
    return color_of(*v);
}

HeatMapFrame render_heatmap(const std::vector<HeatSensor>& sensors, const core::Bounds2& bounds,
                            const HeatMapConfig& config, std::string room) {
    config.validate();
    if (sensors.empty()) {
        throw Error(ErrorCode::no_data, "no data: heat map needs at least one sensor reading");
    }
    if (!(bounds.max_x > bounds.min_x) || !(bounds.max_y > bounds.min_y)) {
        throw Error(ErrorCode::invalid_argument, "heat map bounds are empty");
    }
    HeatMapFrame f;
    f.room = std::move(room);
    f.bounds = bounds;
    f.resolution = config.resolution;
    f.alpha = config.alpha;
    f.width = std::max(1, static_cast<int>(std::ceil((bounds.max_x - bounds.min_x) * config.resolution - 1e-9)));
    f.height = std::max(1, static_cast<int>(std::ceil((bounds.max_y - bounds.min_y) * config.resolution - 1e-9)));
    f.min_temp = std::numeric_limits<double>::infinity();
    f.max_temp = -std::numeric_limits<double>::infinity();
    for (const auto& s : sensors) {
        if (!std::isfinite(s.temperature) || !std::isfinite(s.position.x) || !std::isfinite(s.position.y)) {
            throw Error(ErrorCode::invalid_argument, "heat map sensor '" + s.id + "' has a non-finite value");
        }
        f.min_temp = std::min(f.min_temp, s.temperature);
        f.max_temp = std::max(f.max_temp, s.temperature);
    }
    f.cells.assign(static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height), std::nullopt);

    const double reach = config.reach();
    for (int iy = 0; iy < f.height; ++iy) {
        for (int ix = 0; ix < f.width; ++ix) {
            const core::Vec2 c = f.cell_center(ix, iy);
            // weighted deviations from the first sensor in reach keep uniform fields exact
            const HeatSensor* ref = nullptr;
            double num = 0.0, den = 0.0;
            for (const auto& s : sensors) {
                const double d = std::hypot(s.position.x - c.x, s.position.y - c.y);
                if (d <= reach) {
                    ref = ref ? ref : &s;
                    const double w = 1.0 / std::max(d * d, 1e-12);
                    num += w * (s.temperature - ref->temperature);
                    den += w;
                }
            }
            if (ref) {
                f.cells[static_cast<std::size_t>(iy) * static_cast<std::size_t>(f.width) + static_cast<std::size_t>(ix)] =
                    ref->temperature + num / den;
            }
        }
    }

    // cells holding sensors show the reading itself
    std::vector<std::pair<double, int>> own(f.cells.size(), {0.0, 0});
    for (const auto& s : sensors) {
        const int ix = static_cast<int>(std::floor((s.position.x - bounds.min_x) * config.resolution));
        const int iy = static_cast<int>(std::floor((s.position.y - bounds.min_y) * config.resolution));
        if (ix < 0 || iy < 0 || ix >= f.width || iy >= f.height) {
            continue;
        }
        const auto idx = static_cast<std::size_t>(iy) * static_cast<std::size_t>(f.width) + static_cast<std::size_t>(ix);
        if (!f.cells[idx]) {
            continue; // center out of reach, coverage rule wins
        }
        own[idx].first += s.temperature;
        ++own[idx].second;
    }
    for (std::size_t i = 0; i < own.size(); ++i) {
        if (own[i].second > 0) {
            f.cells[i] = own[i].first / own[i].second;
        }
    }
    return f;
}

std::string heatmap_json(const HeatMapFrame& frame) {
    static constexpr char kHex[] = "0123456789abcdef";
    nlohmann::json rows = nlohmann::json::array();
    for (int iy = 0; iy < frame.height; ++iy) {
        std::string row;
        row.reserve(static_cast<std::size_t>(frame.width) * 8);
        for (int ix = 0; ix < frame.width; ++ix) {
            const auto c = frame.color_at(ix, iy);
            const std::uint8_t bytes[4] = {c ? c->r : std::uint8_t{0}, c ? c->g : std::uint8_t{0},
                                           c ? c->b : std::uint8_t{0}, c ? std::uint8_t{255} : std::uint8_t{0}};
            for (std::uint8_t b : bytes) {
                row += kHex[b >> 4];
                row += kHex[b & 15];
            }
        }
        rows.push_back(std::move(row));
    }
    nlohmann::ordered_json doc;
    doc["room"] = frame.room;
    doc["bounds"] = {{"min_x", frame.bounds.min_x},
                     {"min_y", frame.bounds.min_y},
                     {"max_x", frame.bounds.max_x},
                     {"max_y", frame.bounds.max_y}};
    doc["resolution"] = frame.resolution;
    doc["alpha"] = frame.alpha;
    doc["width"] = frame.width;
    doc["height"] = frame.height;
    doc["min_temp"] = frame.min_temp;
    doc["max_temp"] = frame.max_temp;
    doc["encoding"] = "rgba-hex";
    doc["rows"] = std::move(rows);
    return doc.dump();
}

std::string heatmap_csv(const HeatMapFrame& frame) {
    std::string out = "x,y,temperature\n";
    for (int iy = 0; iy < frame.height; ++iy) {
        for (int ix = 0; ix < frame.width; ++ix) {
            const core::Vec2 c = frame.cell_center(ix, iy);
            out += core::format_double(c.x) + "," + core::format_double(c.y) + ",";
            if (const auto& v = frame.at(ix, iy)) {
                out += core::format_double(*v);
            }
            out += "\n";
        }
    }
    return out;
}

} // namespace hometwin::diagnostics
