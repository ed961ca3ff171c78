#pragma once

#include "hometwin/core/types.hpp"
#include "hometwin/diagnostics/color.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hometwin::diagnostics {

/// (alpha / 2) times the Euclidean distance between p and q.
double weighted_distance(core::Vec2 p, core::Vec2 q, double alpha);

struct HeatMapConfig {
    double resolution = 10.0; // cells per meter
    double alpha = 4.0;       // reach is alpha / 2 meters

    double reach() const { return alpha / 2.0; }
    /// Throws Error(invalid_argument) unless alpha > 0 and resolution >= 1.
    void validate() const;
};

struct HeatSensor {
    std::string id;
    core::Vec2 position;
    double temperature = 0.0;
};

struct HeatMapFrame {
    std::string room;
    core::Bounds2 bounds;
    double resolution = 10.0;
    double alpha = 4.0;
    int width = 0;
    int height = 0;
    double min_temp = 0.0;
    double max_temp = 0.0;
    std::vector<std::optional<double>> cells; // row-major, row 0 at min_y

    core::Vec2 cell_center(int ix, int iy) const;
    const std::optional<double>& at(int ix, int iy) const {
        return cells[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(ix)];
    }
    /// Color on the frame's own [min_temp, max_temp] axis; midpoint green when the interval is empty.
    std::optional<Rgb> color_at(int ix, int iy) const;
    Rgb color_of(double temperature) const;
};

/// A cell is covered when its center lies within reach of a sensor; covered
/// cells take the inverse-square-distance average of the sensors in reach. The
/// cell holding a sensor takes that sensor's reading.
/// Throws Error(no_data) without sensors.
HeatMapFrame render_heatmap(const std::vector<HeatSensor>& sensors, const core::Bounds2& bounds,
                            const HeatMapConfig& config, std::string room = {});

/// Header fields plus `rows`: one lowercase hex RGBA string per row, alpha 0 for empty cells.
std::string heatmap_json(const HeatMapFrame& frame);
/// `x,y,temperature` per cell center; empty temperature for uncovered cells.
std::string heatmap_csv(const HeatMapFrame& frame);

} // namespace hometwin::diagnostics
