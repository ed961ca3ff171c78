#include "hometwin/diagnostics/color.hpp"

#include "hometwin/core/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hometwin::diagnostics {

namespace {

std::uint8_t to_byte(double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); }

} // namespace

Rgb hsv_to_rgb(double hue_deg, double saturation, double value) {
    double h = std::fmod(hue_deg, 360.0);
    if (h < 0.0) {
        h += 360.0;
    }
    const double c = value * saturation;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0.0, g = 0.0, b = 0.0;
    switch (static_cast<int>(hp)) {
    case 0:
        r = c, g = x;
        break;
    case 1:
        r = x, g = c;
        break;
    case 2:
        g = c, b = x;
        break;
    case 3:
        g = x, b = c;
        break;
    case 4:
        r = x, b = c;
        break;
    default:
        r = c, b = x;
        break;
    }
    const double m = value - c;
    return {to_byte(r + m), to_byte(g + m), to_byte(b + m)};
}

double temp_to_hue(double t_celsius, double lo, double hi) {
    if (!std::isfinite(t_celsius) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::invalid_argument, "temperature color needs finite inputs");
    }
    if (!(lo < hi)) {
        throw Error(ErrorCode::invalid_argument, "temperature color interval needs lo < hi");
    }
    const double f = (std::clamp(t_celsius, lo, hi) - lo) / (hi - lo);
    return 240.0 * (1.0 - f);
}

Rgb temp_to_color(double t_celsius, double lo, double hi) { return hsv_to_rgb(temp_to_hue(t_celsius, lo, hi)); }

Co2Band co2_band(double ppm) {
    if (!std::isfinite(ppm) || ppm < 0.0) {
        throw Error(ErrorCode::invalid_argument, "co2 concentration must be a finite value >= 0");
    }
    static constexpr std::array<double, 4> kOpacity = {0.0, 0.33, 0.66, 1.0};
    const int band = ppm < 400.0 ? 0 : ppm < 600.0 ? 1 : ppm < 800.0 ? 2 : 3;
    return {band, kOpacity[static_cast<std::size_t>(band)]};
}

} // namespace hometwin::diagnostics
