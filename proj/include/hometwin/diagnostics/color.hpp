#pragma once

#include <cstdint>

namespace hometwin::diagnostics {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

/// Full-saturation, full-value HSV to 8-bit RGB. Hue in degrees, wrapped to [0, 360).
Rgb hsv_to_rgb(double hue_deg, double saturation = 1.0, double value = 1.0);

/// Hue from 240 (blue) at lo to 0 (red) at hi, with t clamped to [lo, hi].
/// Throws Error(invalid_argument) unless lo < hi and all inputs are finite.
double temp_to_hue(double t_celsius, double lo, double hi);
Rgb temp_to_color(double t_celsius, double lo = 0.0, double hi = 40.0);

/// Fog bands [0,400), [400,600), [600,800), [800,inf) ppm.
struct Co2Band {
    int index = 0;
    double opacity = 0.0;
};

/// Throws Error(invalid_argument) for negative or non-finite ppm.
Co2Band co2_band(double ppm);

} // namespace hometwin::diagnostics
