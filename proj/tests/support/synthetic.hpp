#pragma once

#include "hometwin/core/series.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace synthetic {

inline hometwin::core::Timestamp origin() { return hometwin::core::Timestamp::from_civil({2022, 1, 1}); }

inline hometwin::core::TimeSeries series(std::vector<double> values, int step = 5, const char* id = "synthetic") {
    hometwin::core::TimeSeries s;
    s.sensor_id = id;
    s.start = origin();
    s.step_minutes = step;
    s.values = std::move(values);
    return s;
}

/// x_t = c + phi x_{t-1} + e_t, started at the stationary mean.
inline std::vector<double> ar1(std::size_t n, double phi, double sigma, std::uint64_t seed, double c = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> x(n);
    double prev = c / (1.0 - phi);
    for (auto& v : x) {
        v = c + phi * prev + noise(rng);
        prev = v;
    }
    return x;
}

/// Daily sinusoid around 21 with AR(1) disturbances, 5-minute grid.
inline std::vector<double> daily_with_noise(int days, std::uint64_t seed, double amplitude = 1.5, double phi = 0.95,
                                            double sigma = 0.05) {
    const std::size_t n = static_cast<std::size_t>(days) * 288;
    const std::vector<double> e = ar1(n, phi, sigma, seed);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 21.0 + amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(i % 288) / 288.0) + e[i];
    }
    return x;
}

} // namespace synthetic
