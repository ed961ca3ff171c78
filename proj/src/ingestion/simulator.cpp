#include "hometwin/ingestion/simulator.hpp"

#include "hometwin/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hometwin::ingestion {

std::map<std::string, Coupling> default_couplings() {
    return {
        {"2BalconyEntrance", {0.55, 8.5, 3}},
        {"2Cooking", {0.8, 3.0, 1}},
        {"2LivingRoomCenter", {0.9, 2.0, 0}},
        {"2LivingRoomCenterHumidity", {-1.8, 72.0, 2}},
        {"2LivingRoomHumidifier", {-1.4, 66.0, 4}},
        {"2LRWindow", {0.6, 6.0, 2}},
        {"2OfficeDesk", {0.7, 5.5, 6}},
        {"2Stair", {0.75, 4.0, 5}},
    };
}

namespace {

bool is_humidity(const std::string& id) { return id.find("Humid") != std::string::npos; }

} // namespace

SimulatedData simulate(const SimulatorConfig& config) {
    if (config.days < 1 || config.step_minutes < 1 || core::kMinutesPerDay % config.step_minutes != 0) {
        throw Error(ErrorCode::invalid_argument, "simulator needs days >= 1 and a step dividing 1440 minutes");
    }
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int per_day = core::kMinutesPerDay / config.step_minutes;
    const std::size_t n = static_cast<std::size_t>(config.days) * static_cast<std::size_t>(per_day);
    constexpr double kTwoPi = 2.0 * std::numbers::pi;

    SimulatedData out;
    std::vector<double> fire(n);
    std::vector<double> outdoor(n);
    std::vector<double> heat(n, 0.0);

    // lighting events: evening start, fast rise, exponential decay
    for (int d = 0; d < config.days; ++d) {
        if (unit(rng) >= config.fire_probability_per_day) {
            continue;
        }
        const int start_step = d * per_day + static_cast<int>((16.0 * 60.0 + unit(rng) * 4.0 * 60.0) / config.step_minutes);
        out.fire_starts.push_back(config.start + core::Minutes{static_cast<std::int64_t>(start_step) * config.step_minutes});
        const double peak = config.fire_peak_c * (0.8 + 0.4 * unit(rng));
        for (std::size_t i = static_cast<std::size_t>(start_step); i < n; ++i) {
            const double minutes = static_cast<double>(i - static_cast<std::size_t>(start_step)) * config.step_minutes;
            double add = 0.0;
            if (minutes < config.fire_rise_minutes) {
                add = peak * (minutes + config.step_minutes) / (config.fire_rise_minutes + config.step_minutes);
            } else {
                add = peak * std::exp(-(minutes - config.fire_rise_minutes) / config.fire_decay_minutes);
            }
            if (add < 1e-3) {
                break;
            }
            heat[i] = std::max(heat[i], add);
        }
    }

    double weather = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double minute = static_cast<double>((i % static_cast<std::size_t>(per_day)) * config.step_minutes);
        const double phase = kTwoPi * minute / core::kMinutesPerDay;
        // indoor peaks late afternoon, outdoor mid afternoon
        const double indoor = config.indoor_mean_c + config.indoor_amplitude_c * std::sin(phase - kTwoPi * 11.0 / 24.0);
        fire[i] = indoor + heat[i] + config.noise_c * noise(rng);
        weather = 0.995 * weather + 0.05 * noise(rng);
        outdoor[i] = config.outdoor_mean_c + config.outdoor_amplitude_c * std::sin(phase - kTwoPi * 9.0 / 24.0) + weather;
    }

    auto make = [&](const std::string& id, std::vector<double> values, core::Unit unit) {
        core::TimeSeries s;
        s.sensor_id = id;
        s.start = config.start;
        s.step_minutes = config.step_minutes;
        s.values = std::move(values);
        s.unit = unit;
        out.series.emplace(id, std::move(s));
    };

    for (const auto& [id, c] : default_couplings()) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t src = i >= static_cast<std::size_t>(c.lag_steps) ? i - static_cast<std::size_t>(c.lag_steps) : 0;
            v[i] = c.gain * fire[src] + c.offset + 0.5 * config.noise_c * noise(rng);
        }
        make(id, std::move(v), is_humidity(id) ? core::Unit::percent_rh : core::Unit::celsius);
    }
    make(kFireplaceSensor, std::move(fire), core::Unit::celsius);
    make(kOutdoorSensor, std::move(outdoor), core::Unit::celsius);
    return out;
}

std::vector<core::Observation> to_observations(const SimulatedData& data, const SimulatorConfig& config) {
    std::vector<core::Observation> out;
    for (const auto& [id, s] : data.series) {
        std::optional<double> last_value;
        core::Timestamp last_time;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const core::Timestamp t = s.time_at(i);
            const double v = s.values[i];
            const bool report = !last_value || config.significant_change <= 0.0 ||
                                std::abs(v - *last_value) >= config.significant_change ||
                                (t - last_time).count() >= config.heartbeat_minutes || i + 1 == s.size();
            if (report) {
                out.push_back(core::Observation{id, t, v});
                last_value = v;
                last_time = t;
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const core::Observation& a, const core::Observation& b) { return a.time < b.time; });
    return out;
}

std::vector<core::Observation> simulate_observations(const SimulatorConfig& config) {
    return to_observations(simulate(config), config);
}

} // namespace hometwin::ingestion
