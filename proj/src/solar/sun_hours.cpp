#include "hometwin/solar/sun_hours.hpp"

#include "hometwin/core/csv.hpp"
#include "hometwin/core/error.hpp"
#include "hometwin/solar/solar.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>

namespace hometwin::solar {

HorizonMask::HorizonMask(const std::array<double, 360>& elevation_deg) : elevation_(elevation_deg) {
    for (double e : elevation_) {
        if (!(e >= 0.0 && e <= 90.0)) {
            throw Error(ErrorCode::invalid_argument, "horizon elevation must lie in [0, 90]");
        }
    }
}

HorizonMask HorizonMask::flat(double elevation_deg) {
    std::array<double, 360> e;
    e.fill(elevation_deg);
    return HorizonMask(e);
}

HorizonMask HorizonMask::parse(std::istream& in, std::string_view origin) {
    std::array<double, 360> e;
    std::array<bool, 360> seen{};
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::invalid_argument, std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line.front() == '#') {
            continue;
        }
        const auto fields = core::split_csv_line(line);
        if (fields.size() != 2) {
            fail("expected 'azimuth_deg,elevation_deg'");
        }
        if (fields[0] == "azimuth_deg") {
            continue; // optional header
        }
        double az = 0.0;
        double el = 0.0;
        auto r1 = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), az);
        auto r2 = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), el);
        if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
            fail("malformed number");
        }
        const double rounded = std::round(az);
        if (std::abs(az - rounded) > 1e-9 || rounded < 0.0 || rounded >= 360.0) {
            fail("azimuth must be an integer degree in [0, 360)");
        }
        if (!(el >= 0.0 && el <= 90.0)) {
            fail("elevation must lie in [0, 90]");
        }
        const auto idx = static_cast<std::size_t>(rounded);
        if (seen[idx]) {
            fail("duplicate azimuth " + fields[0]);
        }
        seen[idx] = true;
        e[idx] = el;
    }
    for (std::size_t i = 0; i < 360; ++i) {
        if (!seen[i]) {
            throw Error(ErrorCode::invalid_argument,
                        std::string(origin) + ": missing azimuth " + std::to_string(i) + " (need 360 samples)");
        }
    }
    return HorizonMask(e);
}

HorizonMask HorizonMask::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::not_found, "cannot read mask '" + path.string() + "'");
    }
    return parse(in, path.string());
}

double HorizonMask::elevation_at(double azimuth_deg) const {
    const double a = wrap_degrees(azimuth_deg);
    const auto lo = static_cast<std::size_t>(std::floor(a)) % 360;
    const std::size_t hi = (lo + 1) % 360;
    const double frac = a - std::floor(a);
    return elevation_[lo] + (elevation_[hi] - elevation_[lo]) * frac;
}

SunHours sun_hours(const core::CivilDate& date, const core::HouseModel& house, const HorizonMask* mask,
                   int step_minutes) {
    if (step_minutes != 1 && step_minutes != 5) {
        throw Error(ErrorCode::invalid_argument, "step_minutes must be 1 or 5");
    }
    if (!date_supported(date)) {
        throw Error(ErrorCode::out_of_range, "date " + date.to_string() + " outside supported range");
    }
    const auto lmt_offset = core::Minutes{static_cast<std::int64_t>(std::lround(house.longitude * 4.0))};
    const core::Timestamp day_start = core::Timestamp::from_civil(date) - lmt_offset;

    SunHours out;
    out.date = date;
    const int samples = core::kMinutesPerDay / step_minutes;
    for (int k = 0; k < samples; ++k) {
        const core::Timestamp t = day_start + core::Minutes{static_cast<std::int64_t>(k) * step_minutes};
        const core::CivilDate d = t.date();
        if (!date_supported(d)) {
            continue;
        }
        const SolarResult pos = sun_position(t, house.latitude, house.longitude);
        const double horizon = mask != nullptr ? mask->elevation_at(pos.azimuth_deg) : 0.0;
        if (pos.altitude_deg > horizon) {
            out.lit_minutes += step_minutes;
            if (!out.first_lit) {
                out.first_lit = t;
            }
            out.last_lit = t;
        }
    }
    if (out.lit_minutes >= core::kMinutesPerDay) {
        out.first_lit.reset();
        out.last_lit.reset();
    }
    return out;
}

std::vector<SunHours> monthly_sun_hours(int year, const core::HouseModel& house, const HorizonMask* mask,
                                        int step_minutes) {
    std::vector<SunHours> out;
    out.reserve(12);
    for (unsigned m = 1; m <= 12; ++m) {
        out.push_back(sun_hours(core::CivilDate{year, m, core::days_in_month(year, m)}, house, mask, step_minutes));
    }
    return out;
}

} // namespace hometwin::solar
