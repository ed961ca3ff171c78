#pragma once

#include "hometwin/core/time.hpp"
#include "hometwin/core/types.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace hometwin::solar {

/// Horizon elevation per whole azimuth degree; intermediate azimuths interpolate linearly.
class HorizonMask {
public:
    HorizonMask() { elevation_.fill(0.0); }
    explicit HorizonMask(const std::array<double, 360>& elevation_deg);

    static HorizonMask flat(double elevation_deg);
    /// Reads 360 lines of `azimuth_deg,elevation_deg`, one per integer azimuth.
    static HorizonMask parse(std::istream& in, std::string_view origin = "<mask>");
    static HorizonMask load(const std::filesystem::path& path);

    double elevation_at(double azimuth_deg) const;
    const std::array<double, 360>& samples() const { return elevation_; }

private:
    std::array<double, 360> elevation_{};
};

struct SunHours {
    core::CivilDate date;
    std::optional<core::Timestamp> first_lit;
    std::optional<core::Timestamp> last_lit;
    int lit_minutes = 0;
};

/// Scans one local-mean-time day (00:00 shifted by longitude/15 hours from UTC) at
/// `step_minutes` and counts samples where the sun's altitude exceeds the mask.
/// Polar day reports 1440 lit minutes and, like polar night, no first/last markers.
SunHours sun_hours(const core::CivilDate& date, const core::HouseModel& house, const HorizonMask* mask,
                   int step_minutes = 5);

/// sun_hours on the last day of each month.
std::vector<SunHours> monthly_sun_hours(int year, const core::HouseModel& house, const HorizonMask* mask,
                                        int step_minutes = 5);

} // namespace hometwin::solar
