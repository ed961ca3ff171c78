#pragma once

#include "hometwin/core/time.hpp"

namespace hometwin::solar {

/// Observer and instant for a sun-position evaluation.
struct SolarInput {
    core::CivilDate date;
    double t_ut_hours = 0.0;  // [0, 24)
    double longitude_deg = 0.0; // east positive
    double latitude_deg = 0.0;
};

/// Every quantity of the ephemeris chain, kept for auditing a result.
struct SolarIntermediates {
    double jd = 0.0;   // days from J2000 at 0h UT of the date
    double jc = 0.0;   // jd in Julian centuries
    double jd_d = 0.0; // jd plus the UT fraction of the day
    double jc_d = 0.0;
    double t_sr = 0.0;   // Greenwich sidereal time at 0h UT, hours
    double t_srut = 0.0; // Greenwich sidereal time at t_UT, hours
    double t_lsr = 0.0;  // local sidereal time, hours
    double mean_longitude = 0.0; // L0, degrees
    double mean_anomaly = 0.0;   // M0, degrees
    double equation_of_center = 0.0;
    double ecliptic_longitude = 0.0; // lambda
    double ecliptic_latitude = 0.0;  // beta, fixed at zero
    double obliquity = 0.0;          // Omega
    double right_ascension = 0.0;    // alpha, degrees
    double declination = 0.0;        // delta, degrees
    double hour_angle = 0.0;         // degrees in [-180, 180)
};

struct SolarResult {
    double azimuth_deg = 0.0;  // [0, 360) clockwise from north
    double altitude_deg = 0.0; // [-90, 90], no refraction
    SolarIntermediates intermediates;
};

inline constexpr core::CivilDate kFirstSupportedDate{1900, 3, 1};
inline constexpr core::CivilDate kLastSupportedDate{2100, 2, 28};

bool date_supported(const core::CivilDate& date);

struct JulianDays {
    double jd_d = 0.0;
    double jc_d = 0.0;
};

/// Days since J2000 at 0h UT of `date`. Throws Error(out_of_range) outside the supported range.
double days_from_j2000(const core::CivilDate& date);
JulianDays julian_from_j2000(const core::CivilDate& date, double t_ut_hours);

struct SiderealTime {
    double t_sr = 0.0;
    double t_srut = 0.0;
    double t_lsr = 0.0;
};

SiderealTime sidereal(double jc, double t_ut_hours, double longitude_deg);

struct EclipticPosition {
    double mean_longitude = 0.0;
    double mean_anomaly = 0.0;
    double equation_of_center = 0.0;
    double longitude = 0.0;
    double latitude = 0.0;
};

EclipticPosition sun_ecliptic(double jc_d);

struct EquatorialPosition {
    double obliquity = 0.0;
    double right_ascension = 0.0;
    double declination = 0.0;
};

EquatorialPosition sun_equatorial(double lambda_deg, double jc_d);

SolarResult sun_horizontal(const SolarInput& input);

/// Convenience overload on a UTC instant.
SolarResult sun_position(core::Timestamp when, double latitude_deg, double longitude_deg);

double wrap_degrees(double angle);  // [0, 360)
double wrap_hours(double hours);    // [0, 24)

} // namespace hometwin::solar
