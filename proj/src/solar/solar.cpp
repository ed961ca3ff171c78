#include "hometwin/solar/solar.hpp"

#include "hometwin/core/error.hpp"

#include <cmath>
#include <numbers>

namespace hometwin::solar {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double sin_deg(double a) { return std::sin(a * kDegToRad); }
double cos_deg(double a) { return std::cos(a * kDegToRad); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

} // namespace

double wrap_degrees(double angle) {
    double a = std::fmod(angle, 360.0);
    if (a < 0.0) {
        a += 360.0;
    }
    return a >= 360.0 ? 0.0 : a;
}

double wrap_hours(double hours) {
    double h = std::fmod(hours, 24.0);
    if (h < 0.0) {
        h += 24.0;
    }
    return h >= 24.0 ? 0.0 : h;
}

bool date_supported(const core::CivilDate& date) {
    return date.valid() && date >= kFirstSupportedDate && date <= kLastSupportedDate;
}

double days_from_j2000(const core::CivilDate& date) {
    if (!date_supported(date)) {
        throw Error(ErrorCode::out_of_range,
                    "date " + date.to_string() + " outside supported range 1900-03-01..2100-02-28");
    }
    const std::int64_t y = date.year;
    const std::int64_t m = date.month;
    const std::int64_t d = date.day;
    const std::int64_t whole = 367 * y - floor_div(7 * (y + floor_div(m + 9, 12)), 4) + floor_div(275 * m, 9) + d;
    return static_cast<double>(whole) - 730531.5;
}

JulianDays julian_from_j2000(const core::CivilDate& date, double t_ut_hours) {
    const double jd_d = days_from_j2000(date) + t_ut_hours / 24.0;
    return {jd_d, jd_d / 36525.0};
}

SiderealTime sidereal(double jc, double t_ut_hours, double longitude_deg) {
    SiderealTime st;
    const double t_sr = 6.6974 + 2400.0513 * jc;
    const double t_srut = t_sr + (366.2422 / 365.2422) * t_ut_hours;
    st.t_sr = wrap_hours(t_sr);
    st.t_srut = wrap_hours(t_srut);
    st.t_lsr = wrap_hours(t_srut + longitude_deg / 15.0);
    return st;
}

EclipticPosition sun_ecliptic(double jc_d) {
    EclipticPosition e;
    e.mean_longitude = wrap_degrees(280.466 + 36000.770 * jc_d);
    e.mean_anomaly = wrap_degrees(357.529 + 35999.050 * jc_d);
    e.equation_of_center = (1.915 - 0.005 * jc_d) * sin_deg(e.mean_anomaly) + 0.020 * sin_deg(2.0 * e.mean_anomaly);
    e.longitude = wrap_degrees(e.mean_longitude + e.equation_of_center);
    e.latitude = 0.0;
    return e;
}

EquatorialPosition sun_equatorial(double lambda_deg, double jc_d) {
    EquatorialPosition q;
    q.obliquity = 23.439 - 0.013 * jc_d;
    const double sl = sin_deg(lambda_deg);
    q.right_ascension = wrap_degrees(std::atan2(sl * cos_deg(q.obliquity), cos_deg(lambda_deg)) * kRadToDeg);
    q.declination = std::asin(sl * sin_deg(q.obliquity)) * kRadToDeg;
    return q;
}

SolarResult sun_horizontal(const SolarInput& input) {
    if (!(input.t_ut_hours >= 0.0 && input.t_ut_hours < 24.0)) {
        throw Error(ErrorCode::invalid_argument, "t_UT must lie in [0, 24)");
    }
    if (!(input.latitude_deg >= -90.0 && input.latitude_deg <= 90.0)) {
        throw Error(ErrorCode::invalid_argument, "latitude must lie in [-90, 90]");
    }
    SolarResult r;
    SolarIntermediates& im = r.intermediates;
    im.jd = days_from_j2000(input.date);
    im.jc = im.jd / 36525.0;
    const JulianDays jdd = julian_from_j2000(input.date, input.t_ut_hours);
    im.jd_d = jdd.jd_d;
    im.jc_d = jdd.jc_d;

    const SiderealTime st = sidereal(im.jc, input.t_ut_hours, input.longitude_deg);
    im.t_sr = st.t_sr;
    im.t_srut = st.t_srut;
    im.t_lsr = st.t_lsr;

    const EclipticPosition ecl = sun_ecliptic(im.jc_d);
    im.mean_longitude = ecl.mean_longitude;
    im.mean_anomaly = ecl.mean_anomaly;
    im.equation_of_center = ecl.equation_of_center;
    im.ecliptic_longitude = ecl.longitude;
    im.ecliptic_latitude = ecl.latitude;

    const EquatorialPosition eq = sun_equatorial(ecl.longitude, im.jc_d);
    im.obliquity = eq.obliquity;
    im.right_ascension = eq.right_ascension;
    im.declination = eq.declination;

    // sidereal hours become degrees before the right ascension is subtracted
    double ha = wrap_degrees(im.t_lsr * 15.0 - eq.right_ascension);
    if (ha >= 180.0) {
        ha -= 360.0;
    }
    im.hour_angle = ha;

    const double b = input.latitude_deg;
    const double delta = eq.declination;
    double s = sin_deg(b) * sin_deg(delta) + cos_deg(b) * cos_deg(delta) * cos_deg(ha);
    s = std::fmax(-1.0, std::fmin(1.0, s));
    r.altitude_deg = std::asin(s) * kRadToDeg;

    const double y = -sin_deg(ha);
    const double x = std::tan(delta * kDegToRad) * cos_deg(b) - sin_deg(b) * cos_deg(ha);
    r.azimuth_deg = wrap_degrees(std::atan2(y, x) * kRadToDeg);
    return r;
}

SolarResult sun_position(core::Timestamp when, double latitude_deg, double longitude_deg) {
    const core::CivilTime c = when.civil();
    return sun_horizontal(SolarInput{c.date, c.hour + c.minute / 60.0, longitude_deg, latitude_deg});
}

} // namespace hometwin::solar
