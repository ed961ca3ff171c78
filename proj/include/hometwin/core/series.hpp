#pragma once

#include "hometwin/core/time.hpp"
#include "hometwin/core/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace hometwin::core {

/// Uniformly spaced, gap-free readings of one channel.
struct TimeSeries {
    std::string sensor_id;
    Timestamp start;
    int step_minutes = 5;
    std::vector<double> values;
    Unit unit = Unit::celsius;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    Timestamp time_at(std::size_t index) const {
        return start + Minutes{static_cast<std::int64_t>(index) * step_minutes};
    }
    /// Timestamp of the last value; `start` for an empty series.
    Timestamp last_time() const { return values.empty() ? start : time_at(values.size() - 1); }
    int steps_per_day() const { return kMinutesPerDay / step_minutes; }

    /// Contiguous sub-series; clamps `count` at the end.
    TimeSeries slice(std::size_t offset, std::size_t count) const;
    /// Index of `t` on this grid, or npos when `t` is off-grid or outside the series.
    std::size_t index_of(Timestamp t) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// How `resample` fills grid points that have no observation.
/// Gaps up to `max_linear_gap_minutes` between the bracketing observations are
/// linearly interpolated; longer gaps carry the last observation forward.
struct GapPolicy {
    int max_linear_gap_minutes = 15;
};

TimeSeries resample(std::span<const Sample> raw, int step_minutes, GapPolicy policy = {});
TimeSeries resample(std::span<const Sample> raw, int step_minutes, GapPolicy policy, std::string sensor_id,
                    Unit unit);

struct DatasetSplit {
    TimeSeries train;
    TimeSeries validation;
    TimeSeries test;
};

/// Leading train/validation/test windows measured in whole days.
DatasetSplit split(const TimeSeries& series, int train_days, int val_days, int test_days);

struct Differenced {
    TimeSeries series;
    std::vector<double> anchors; // first `order` raw values
};

Differenced difference(const TimeSeries& series, int order);
TimeSeries undifference(const TimeSeries& diffed, std::span<const double> anchors);

/// Plain vector differencing with the same contract, for model internals.
std::vector<double> difference_values(std::span<const double> values, int order);

struct Normalized {
    TimeSeries series;
    double mean = 0.0;
    double std = 1.0;
};

/// Standardizes with the population standard deviation (divide by N).
Normalized normalize(const TimeSeries& series);
TimeSeries denormalize(const TimeSeries& series, double mean, double std);

double mean_of(std::span<const double> values);
double population_std(std::span<const double> values, double mean);

} // namespace hometwin::core
