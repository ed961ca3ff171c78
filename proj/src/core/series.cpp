#include "hometwin/core/series.hpp"

#include "hometwin/core/error.hpp"

#include <cmath>
#include <numeric>

namespace hometwin::core {

TimeSeries TimeSeries::slice(std::size_t offset, std::size_t count) const {
    TimeSeries out;
    out.sensor_id = sensor_id;
    out.step_minutes = step_minutes;
    out.unit = unit;
    out.start = time_at(offset);
    if (offset < values.size()) {
        const std::size_t n = std::min(count, values.size() - offset);
        out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(offset),
                          values.begin() + static_cast<std::ptrdiff_t>(offset + n));
    }
    return out;
}

std::size_t TimeSeries::index_of(Timestamp t) const {
    const std::int64_t delta = (t - start).count();
    if (delta < 0 || delta % step_minutes != 0) {
        return npos;
    }
    const auto index = static_cast<std::size_t>(delta / step_minutes);
    return index < values.size() ? index : npos;
}

TimeSeries resample(std::span<const Sample> raw, int step_minutes, GapPolicy policy) {
    if (step_minutes <= 0) {
        throw Error(ErrorCode::invalid_argument, "step_minutes must be positive");
    }
    if (raw.empty()) {
        throw Error(ErrorCode::no_data, "no data");
    }
    for (std::size_t i = 1; i < raw.size(); ++i) {
        if (raw[i].time < raw[i - 1].time) {
            throw Error(ErrorCode::invalid_argument, "unsorted");
        }
    }

    TimeSeries out;
    out.start = raw.front().time;
    out.step_minutes = step_minutes;
    const std::int64_t span = (raw.back().time - raw.front().time).count();
    const auto n = static_cast<std::size_t>(span / step_minutes) + 1;
    out.values.resize(n);

    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Timestamp t = out.time_at(k);
        while (j + 1 < raw.size() && raw[j + 1].time <= t) {
            ++j;
        }
        const Sample& prev = raw[j];
        if (prev.time == t) {
            out.values[k] = prev.value;
            continue;
        }
        // t lies strictly between prev and the next observation
        const Sample& next = raw[j + 1];
        const std::int64_t gap = (next.time - prev.time).count();
        if (gap <= policy.max_linear_gap_minutes) {
            const double frac = static_cast<double>((t - prev.time).count()) / static_cast<double>(gap);
            out.values[k] = prev.value + (next.value - prev.value) * frac;
        } else {
            out.values[k] = prev.value;
        }
    }
    return out;
}

TimeSeries resample(std::span<const Sample> raw, int step_minutes, GapPolicy policy, std::string sensor_id,
                    Unit unit) {
    TimeSeries out = resample(raw, step_minutes, policy);
    out.sensor_id = std::move(sensor_id);
    out.unit = unit;
    return out;
}

DatasetSplit split(const TimeSeries& series, int train_days, int val_days, int test_days) {
    if (train_days <= 0 || val_days <= 0 || test_days <= 0) {
        throw Error(ErrorCode::invalid_argument, "empty split");
    }
    if (series.step_minutes <= 0 || kMinutesPerDay % series.step_minutes != 0) {
        throw Error(ErrorCode::invalid_argument, "step_minutes must divide a day");
    }
    const auto per_day = static_cast<std::size_t>(series.steps_per_day());
    const std::size_t train_n = static_cast<std::size_t>(train_days) * per_day;
    const std::size_t val_n = static_cast<std::size_t>(val_days) * per_day;
    const std::size_t test_n = static_cast<std::size_t>(test_days) * per_day;
    const std::size_t required = train_n + val_n + test_n;
    if (series.size() < required) {
        throw Error(ErrorCode::insufficient_data, "insufficient length: required " + std::to_string(required) +
                                                      " steps, have " + std::to_string(series.size()));
    }
    return DatasetSplit{series.slice(0, train_n), series.slice(train_n, val_n),
                        series.slice(train_n + val_n, test_n)};
}

std::vector<double> difference_values(std::span<const double> values, int order) {
    if (order < 1) {
        throw Error(ErrorCode::invalid_argument, "difference order must be >= 1");
    }
    if (values.size() <= static_cast<std::size_t>(order)) {
        throw Error(ErrorCode::invalid_argument, "series length must exceed the difference order");
    }
    std::vector<double> cur(values.begin(), values.end());
    for (int k = 0; k < order; ++k) {
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            cur[i] = cur[i + 1] - cur[i];
        }
        cur.pop_back();
    }
    return cur;
}

Differenced difference(const TimeSeries& series, int order) {
    Differenced out;
    out.series.values = difference_values(series.values, order);
    out.series.sensor_id = series.sensor_id;
    out.series.step_minutes = series.step_minutes;
    out.series.unit = series.unit;
    out.series.start = series.time_at(static_cast<std::size_t>(order));
    out.anchors.assign(series.values.begin(), series.values.begin() + order);
    return out;
}

TimeSeries undifference(const TimeSeries& diffed, std::span<const double> anchors) {
    const std::size_t order = anchors.size();
    if (order == 0) {
        throw Error(ErrorCode::invalid_argument, "undifference needs at least one anchor");
    }
    // heads[k] = first value of the k-th difference level, derived from the raw anchors
    std::vector<double> heads(order);
    std::vector<double> level(anchors.begin(), anchors.end());
    for (std::size_t k = 0; k < order; ++k) {
        heads[k] = level.front();
        for (std::size_t i = 0; i + 1 < level.size(); ++i) {
            level[i] = level[i + 1] - level[i];
        }
        level.pop_back();
    }

    std::vector<double> cur = diffed.values;
    for (std::size_t k = order; k-- > 0;) {
        std::vector<double> up(cur.size() + 1);
        up[0] = heads[k];
        for (std::size_t i = 0; i < cur.size(); ++i) {
            up[i + 1] = up[i] + cur[i];
        }
        cur = std::move(up);
    }

    TimeSeries out;
    out.sensor_id = diffed.sensor_id;
    out.step_minutes = diffed.step_minutes;
    out.unit = diffed.unit;
    out.start = diffed.start - Minutes{static_cast<std::int64_t>(order) * diffed.step_minutes};
    out.values = std::move(cur);
    return out;
}

double mean_of(std::span<const double> values) {
    if (values.empty()) {
        return 0.0;
    }
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double population_std(std::span<const double> values, double mean) {
    if (values.empty()) {
        return 0.0;
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / static_cast<double>(values.size()));
}

Normalized normalize(const TimeSeries& series) {
    if (series.empty()) {
        throw Error(ErrorCode::no_data, "no data");
    }
    const double mean = mean_of(series.values);
    const double sd = population_std(series.values, mean);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
        throw Error(ErrorCode::degenerate, "zero variance");
    }
    Normalized out{series, mean, sd};
    for (double& v : out.series.values) {
        v = (v - mean) / sd;
    }
    return out;
}

TimeSeries denormalize(const TimeSeries& series, double mean, double std) {
    TimeSeries out = series;
    for (double& v : out.values) {
        v = v * std + mean;
    }
    return out;
}

} // namespace hometwin::core
