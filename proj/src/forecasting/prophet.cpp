#include "hometwin/forecasting/prophet.hpp"

#include "hometwin/core/error.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hometwin::forecasting {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

double ProphetPredictor::scaled_time(core::Timestamp t) const {
    return static_cast<double>((t - origin_).count()) / span_minutes_;
}

double ProphetPredictor::trend_at(core::Timestamp t) const {
    const double s = scaled_time(t);
    double y = intercept_ + slope_ * s;
    for (std::size_t j = 0; j < changepoints_.size(); ++j) {
        y += deltas_[j] * std::max(0.0, s - changepoints_[j]);
    }
    return y;
}

double ProphetPredictor::seasonal_at(core::Timestamp t) const {
    const double phase = kTwoPi * t.minute_of_day() / core::kMinutesPerDay;
    double y = 0.0;
    for (std::size_t k = 0; k * 2 < fourier_.size(); ++k) {
        const double a = static_cast<double>(k + 1) * phase;
        y += fourier_[2 * k] * std::sin(a) + fourier_[2 * k + 1] * std::cos(a);
    }
    return y;
}

double ProphetPredictor::exogenous_at(core::Timestamp t, const Exogenous* exogenous) const {
    if (options_.exogenous.empty()) {
        return 0.0;
    }
    if (exogenous == nullptr) {
        throw Error(ErrorCode::invalid_argument, "prophet-lite model needs its exogenous series");
    }
    double y = 0.0;
    for (std::size_t i = 0; i < options_.exogenous.size(); ++i) {
        y += exo_coef_[i] * (exogenous->value_at(options_.exogenous[i], t) - exo_mean_[i]) / exo_scale_[i];
    }
    return y;
}

double ProphetPredictor::mean_trend_slope_per_day() const {
    const core::Timestamp end = origin_ + core::Minutes{static_cast<std::int64_t>(span_minutes_)};
    return (trend_at(end) - trend_at(origin_)) / (span_minutes_ / core::kMinutesPerDay);
}

double ProphetPredictor::predict(const SeriesView& view, std::size_t index) const {
    const core::Timestamp t = view.time_at(index);
    return trend_at(t) + seasonal_at(t) + exogenous_at(t, view.exogenous);
}

std::shared_ptr<const ProphetPredictor> fit_prophet_predictor(const SeriesView& view, std::span<const std::size_t> rows,
                                                              const ProphetOptions& options) {
    if (options.changepoints < 0 || options.fourier_daily < 0 || options.ridge_lambda < 0.0) {
        throw Error(ErrorCode::invalid_argument, "prophet-lite: negative option");
    }
    std::vector<std::size_t> used;
    for (std::size_t r : rows) {
        if (r < view.values.size()) {
            used.push_back(r);
        }
    }
    if (used.empty()) {
        throw Error(ErrorCode::insufficient_data, "prophet-lite: no training rows");
    }
    auto model = std::shared_ptr<ProphetPredictor>(new ProphetPredictor());
    model->options_ = options;
    const auto [lo, hi] = std::minmax_element(used.begin(), used.end());
    model->origin_ = view.time_at(*lo);
    const double covered = static_cast<double>((view.time_at(*hi) - model->origin_).count() + view.step_minutes);
    if (covered < 2.0 * core::kMinutesPerDay) {
        throw Error(ErrorCode::insufficient_data, "prophet-lite needs at least two full days of training data");
    }
    model->span_minutes_ = static_cast<double>((view.time_at(*hi) - model->origin_).count());
    for (int j = 1; j <= options.changepoints; ++j) {
        model->changepoints_.push_back(0.8 * j / (options.changepoints + 1));
    }

    const std::size_t n_cp = model->changepoints_.size();
    const std::size_t n_f = 2 * static_cast<std::size_t>(options.fourier_daily);
    const std::size_t n_x = options.exogenous.size();
    const auto cols = static_cast<Eigen::Index>(1 + n_cp + n_f + n_x);
    const auto n = static_cast<Eigen::Index>(used.size());

    if (n_x > 0 && view.exogenous == nullptr) {
        throw Error(ErrorCode::invalid_argument, "prophet-lite: exogenous columns requested without exogenous data");
    }
    Eigen::MatrixXd exo_raw(n, static_cast<Eigen::Index>(n_x));
    for (Eigen::Index r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < n_x; ++i) {
            exo_raw(r, static_cast<Eigen::Index>(i)) =
                view.exogenous->value_at(options.exogenous[i], view.time_at(used[static_cast<std::size_t>(r)]));
        }
    }
    for (std::size_t i = 0; i < n_x; ++i) {
        const auto col = exo_raw.col(static_cast<Eigen::Index>(i));
        const double mean = col.mean();
        const double sd = std::sqrt((col.array() - mean).square().mean());
        model->exo_mean_.push_back(mean);
        model->exo_scale_.push_back(sd > 1e-12 ? sd : 1.0);
    }

    Eigen::MatrixXd x(n, cols);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::size_t idx = used[static_cast<std::size_t>(r)];
        const core::Timestamp t = view.time_at(idx);
        const double s = model->scaled_time(t);
        Eigen::Index c = 0;
        x(r, c++) = s;
        for (double cp : model->changepoints_) {
            x(r, c++) = std::max(0.0, s - cp);
        }
        const double phase = kTwoPi * t.minute_of_day() / core::kMinutesPerDay;
        for (int k = 1; k <= options.fourier_daily; ++k) {
            x(r, c++) = std::sin(k * phase);
            x(r, c++) = std::cos(k * phase);
        }
        for (std::size_t i = 0; i < n_x; ++i) {
            x(r, c++) = (exo_raw(r, static_cast<Eigen::Index>(i)) - model->exo_mean_[i]) / model->exo_scale_[i];
        }
        y(r) = view.values[idx];
    }

    detail::LinearFit lf;
    try {
        lf = detail::ridge(x, y, options.ridge_lambda);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::degenerate) {
            throw Error(ErrorCode::degenerate, "prophet-lite: rank-deficient design; increase ridge_lambda");
        }
        throw;
    }
    model->intercept_ = lf.intercept;
    Eigen::Index c = 0;
    model->slope_ = lf.weights(c++);
    for (std::size_t j = 0; j < n_cp; ++j) {
        model->deltas_.push_back(lf.weights(c++));
    }
    for (std::size_t k = 0; k < n_f; ++k) {
        model->fourier_.push_back(lf.weights(c++));
    }
    for (std::size_t i = 0; i < n_x; ++i) {
        model->exo_coef_.push_back(lf.weights(c++));
    }
    return model;
}

FittedModel fit_prophet_lite(const core::TimeSeries& train, const ProphetOptions& options, const Exogenous* exogenous) {
    BaseModelSpec spec = prophet_spec(options.changepoints, options.fourier_daily, options.ridge_lambda);
    spec.exogenous = options.exogenous;
    return fit(spec, train, exogenous);
}

} // namespace hometwin::forecasting
