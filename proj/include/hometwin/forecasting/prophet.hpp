#pragma once

#include "hometwin/forecasting/model.hpp"

#include <vector>

namespace hometwin::forecasting {

struct ProphetOptions {
    int changepoints = 10; // even grid over the first 80% of the training span
    int fourier_daily = 4;
    double ridge_lambda = 1e-3;
    std::vector<std::string> exogenous;
};

/// Piecewise-linear trend + daily Fourier terms (+ exogenous columns), fit jointly
/// by ridge least squares on a time axis scaled to [0, 1] over the training span.
class ProphetPredictor : public Predictor {
public:
    std::size_t lag_window() const override { return 0; }
    double predict(const SeriesView& view, std::size_t index) const override;

    double trend_at(core::Timestamp t) const;
    double seasonal_at(core::Timestamp t) const;
    double exogenous_at(core::Timestamp t, const Exogenous* exogenous) const;
    /// Trend slope per day averaged over the training span.
    double mean_trend_slope_per_day() const;

    const ProphetOptions& options() const { return options_; }

private:
    friend std::shared_ptr<const ProphetPredictor> fit_prophet_predictor(const SeriesView&, std::span<const std::size_t>,
                                                                         const ProphetOptions&);
    double scaled_time(core::Timestamp t) const;

    ProphetOptions options_;
    core::Timestamp origin_;
    double span_minutes_ = 1.0;
    std::vector<double> changepoints_;
    double intercept_ = 0.0;
    double slope_ = 0.0;
    std::vector<double> deltas_;
    std::vector<double> fourier_; // sin_1, cos_1, sin_2, ...
    std::vector<double> exo_coef_;
    std::vector<double> exo_mean_;
    std::vector<double> exo_scale_;
};

/// Throws Error(insufficient_data) for less than two daily periods and
/// Error(degenerate) when the design is rank deficient (hint: raise ridge_lambda).
std::shared_ptr<const ProphetPredictor> fit_prophet_predictor(const SeriesView& view, std::span<const std::size_t> rows,
                                                              const ProphetOptions& options);

FittedModel fit_prophet_lite(const core::TimeSeries& train, const ProphetOptions& options,
                             const Exogenous* exogenous = nullptr);

} // namespace hometwin::forecasting
