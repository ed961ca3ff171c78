#pragma once

#include "hometwin/forecasting/model.hpp"

#include <vector>

namespace hometwin::forecasting {

struct EnsembleSpec {
    std::vector<FittedModel> members;
    std::vector<double> val_rmse;
    double p = 2.0;

    /// Throws Error(invalid_argument) unless sizes match, are non-empty and p > 0.
    void validate() const;
    std::vector<double> normalized_weights() const;
};

struct EnsembleForecast {
    core::TimeSeries combined;
    std::vector<core::TimeSeries> members;
};

/// Weight-averages the members' recursive forecasts.
EnsembleForecast ensemble_forecast(const EnsembleSpec& ensemble, const ForecastRequest& request);

} // namespace hometwin::forecasting
