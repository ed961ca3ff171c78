#pragma once

#include "hometwin/forecasting/model.hpp"

#include <vector>

namespace hometwin::forecasting {

struct ArimaCoefficients {
    int d = 0;
    double intercept = 0.0;
    std::vector<double> ar; // phi_1..phi_p
    std::vector<double> ma; // theta_1..theta_q
    double residual_variance = 0.0;
};

/// ARIMA on the d-times differenced input: AR by conditional least squares,
/// MA by two-pass long-AR residual regression (Hannan-Rissanen).
class ArimaPredictor : public Predictor {
public:
    explicit ArimaPredictor(ArimaCoefficients coefficients, std::size_t burn_in = 288);
    std::size_t lag_window() const override;
    double predict(const SeriesView& view, std::size_t index) const override;
    const ArimaCoefficients& coefficients() const { return coef_; }

private:
    ArimaCoefficients coef_;
    std::size_t burn_in_;
};

/// Throws Error(invalid_argument) for p, q outside [0, 8] or d outside {0, 1, 2},
/// Error(insufficient_data) when fewer than 10 (p + q + 1) rows are usable and
/// Error(degenerate) with "degenerate design" for singular normal equations.
std::shared_ptr<const ArimaPredictor> fit_arima_predictor(const SeriesView& view, std::span<const std::size_t> rows,
                                                          int p, int d, int q);

FittedModel fit_arima(const core::TimeSeries& train, int p, int d, int q);

/// Model with given coefficients, for scenarios and tests.
FittedModel make_arima_model(ArimaCoefficients coefficients, const core::TimeSeries& reference);

} // namespace hometwin::forecasting
