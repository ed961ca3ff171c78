#pragma once

#include <span>
#include <vector>

namespace hometwin::forecasting {

/// Validation RMSE values below this are clamped before taking reciprocals.
inline constexpr double kRmseFloor = 1e-9;

/// Root mean squared difference. Throws Error(invalid_argument) on empty or mismatched input.
double rmse(std::span<const double> a, std::span<const double> b);

/// Per-member weights 1 / max(rmse, floor)^p, unnormalized.
std::vector<double> inverse_rmse_weights(std::span<const double> val_rmse, double p);

/// Elementwise sum(w_i * pred_i) / sum(w_i) with w_i = 1 / max(rmse_i, floor)^p.
std::vector<double> weight_average(const std::vector<std::vector<double>>& preds, std::span<const double> val_rmse,
                                   double p = 2.0);

} // namespace hometwin::forecasting
