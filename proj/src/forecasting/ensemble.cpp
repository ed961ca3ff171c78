#include "hometwin/forecasting/ensemble.hpp"

#include "hometwin/core/error.hpp"
#include "hometwin/forecasting/metrics.hpp"

#include <cmath>

namespace hometwin::forecasting {

void EnsembleSpec::validate() const {
    if (members.empty()) {
        throw Error(ErrorCode::invalid_argument, "ensemble needs at least one member");
    }
    if (members.size() != val_rmse.size()) {
        throw Error(ErrorCode::invalid_argument, "ensemble has " + std::to_string(members.size()) + " members but " +
                                                     std::to_string(val_rmse.size()) + " validation scores");
    }
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::invalid_argument, "ensemble exponent p must be positive");
    }
}

std::vector<double> EnsembleSpec::normalized_weights() const {
    validate();
    std::vector<double> w = inverse_rmse_weights(val_rmse, p);
    double total = 0.0;
    for (double x : w) {
        total += x;
    }
    for (double& x : w) {
        x /= total;
    }
    return w;
}

EnsembleForecast ensemble_forecast(const EnsembleSpec& ensemble, const ForecastRequest& request) {
    ensemble.validate();
    EnsembleForecast out;
    std::vector<std::vector<double>> preds;
    for (const auto& m : ensemble.members) {
        out.members.push_back(recursive_forecast(m, request));
        preds.push_back(out.members.back().values);
    }
    out.combined = out.members.front();
    out.combined.values = weight_average(preds, ensemble.val_rmse, ensemble.p);
    return out;
}

} // namespace hometwin::forecasting
