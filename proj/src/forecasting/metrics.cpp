#include "hometwin/forecasting/metrics.hpp"

#include "hometwin/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace hometwin::forecasting {

double rmse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::invalid_argument, "rmse: length mismatch (" + std::to_string(a.size()) + " vs " +
                                                     std::to_string(b.size()) + ")");
    }
    if (a.empty()) {
        throw Error(ErrorCode::invalid_argument, "rmse: empty input");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

std::vector<double> inverse_rmse_weights(std::span<const double> val_rmse, double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::invalid_argument, "weight exponent p must be positive");
    }
    std::vector<double> w;
    w.reserve(val_rmse.size());
    for (double r : val_rmse) {
        if (std::isnan(r)) {
            throw Error(ErrorCode::invalid_argument, "validation rmse is NaN");
        }
        w.push_back(1.0 / std::pow(std::max(r, kRmseFloor), p));
    }
    return w;
}

std::vector<double> weight_average(const std::vector<std::vector<double>>& preds, std::span<const double> val_rmse,
                                   double p) {
    if (preds.empty() || preds.size() != val_rmse.size()) {
        throw Error(ErrorCode::invalid_argument, "weight_average needs one rmse per prediction vector");
    }
    const std::size_t n = preds.front().size();
    for (const auto& v : preds) {
        if (v.size() != n) {
            throw Error(ErrorCode::invalid_argument, "weight_average: prediction vectors differ in length");
        }
    }
    if (preds.size() == 1) {
        return preds.front();
    }
    std::vector<double> w = inverse_rmse_weights(val_rmse, p);
    // normalize before summing so huge reciprocal weights cannot overflow
    const double wmax = *std::max_element(w.begin(), w.end());
    double total = 0.0;
    for (double& x : w) {
        x /= wmax;
        total += x;
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t m = 0; m < preds.size(); ++m) {
        const double wm = w[m] / total;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += wm * preds[m][i];
        }
    }
    return out;
}

} // namespace hometwin::forecasting
