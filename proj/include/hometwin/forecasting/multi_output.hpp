#pragma once

#include "hometwin/core/series.hpp"
#include "hometwin/forecasting/gbm.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace hometwin::forecasting {

struct MultiOutputOptions {
    int lags = 24; // fireplace values at t, t-1, ..., t-23
    double ridge_lambda = 1e-3;
    GbmParams gbm{.n_trees = 60, .depth = 3, .learning_rate = 0.2};
    double p = 2.0;
};

/// Lagged fireplace values plus minute-of-day sine/cosine. Lags before the
/// series start repeat the first value.
Eigen::MatrixXd multi_output_features(const core::TimeSeries& fireplace, int lags);

struct TargetModel {
    std::string target;
    core::Unit unit = core::Unit::celsius;
    Eigen::VectorXd linear_weights;
    double linear_intercept = 0.0;
    GbmModel gbm;
    double val_rmse_linear = 0.0;
    double val_rmse_gbm = 0.0;
};

struct MultiOutputModel {
    MultiOutputOptions options;
    std::map<std::string, TargetModel> targets;

    std::vector<std::string> target_ids() const;
};

struct MultiOutputRequest {
    core::TimeSeries fireplace; // observed or forecast
    std::vector<std::string> targets;
};

/// Per target, fits a ridge linear model and a GBM on the training window and
/// weights them by validation RMSE. Every target must align with the fireplace grid.
MultiOutputModel fit_multi_output(const core::TimeSeries& fireplace_train,
                                  const std::map<std::string, core::TimeSeries>& targets_train,
                                  const core::TimeSeries& fireplace_val,
                                  const std::map<std::string, core::TimeSeries>& targets_val,
                                  const MultiOutputOptions& options = {});

/// Unknown target ids throw Error(not_found).
std::map<std::string, core::TimeSeries> predict_multi_output(const MultiOutputModel& model,
                                                            const MultiOutputRequest& request);

} // namespace hometwin::forecasting
