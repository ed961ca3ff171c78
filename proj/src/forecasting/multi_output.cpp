#include "hometwin/forecasting/multi_output.hpp"

#include "forecasting/linalg.hpp"
#include "hometwin/core/error.hpp"
#include "hometwin/forecasting/metrics.hpp"

#include <cmath>
#include <numbers>

namespace hometwin::forecasting {

std::vector<std::string> MultiOutputModel::target_ids() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : targets) {
        out.push_back(k);
    }
    return out;
}

Eigen::MatrixXd multi_output_features(const core::TimeSeries& fireplace, int lags) {
    if (lags < 1) {
        throw Error(ErrorCode::invalid_argument, "multi-output needs at least one lag");
    }
    if (fireplace.empty()) {
        throw Error(ErrorCode::no_data, "fireplace series is empty");
    }
    const auto n = static_cast<Eigen::Index>(fireplace.size());
    Eigen::MatrixXd x(n, lags + 2);
    for (Eigen::Index t = 0; t < n; ++t) {
        for (int l = 0; l < lags; ++l) {
            x(t, l) = fireplace.values[static_cast<std::size_t>(std::max<Eigen::Index>(0, t - l))];
        }
        const double phase =
            2.0 * std::numbers::pi * fireplace.time_at(static_cast<std::size_t>(t)).minute_of_day() / core::kMinutesPerDay;
        x(t, lags) = std::sin(phase);
        x(t, lags + 1) = std::cos(phase);
    }
    return x;
}

namespace {

void require_aligned(const core::TimeSeries& fire, const core::TimeSeries& target, const std::string& id) {
    if (target.start != fire.start || target.step_minutes != fire.step_minutes || target.size() != fire.size()) {
        throw Error(ErrorCode::invalid_argument, "target '" + id + "' does not align with the fireplace series");
    }
}

Eigen::VectorXd linear_predict(const TargetModel& t, const Eigen::MatrixXd& x) {
    return (x * t.linear_weights).array() + t.linear_intercept;
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

} // namespace

MultiOutputModel fit_multi_output(const core::TimeSeries& fireplace_train,
                                  const std::map<std::string, core::TimeSeries>& targets_train,
                                  const core::TimeSeries& fireplace_val,
                                  const std::map<std::string, core::TimeSeries>& targets_val,
                                  const MultiOutputOptions& options) {
    if (targets_train.empty()) {
        throw Error(ErrorCode::invalid_argument, "multi-output needs at least one target");
    }
    const Eigen::MatrixXd x_train = multi_output_features(fireplace_train, options.lags);
    const Eigen::MatrixXd x_val = multi_output_features(fireplace_val, options.lags);
    const BinnedFeatures binned = bin_features(x_train, options.gbm.max_bins);

    MultiOutputModel model;
    model.options = options;
    for (const auto& [id, train] : targets_train) {
        auto vit = targets_val.find(id);
        if (vit == targets_val.end()) {
            throw Error(ErrorCode::invalid_argument, "target '" + id + "' has no validation series");
        }
        require_aligned(fireplace_train, train, id);
        require_aligned(fireplace_val, vit->second, id);

        TargetModel t;
        t.target = id;
        t.unit = train.unit;
        const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(train.values.data(),
                                                                    static_cast<Eigen::Index>(train.size()));
        const detail::LinearFit lin = detail::ridge(x_train, y, options.ridge_lambda);
        t.linear_weights = lin.weights;
        t.linear_intercept = lin.intercept;
        t.gbm = fit_gbm(x_train, binned, train.values, options.gbm);

        const Eigen::VectorXd pl = linear_predict(t, x_val);
        const Eigen::VectorXd pg = t.gbm.predict(x_val);
        t.val_rmse_linear = rmse(as_span(pl), vit->second.values);
        t.val_rmse_gbm = rmse(as_span(pg), vit->second.values);
        model.targets.emplace(id, std::move(t));
    }
    return model;
}

std::map<std::string, core::TimeSeries> predict_multi_output(const MultiOutputModel& model,
                                                            const MultiOutputRequest& request) {
    std::vector<std::string> ids = request.targets.empty() ? model.target_ids() : request.targets;
    for (const auto& id : ids) {
        if (!model.targets.count(id)) {
            throw Error(ErrorCode::not_found, "no multi-output model for target '" + id + "'");
        }
    }
    const Eigen::MatrixXd x = multi_output_features(request.fireplace, model.options.lags);
    std::map<std::string, core::TimeSeries> out;
    for (const auto& id : ids) {
        const TargetModel& t = model.targets.at(id);
        const Eigen::VectorXd pl = linear_predict(t, x);
        const Eigen::VectorXd pg = t.gbm.predict(x);
        const std::vector<double> rm = {t.val_rmse_linear, t.val_rmse_gbm};
        core::TimeSeries s;
        s.sensor_id = id;
        s.start = request.fireplace.start;
        s.step_minutes = request.fireplace.step_minutes;
        s.unit = t.unit;
        s.values = weight_average({std::vector<double>(pl.begin(), pl.end()), std::vector<double>(pg.begin(), pg.end())},
                                  rm, model.options.p);
        out.emplace(id, std::move(s));
    }
    return out;
}

} // namespace hometwin::forecasting
