#include "hometwin/forecasting/pipeline.hpp"

#include "hometwin/core/error.hpp"
#include "hometwin/forecasting/metrics.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace hometwin::forecasting {

namespace {

using DayForecaster = std::function<std::vector<double>(const ForecastRequest&)>;

double daywise(const DayForecaster& forecaster, const core::TimeSeries& context, const core::TimeSeries& evaluation,
               const Exogenous* exogenous) {
    if (context.step_minutes != evaluation.step_minutes) {
        throw Error(ErrorCode::invalid_argument, "context and evaluation use different steps");
    }
    if (!context.empty() && evaluation.start != context.last_time() + core::Minutes{context.step_minutes}) {
        throw Error(ErrorCode::invalid_argument, "evaluation must start right after the context");
    }
    const std::size_t spd = static_cast<std::size_t>(evaluation.steps_per_day());
    const std::size_t days = evaluation.size() / spd;
    if (days == 0) {
        throw Error(ErrorCode::insufficient_data, "evaluation window holds no whole day");
    }
    ForecastRequest request;
    request.history = context;
    request.horizon_steps = spd;
    request.exogenous = exogenous;
    if (context.empty()) {
        request.history.start = evaluation.start;
    }
    double sum = 0.0;
    for (std::size_t d = 0; d < days; ++d) {
        const std::vector<double> f = forecaster(request);
        for (std::size_t i = 0; i < spd; ++i) {
            const double e = f[i] - evaluation.values[d * spd + i];
            sum += e * e;
        }
        request.history.values.insert(request.history.values.end(),
                                      evaluation.values.begin() + static_cast<std::ptrdiff_t>(d * spd),
                                      evaluation.values.begin() + static_cast<std::ptrdiff_t>((d + 1) * spd));
    }
    return std::sqrt(sum / static_cast<double>(days * spd));
}

core::TimeSeries concat(const core::TimeSeries& a, const core::TimeSeries& b) {
    core::TimeSeries out = a;
    out.values.insert(out.values.end(), b.values.begin(), b.values.end());
    return out;
}

} // namespace

double daywise_rmse(const FittedModel& model, const core::TimeSeries& context, const core::TimeSeries& evaluation,
                    const Exogenous* exogenous) {
    return daywise(
        [&](const ForecastRequest& r) { return recursive_forecast(model, r).values; }, context, evaluation, exogenous);
}

double daywise_rmse(const EnsembleSpec& ensemble, const core::TimeSeries& context, const core::TimeSeries& evaluation,
                    const Exogenous* exogenous) {
    return daywise(
        [&](const ForecastRequest& r) { return ensemble_forecast(ensemble, r).combined.values; }, context, evaluation,
        exogenous);
}

std::vector<BaseModelSpec> default_grid(ModelKind kind) {
    std::vector<BaseModelSpec> g;
    switch (kind) {
    case ModelKind::arima:
        g = {arima_spec(1, 0, 0), arima_spec(2, 0, 0), arima_spec(2, 0, 1), arima_spec(1, 1, 0), arima_spec(2, 1, 1)};
        break;
    case ModelKind::prophet_lite:
        for (int cp : {5, 10}) {
            for (int f : {3, 6}) {
                g.push_back(prophet_spec(cp, f));
            }
        }
        break;
    case ModelKind::gbm:
        for (int depth : {3, 4}) {
            for (Transform t : {Transform::none, Transform::difference}) {
                g.push_back(gbm_spec(100, depth, 0.1, 1.0, t));
            }
        }
        break;
    case ModelKind::stack:
        for (Transform t : {Transform::none, Transform::difference}) {
            g.push_back(stack_spec({arima_spec(2, 0, 0), prophet_spec(10, 4), gbm_spec(100, 3)}, t));
        }
        break;
    case ModelKind::random_walk:
        g.push_back(random_walk_spec());
        break;
    case ModelKind::external:
        throw Error(ErrorCode::invalid_argument, "external models have no default grid");
    }
    return g;
}

GridSearchResult grid_search(const std::vector<BaseModelSpec>& grid, const core::TimeSeries& train,
                             const core::TimeSeries& validation, const Exogenous* exogenous) {
    if (grid.empty()) {
        throw Error(ErrorCode::invalid_argument, "grid search needs at least one candidate");
    }
    GridSearchResult result;
    result.best_val_rmse = std::numeric_limits<double>::infinity();
    bool found = false;
    std::string last_error;
    for (const auto& spec : grid) {
        Candidate c{spec, std::numeric_limits<double>::infinity()};
        try {
            FittedModel m = fit(spec, train, exogenous);
            c.val_rmse = daywise_rmse(m, train, validation, exogenous);
            if (std::isfinite(c.val_rmse) && (!found || c.val_rmse < result.best_val_rmse)) {
                result.best = std::move(m);
                result.best_val_rmse = c.val_rmse;
                found = true;
            }
        } catch (const Error& e) {
            last_error = spec.label() + ": " + e.what();
        }
        result.tried.push_back(std::move(c));
    }
    if (!found) {
        throw Error(ErrorCode::degenerate, "no candidate could be fitted; last failure " + last_error);
    }
    return result;
}

EnsembleSpec build_ensemble(const core::TimeSeries& train, const core::TimeSeries& validation,
                            const std::vector<ModelKind>& kinds, double p, const Exogenous* exogenous,
                            std::vector<GridSearchResult>* searches,
                            const std::map<ModelKind, std::vector<BaseModelSpec>>& grids) {
    if (kinds.empty()) {
        throw Error(ErrorCode::invalid_argument, "ensemble needs at least one model kind");
    }
    EnsembleSpec ensemble;
    ensemble.p = p;
    for (ModelKind kind : kinds) {
        auto it = grids.find(kind);
        GridSearchResult r = grid_search(it != grids.end() ? it->second : default_grid(kind), train, validation, exogenous);
        ensemble.members.push_back(r.best);
        ensemble.val_rmse.push_back(r.best_val_rmse);
        if (searches) {
            searches->push_back(std::move(r));
        }
    }
    ensemble.validate();
    return ensemble;
}

PipelineReport run_pipeline(const core::TimeSeries& series, const PipelineOptions& options,
                            const Exogenous* exogenous) {
    PipelineReport report;
    report.split = core::split(series, options.train_days, options.val_days, options.test_days);
    const auto& s = report.split;
    report.ensemble =
        build_ensemble(s.train, s.validation, options.kinds, options.p, exogenous, &report.searches, options.grids);
    const core::TimeSeries context = concat(s.train, s.validation);
    for (const auto& m : report.ensemble.members) {
        report.test_rmse[m.label()] = daywise_rmse(m, context, s.test, exogenous);
    }
    report.test_rmse["ensemble"] = daywise_rmse(report.ensemble, context, s.test, exogenous);
    report.test_rmse["random-walk"] = daywise_rmse(fit(random_walk_spec(), s.train), context, s.test, exogenous);
    return report;
}

} // namespace hometwin::forecasting
