#pragma once

#include "hometwin/forecasting/ensemble.hpp"
#include "hometwin/forecasting/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace hometwin::forecasting {

/// Day-wise multi-step score: for each whole day of `evaluation`, forecast one
/// day from everything before it (`context` followed by earlier evaluation days)
/// and pool the squared errors.
double daywise_rmse(const FittedModel& model, const core::TimeSeries& context, const core::TimeSeries& evaluation,
                    const Exogenous* exogenous = nullptr);

/// Same protocol for an ensemble.
double daywise_rmse(const EnsembleSpec& ensemble, const core::TimeSeries& context, const core::TimeSeries& evaluation,
                    const Exogenous* exogenous = nullptr);

/// Candidate grids:
///   arima    (p,d,q) in {(1,0,0), (2,0,0), (2,0,1), (1,1,0), (2,1,1)}
///   prophet  changepoints {5, 10} x fourier {3, 6}, ridge 1e-3
///   gbm      depth {3, 4} x transform {none, difference}, 100 trees, lr 0.1
///   stack    members {arima(2,0,0), prophet(10,4), gbm(100,3)} x transform {none, difference}
///   random-walk  single candidate
std::vector<BaseModelSpec> default_grid(ModelKind kind);

struct Candidate {
    BaseModelSpec spec;
    double val_rmse = 0.0;
};

struct GridSearchResult {
    FittedModel best;
    double best_val_rmse = 0.0;
    std::vector<Candidate> tried;
};

/// Fits every candidate on `train`, scores it day-wise on `validation`, keeps the best.
GridSearchResult grid_search(const std::vector<BaseModelSpec>& grid, const core::TimeSeries& train,
                             const core::TimeSeries& validation, const Exogenous* exogenous = nullptr);

struct PipelineOptions {
    std::vector<ModelKind> kinds = {ModelKind::arima, ModelKind::prophet_lite, ModelKind::gbm, ModelKind::stack};
    int train_days = 70;
    int val_days = 10;
    int test_days = 10;
    double p = 2.0;
    std::map<ModelKind, std::vector<BaseModelSpec>> grids; // overrides default_grid per kind
};

struct PipelineReport {
    core::DatasetSplit split;
    std::vector<GridSearchResult> searches; // one per kind
    EnsembleSpec ensemble;
    std::map<std::string, double> test_rmse; // per member label, plus "ensemble" and "random-walk"
};

/// Split, grid-search each kind, weight members by validation RMSE and score on test.
PipelineReport run_pipeline(const core::TimeSeries& series, const PipelineOptions& options,
                            const Exogenous* exogenous = nullptr);

/// Grid search and ensemble on `train`/`validation` only (no test scoring).
EnsembleSpec build_ensemble(const core::TimeSeries& train, const core::TimeSeries& validation,
                            const std::vector<ModelKind>& kinds, double p, const Exogenous* exogenous = nullptr,
                            std::vector<GridSearchResult>* searches = nullptr,
                            const std::map<ModelKind, std::vector<BaseModelSpec>>& grids = {});

} // namespace hometwin::forecasting
