#pragma once

#include "hometwin/forecasting/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hometwin::forecasting {

struct StackOptions {
    int folds = 5;
    double ridge_lambda = 1e-3;
};

/// Out-of-fold bookkeeping kept for auditing a stack.
struct StackDiagnostics {
    std::vector<std::size_t> rows;             // model-space sample indices
    std::vector<int> fold_of_row;              // parallel to rows
    Eigen::MatrixXd oof;                       // rows x members, NaN where missing
    std::vector<std::vector<std::size_t>> fold_train_rows; // per fold, rows the members were fit on
    Eigen::VectorXd meta_weights;
    double meta_intercept = 0.0;
};

/// Ridge combination of member one-step predictions.
class StackPredictor : public Predictor {
public:
    StackPredictor(std::vector<std::shared_ptr<const Predictor>> members, Eigen::VectorXd weights, double intercept);
    std::size_t lag_window() const override;
    double predict(const SeriesView& view, std::size_t index) const override;

    const Eigen::VectorXd& weights() const { return weights_; }
    double intercept() const { return intercept_; }

private:
    std::vector<std::shared_ptr<const Predictor>> members_;
    Eigen::VectorXd weights_;
    double intercept_;
};

struct StackFit {
    std::shared_ptr<const StackPredictor> predictor;
    StackDiagnostics diagnostics;
};

/// K contiguous folds over the usable rows; each member is fit on the other K-1
/// folds and predicts the held-out one. A ridge meta-regressor is fit on the
/// out-of-fold matrix, then members are refit on all rows.
/// Throws Error naming the member when a member fit fails.
StackFit fit_stack_predictor(const std::vector<BaseModelSpec>& members, const SeriesView& view,
                             std::span<const std::size_t> rows, const StackOptions& options);

/// Members inherit the stack transform; a member asking for a different
/// non-none transform is rejected.
FittedModel stack(const std::vector<BaseModelSpec>& members, const core::TimeSeries& train, int folds = 5,
                  Transform transform = Transform::none, const Exogenous* exogenous = nullptr,
                  StackDiagnostics* diagnostics = nullptr);

} // namespace hometwin::forecasting
