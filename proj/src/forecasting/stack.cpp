#include "hometwin/forecasting/stack.hpp"

#include "forecasting/linalg.hpp"
#include "hometwin/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hometwin::forecasting {

StackPredictor::StackPredictor(std::vector<std::shared_ptr<const Predictor>> members, Eigen::VectorXd weights,
                               double intercept)
    : members_(std::move(members)), weights_(std::move(weights)), intercept_(intercept) {}

std::size_t StackPredictor::lag_window() const {
    std::size_t w = 0;
    for (const auto& m : members_) {
        w = std::max(w, m->lag_window());
    }
    return w;
}

double StackPredictor::predict(const SeriesView& view, std::size_t index) const {
    double y = intercept_;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        y += weights_(static_cast<Eigen::Index>(i)) * members_[i]->predict(view, index);
    }
    return y;
}

namespace {

std::shared_ptr<const Predictor> fit_member(const BaseModelSpec& member, const SeriesView& view,
                                            std::span<const std::size_t> rows, const std::string& where) {
    BaseModelSpec spec = member;
    spec.transform = Transform::none; // the stack view is already transformed
    try {
        return fit_predictor(spec, view, rows);
    } catch (const Error& e) {
        throw Error(e.code(), "stack member " + member.label() + " failed " + where + ": " + e.what());
    }
}

} // namespace

StackFit fit_stack_predictor(const std::vector<BaseModelSpec>& members, const SeriesView& view,
                             std::span<const std::size_t> rows, const StackOptions& options) {
    if (members.empty()) {
        throw Error(ErrorCode::invalid_argument, "stack needs at least one member");
    }
    if (options.folds < 2) {
        throw Error(ErrorCode::invalid_argument, "stack needs at least 2 folds");
    }
    std::vector<std::size_t> sorted;
    for (std::size_t r : rows) {
        if (r < view.values.size()) {
            sorted.push_back(r);
        }
    }
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const std::size_t k = static_cast<std::size_t>(options.folds);
    if (sorted.size() < k) {
        throw Error(ErrorCode::insufficient_data, "stack has fewer rows than folds");
    }

    StackDiagnostics d;
    d.rows = sorted;
    d.fold_of_row.resize(sorted.size());
    const std::size_t n = sorted.size();
    for (std::size_t i = 0; i < n; ++i) {
        d.fold_of_row[i] = static_cast<int>(i * k / n);
    }
    d.oof = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(members.size()),
                                      std::numeric_limits<double>::quiet_NaN());
    d.fold_train_rows.resize(k);

    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> train;
        std::vector<std::size_t> held;
        for (std::size_t i = 0; i < n; ++i) {
            (static_cast<std::size_t>(d.fold_of_row[i]) == f ? held : train).push_back(i);
        }
        for (std::size_t i : train) {
            d.fold_train_rows[f].push_back(sorted[i]);
        }
        for (std::size_t m = 0; m < members.size(); ++m) {
            auto p = fit_member(members[m], view, d.fold_train_rows[f], "on fold " + std::to_string(f));
            for (std::size_t i : held) {
                const std::size_t r = sorted[i];
                if (r >= p->lag_window()) {
                    d.oof(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = p->predict(view, r);
                }
            }
        }
    }

    std::vector<Eigen::Index> complete;
    for (Eigen::Index i = 0; i < d.oof.rows(); ++i) {
        if (d.oof.row(i).allFinite()) {
            complete.push_back(i);
        }
    }
    if (complete.size() <= members.size() + 1) {
        throw Error(ErrorCode::insufficient_data, "stack has too few out-of-fold rows for the meta model");
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(complete.size()), d.oof.cols());
    Eigen::VectorXd y(static_cast<Eigen::Index>(complete.size()));
    for (std::size_t j = 0; j < complete.size(); ++j) {
        x.row(static_cast<Eigen::Index>(j)) = d.oof.row(complete[j]);
        y(static_cast<Eigen::Index>(j)) = view.values[sorted[static_cast<std::size_t>(complete[j])]];
    }
    const detail::LinearFit meta = detail::ridge(x, y, options.ridge_lambda);
    d.meta_weights = meta.weights;
    d.meta_intercept = meta.intercept;

    std::vector<std::shared_ptr<const Predictor>> full;
    for (const auto& m : members) {
        full.push_back(fit_member(m, view, sorted, "on all rows"));
    }
    StackFit out;
    out.predictor = std::make_shared<StackPredictor>(std::move(full), meta.weights, meta.intercept);
    out.diagnostics = std::move(d);
    return out;
}

FittedModel stack(const std::vector<BaseModelSpec>& members, const core::TimeSeries& train, int folds,
                  Transform transform, const Exogenous* exogenous, StackDiagnostics* diagnostics) {
    const BaseModelSpec spec = stack_spec(members, transform, folds);
    spec.validate();
    if (train.size() < 2) {
        throw Error(ErrorCode::insufficient_data, "training series needs at least 2 values");
    }
    const TransformState state = make_transform(transform, train.values);
    const std::vector<double> z = state.apply(train.values);
    SeriesView view{z, train.start + core::Minutes{static_cast<std::int64_t>(state.offset()) * train.step_minutes},
                    train.step_minutes, exogenous};
    StackOptions options;
    options.folds = folds;
    StackFit f = fit_stack_predictor(members, view, all_rows(z.size()), options);
    if (diagnostics) {
        *diagnostics = std::move(f.diagnostics);
    }
    return wrap(spec, state, f.predictor, train);
}

} // namespace hometwin::forecasting
