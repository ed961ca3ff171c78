#pragma once

#include "hometwin/core/series.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hometwin::forecasting {

enum class ModelKind { arima, prophet_lite, gbm, random_walk, stack, external };
enum class Transform { none, difference, standardize };

std::string_view to_string(ModelKind kind);
std::string_view to_string(Transform transform);
std::optional<ModelKind> parse_model_kind(std::string_view text); // accepts "prophet" too
std::optional<Transform> parse_transform(std::string_view text);

/// Named side series (e.g. an outdoor temperature forecast) looked up by time.
class Exogenous {
public:
    void add(core::TimeSeries series);
    bool empty() const { return series_.empty(); }
    std::vector<std::string> names() const;
    bool contains(const std::string& name) const { return series_.count(name) != 0; }
    /// Value on the series grid at `t`. Throws Error(out_of_range) outside the series.
    double value_at(const std::string& name, core::Timestamp t) const;

private:
    std::map<std::string, core::TimeSeries> series_;
};

/// A model's working data in transformed space. `values` may extend past the
/// index being predicted; predictors only read entries before it.
struct SeriesView {
    std::span<const double> values;
    core::Timestamp start;
    int step_minutes = 5;
    const Exogenous* exogenous = nullptr;

    core::Timestamp time_at(std::size_t i) const {
        return start + core::Minutes{static_cast<std::int64_t>(i) * step_minutes};
    }
};

/// One-step-ahead predictor in transformed space.
class Predictor {
public:
    virtual ~Predictor() = default;
    /// Number of earlier values `predict` needs.
    virtual std::size_t lag_window() const = 0;
    /// Prediction of values[index] from values[0, index). `index` may equal values.size().
    virtual double predict(const SeriesView& view, std::size_t index) const = 0;
};

/// Hyperparameters per kind (defaults in parentheses):
///   arima         p (1), d (0), q (0)
///   prophet-lite  changepoints (10), fourier (4), ridge (1e-3), exogenous columns by name in `exogenous`
///   gbm           trees (100), depth (3), learning_rate (0.1), subsample (1), seed (1)
///   random-walk   none
///   stack         folds (5), ridge (1e-3); members in `members`
///   external      anything; resolved through register_external_model(external_name)
struct BaseModelSpec {
    ModelKind kind = ModelKind::random_walk;
    std::map<std::string, double> hyperparameters;
    Transform transform = Transform::none;
    std::vector<std::string> exogenous;
    std::vector<BaseModelSpec> members;
    std::string external_name;

    double param(const std::string& key, double fallback) const;
    /// Throws Error(invalid_argument) on unknown keys or out-of-range values.
    void validate() const;
    /// Compact identity such as `arima(2,0,1)/none`.
    std::string label() const;
};

BaseModelSpec arima_spec(int p, int d, int q, Transform transform = Transform::none);
BaseModelSpec prophet_spec(int changepoints = 10, int fourier = 4, double ridge = 1e-3,
                           Transform transform = Transform::none);
BaseModelSpec gbm_spec(int trees = 100, int depth = 3, double learning_rate = 0.1, double subsample = 1.0,
                       Transform transform = Transform::none);
BaseModelSpec random_walk_spec();
BaseModelSpec stack_spec(std::vector<BaseModelSpec> members, Transform transform = Transform::none, int folds = 5);

/// Fits a predictor whose targets are values[r] for r in `rows`. Rows whose lag
/// window is not available are ignored.
using PredictorFitter = std::function<std::shared_ptr<const Predictor>(const BaseModelSpec&, const SeriesView&,
                                                                       std::span<const std::size_t> rows)>;

void register_external_model(const std::string& name, PredictorFitter fitter);

std::shared_ptr<const Predictor> fit_predictor(const BaseModelSpec& spec, const SeriesView& view,
                                               std::span<const std::size_t> rows);
/// All rows from the predictor-independent start (0) to the end.
std::vector<std::size_t> all_rows(std::size_t n);

struct TransformState {
    Transform kind = Transform::none;
    double mean = 0.0;
    double std = 1.0;

    /// Raw values to model space. Difference drops the first value.
    std::vector<double> apply(std::span<const double> raw) const;
    /// Offset of transformed index 0 relative to raw index 0.
    std::size_t offset() const { return kind == Transform::difference ? 1 : 0; }
    /// Model-space prediction of raw[index] back to raw units.
    double invert_one(double z, std::span<const double> raw, std::size_t index) const;
    /// Model-space continuation after the end of `raw` back to raw units.
    std::vector<double> invert_path(std::span<const double> z, std::span<const double> raw) const;
};

TransformState make_transform(Transform kind, std::span<const double> train_raw);

struct FittedModel {
    BaseModelSpec spec;
    TransformState transform;
    std::shared_ptr<const Predictor> predictor;
    std::string sensor_id;
    core::Unit unit = core::Unit::celsius;
    int step_minutes = 5;
    core::Timestamp train_start;
    core::Timestamp train_end; // last training timestamp
    std::size_t train_size = 0;

    /// Raw history needed before the first forecast step.
    std::size_t required_history() const;
    std::string label() const { return spec.label(); }
};

/// Fits `spec` on the whole training series.
FittedModel fit(const BaseModelSpec& spec, const core::TimeSeries& train, const Exogenous* exogenous = nullptr);
/// Wraps an already-fitted predictor.
FittedModel wrap(const BaseModelSpec& spec, const TransformState& transform, std::shared_ptr<const Predictor> predictor,
                 const core::TimeSeries& train);

struct ForecastRequest {
    core::TimeSeries history;
    std::size_t horizon_steps = 288;
    const Exogenous* exogenous = nullptr;
};

/// Feeds one-step predictions back as inputs `horizon_steps` times, in model
/// space, then inverts the transform. The result starts one step after history.
core::TimeSeries recursive_forecast(const FittedModel& model, const ForecastRequest& request);

/// Raw-unit one-step-ahead predictions of series.values[i] for i in [first, size).
std::vector<double> one_step_predictions(const FittedModel& model, const core::TimeSeries& series, std::size_t first,
                                         const Exogenous* exogenous = nullptr);

} // namespace hometwin::forecasting
