#include "hometwin/forecasting/model.hpp"

#include "hometwin/core/error.hpp"
#include "hometwin/forecasting/arima.hpp"
#include "hometwin/forecasting/gbm.hpp"
#include "hometwin/forecasting/prophet.hpp"
#include "hometwin/forecasting/stack.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

namespace hometwin::forecasting {

namespace {

class RandomWalkPredictor : public Predictor {
public:
    std::size_t lag_window() const override { return 1; }
    double predict(const SeriesView& view, std::size_t index) const override { return view.values[index - 1]; }
};

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::string, PredictorFitter>& registry() {
    static std::map<std::string, PredictorFitter> r;
    return r;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_keys(const BaseModelSpec& spec, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : spec.hyperparameters) {
        if (!ok.count(k)) {
            throw Error(ErrorCode::invalid_argument,
                        "unknown hyperparameter '" + k + "' for " + std::string(to_string(spec.kind)));
        }
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::invalid_argument, "hyperparameter '" + k + "' must be finite");
        }
    }
}

void require_int_range(const BaseModelSpec& spec, const char* key, double fallback, double lo, double hi) {
    const double v = spec.param(key, fallback);
    if (v != std::floor(v) || v < lo || v > hi) {
        throw Error(ErrorCode::invalid_argument, std::string(to_string(spec.kind)) + ": " + key + " must be an integer in [" +
                                                     fmt(lo) + ", " + fmt(hi) + "], got " + fmt(v));
    }
}

} // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::arima:
        return "arima";
    case ModelKind::prophet_lite:
        return "prophet-lite";
    case ModelKind::gbm:
        return "gbm";
    case ModelKind::random_walk:
        return "random-walk";
    case ModelKind::stack:
        return "stack";
    case ModelKind::external:
        return "external";
    }
    return "?";
}

std::string_view to_string(Transform transform) {
    switch (transform) {
    case Transform::none:
        return "none";
    case Transform::difference:
        return "difference";
    case Transform::standardize:
        return "standardize";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    if (text == "arima") return ModelKind::arima;
    if (text == "prophet" || text == "prophet-lite") return ModelKind::prophet_lite;
    if (text == "gbm") return ModelKind::gbm;
    if (text == "random-walk" || text == "baseline") return ModelKind::random_walk;
    if (text == "stack") return ModelKind::stack;
    if (text == "external") return ModelKind::external;
    return std::nullopt;
}

std::optional<Transform> parse_transform(std::string_view text) {
    if (text == "none") return Transform::none;
    if (text == "difference" || text == "diff") return Transform::difference;
    if (text == "standardize" || text == "std") return Transform::standardize;
    return std::nullopt;
}

void Exogenous::add(core::TimeSeries series) {
    const std::string id = series.sensor_id;
    if (id.empty() || series.empty()) {
        throw Error(ErrorCode::invalid_argument, "exogenous series needs an id and values");
    }
    series_[id] = std::move(series);
}

std::vector<std::string> Exogenous::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : series_) {
        out.push_back(k);
    }
    return out;
}

double Exogenous::value_at(const std::string& name, core::Timestamp t) const {
    auto it = series_.find(name);
    if (it == series_.end()) {
        throw Error(ErrorCode::not_found, "exogenous series '" + name + "' not provided");
    }
    const std::size_t i = it->second.index_of(t);
    if (i == core::TimeSeries::npos) {
        throw Error(ErrorCode::out_of_range, "exogenous series '" + name + "' has no value at " + t.to_string());
    }
    return it->second.values[i];
}

double BaseModelSpec::param(const std::string& key, double fallback) const {
    auto it = hyperparameters.find(key);
    return it == hyperparameters.end() ? fallback : it->second;
}

void BaseModelSpec::validate() const {
    if (!exogenous.empty() && kind != ModelKind::prophet_lite) {
        throw Error(ErrorCode::invalid_argument, "only prophet-lite accepts exogenous columns");
    }
    if (kind != ModelKind::stack && !members.empty()) {
        throw Error(ErrorCode::invalid_argument, "only stack specs take members");
    }
    switch (kind) {
    case ModelKind::arima:
        require_keys(*this, {"p", "d", "q"});
        require_int_range(*this, "p", 1, 0, 8);
        require_int_range(*this, "d", 0, 0, 2);
        require_int_range(*this, "q", 0, 0, 8);
        break;
    case ModelKind::prophet_lite:
        require_keys(*this, {"changepoints", "fourier", "ridge"});
        require_int_range(*this, "changepoints", 10, 0, 100);
        require_int_range(*this, "fourier", 4, 0, 24);
        if (param("ridge", 1e-3) < 0.0) {
            throw Error(ErrorCode::invalid_argument, "prophet-lite: ridge must be >= 0");
        }
        break;
    case ModelKind::gbm: {
        require_keys(*this, {"trees", "depth", "learning_rate", "subsample", "seed"});
        require_int_range(*this, "trees", 100, 1, 100000);
        require_int_range(*this, "depth", 3, 1, 6);
        require_int_range(*this, "seed", 1, 0, 9.0e15);
        const double lr = param("learning_rate", 0.1);
        const double ss = param("subsample", 1.0);
        if (!(lr > 0.0 && lr <= 1.0)) {
            throw Error(ErrorCode::invalid_argument, "gbm: learning_rate must lie in (0, 1]");
        }
        if (!(ss > 0.0 && ss <= 1.0)) {
            throw Error(ErrorCode::invalid_argument, "gbm: subsample must lie in (0, 1]");
        }
        break;
    }
    case ModelKind::random_walk:
        require_keys(*this, {});
        break;
    case ModelKind::stack:
        require_keys(*this, {"folds", "ridge"});
        require_int_range(*this, "folds", 5, 2, 100);
        if (param("ridge", 1e-3) < 0.0) {
            throw Error(ErrorCode::invalid_argument, "stack: ridge must be >= 0");
        }
        if (members.empty()) {
            throw Error(ErrorCode::invalid_argument, "stack needs at least one member");
        }
        for (const auto& m : members) {
            if (m.kind == ModelKind::stack) {
                throw Error(ErrorCode::invalid_argument, "stacks cannot be nested");
            }
            m.validate();
            if (m.transform != Transform::none && m.transform != transform) {
                throw Error(ErrorCode::invalid_argument, "stack member " + m.label() + " asks for transform " +
                                                             std::string(to_string(m.transform)) +
                                                             " but the stack uses " + std::string(to_string(transform)));
            }
        }
        break;
    case ModelKind::external:
        if (external_name.empty()) {
            throw Error(ErrorCode::invalid_argument, "external model needs a registered name");
        }
        break;
    }
}

std::string BaseModelSpec::label() const {
    std::string s;
    switch (kind) {
    case ModelKind::arima:
        s = "arima(" + fmt(param("p", 1)) + "," + fmt(param("d", 0)) + "," + fmt(param("q", 0)) + ")";
        break;
    case ModelKind::prophet_lite:
        s = "prophet(" + fmt(param("changepoints", 10)) + "," + fmt(param("fourier", 4)) + ")";
        break;
    case ModelKind::gbm:
        s = "gbm(" + fmt(param("trees", 100)) + "," + fmt(param("depth", 3)) + "," + fmt(param("learning_rate", 0.1)) + ")";
        break;
    case ModelKind::random_walk:
        s = "random-walk";
        break;
    case ModelKind::stack: {
        s = "stack[";
        for (std::size_t i = 0; i < members.size(); ++i) {
            s += (i ? "+" : "") + members[i].label();
        }
        s += "]";
        break;
    }
    case ModelKind::external:
        s = "external:" + external_name;
        break;
    }
    if (transform == Transform::difference) {
        s += "/diff";
    } else if (transform == Transform::standardize) {
        s += "/std";
    }
    return s;
}

BaseModelSpec arima_spec(int p, int d, int q, Transform transform) {
    BaseModelSpec s;
    s.kind = ModelKind::arima;
    s.hyperparameters = {{"p", p}, {"d", d}, {"q", q}};
    s.transform = transform;
    return s;
}

BaseModelSpec prophet_spec(int changepoints, int fourier, double ridge, Transform transform) {
    BaseModelSpec s;
    s.kind = ModelKind::prophet_lite;
    s.hyperparameters = {{"changepoints", changepoints}, {"fourier", fourier}, {"ridge", ridge}};
    s.transform = transform;
    return s;
}

BaseModelSpec gbm_spec(int trees, int depth, double learning_rate, double subsample, Transform transform) {
    BaseModelSpec s;
    s.kind = ModelKind::gbm;
    s.hyperparameters = {{"trees", trees}, {"depth", depth}, {"learning_rate", learning_rate}, {"subsample", subsample}};
    s.transform = transform;
    return s;
}

BaseModelSpec random_walk_spec() { return BaseModelSpec{}; }

BaseModelSpec stack_spec(std::vector<BaseModelSpec> members, Transform transform, int folds) {
    BaseModelSpec s;
    s.kind = ModelKind::stack;
    s.hyperparameters = {{"folds", folds}};
    s.transform = transform;
    s.members = std::move(members);
    return s;
}

void register_external_model(const std::string& name, PredictorFitter fitter) {
    std::lock_guard lock(registry_mutex());
    registry()[name] = std::move(fitter);
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

std::shared_ptr<const Predictor> fit_predictor(const BaseModelSpec& spec, const SeriesView& view,
                                               std::span<const std::size_t> rows) {
    spec.validate();
    switch (spec.kind) {
    case ModelKind::arima:
        return fit_arima_predictor(view, rows, static_cast<int>(spec.param("p", 1)), static_cast<int>(spec.param("d", 0)),
                                   static_cast<int>(spec.param("q", 0)));
    case ModelKind::prophet_lite: {
        ProphetOptions o;
        o.changepoints = static_cast<int>(spec.param("changepoints", 10));
        o.fourier_daily = static_cast<int>(spec.param("fourier", 4));
        o.ridge_lambda = spec.param("ridge", 1e-3);
        o.exogenous = spec.exogenous;
        return fit_prophet_predictor(view, rows, o);
    }
    case ModelKind::gbm: {
        GbmParams g;
        g.n_trees = static_cast<int>(spec.param("trees", 100));
        g.depth = static_cast<int>(spec.param("depth", 3));
        g.learning_rate = spec.param("learning_rate", 0.1);
        g.subsample = spec.param("subsample", 1.0);
        g.seed = static_cast<std::uint64_t>(spec.param("seed", 1));
        return fit_gbm_forecaster(view, rows, g);
    }
    case ModelKind::random_walk:
        return std::make_shared<RandomWalkPredictor>();
    case ModelKind::stack: {
        StackOptions o;
        o.folds = static_cast<int>(spec.param("folds", 5));
        o.ridge_lambda = spec.param("ridge", 1e-3);
        return fit_stack_predictor(spec.members, view, rows, o).predictor;
    }
    case ModelKind::external: {
        PredictorFitter fitter;
        {
            std::lock_guard lock(registry_mutex());
            auto it = registry().find(spec.external_name);
            if (it == registry().end()) {
                throw Error(ErrorCode::not_found, "external model '" + spec.external_name + "' is not registered");
            }
            fitter = it->second;
        }
        auto p = fitter(spec, view, rows);
        if (!p) {
            throw Error(ErrorCode::degenerate, "external model '" + spec.external_name + "' returned no predictor");
        }
        return p;
    }
    }
    throw Error(ErrorCode::invalid_argument, "unknown model kind");
}

std::vector<double> TransformState::apply(std::span<const double> raw) const {
    std::vector<double> out;
    switch (kind) {
    case Transform::none:
        out.assign(raw.begin(), raw.end());
        break;
    case Transform::standardize:
        out.reserve(raw.size());
        for (double x : raw) {
            out.push_back((x - mean) / std);
        }
        break;
    case Transform::difference:
        out = raw.size() >= 2 ? core::difference_values(raw, 1) : std::vector<double>{};
        break;
    }
    return out;
}

double TransformState::invert_one(double z, std::span<const double> raw, std::size_t index) const {
    switch (kind) {
    case Transform::none:
        return z;
    case Transform::standardize:
        return z * std + mean;
    case Transform::difference:
        return raw[index - 1] + z;
    }
    return z;
}

std::vector<double> TransformState::invert_path(std::span<const double> z, std::span<const double> raw) const {
    std::vector<double> out(z.begin(), z.end());
    if (kind == Transform::standardize) {
        for (double& x : out) {
            x = x * std + mean;
        }
    } else if (kind == Transform::difference) {
        double level = raw.back();
        for (double& x : out) {
            level += x;
            x = level;
        }
    }
    return out;
}

TransformState make_transform(Transform kind, std::span<const double> train_raw) {
    TransformState t;
    t.kind = kind;
    if (kind == Transform::standardize) {
        t.mean = core::mean_of(train_raw);
        t.std = core::population_std(train_raw, t.mean);
        if (!(t.std > 1e-12 * std::max(1.0, std::abs(t.mean)))) {
            throw Error(ErrorCode::degenerate, "zero variance");
        }
    }
    return t;
}

std::size_t FittedModel::required_history() const {
    return std::max<std::size_t>(1, predictor->lag_window() + transform.offset());
}

FittedModel wrap(const BaseModelSpec& spec, const TransformState& transform, std::shared_ptr<const Predictor> predictor,
                 const core::TimeSeries& train) {
    FittedModel m;
    m.spec = spec;
    m.transform = transform;
    m.predictor = std::move(predictor);
    m.sensor_id = train.sensor_id;
    m.unit = train.unit;
    m.step_minutes = train.step_minutes;
    m.train_start = train.start;
    m.train_end = train.last_time();
    m.train_size = train.size();
    return m;
}

FittedModel fit(const BaseModelSpec& spec, const core::TimeSeries& train, const Exogenous* exogenous) {
    spec.validate();
    if (train.size() < 2) {
        throw Error(ErrorCode::insufficient_data, "training series needs at least 2 values");
    }
    const TransformState transform = make_transform(spec.transform, train.values);
    const std::vector<double> z = transform.apply(train.values);
    SeriesView view{z, train.start + core::Minutes{static_cast<std::int64_t>(transform.offset()) * train.step_minutes},
                    train.step_minutes, exogenous};
    const auto rows = all_rows(z.size());
    return wrap(spec, transform, fit_predictor(spec, view, rows), train);
}

core::TimeSeries recursive_forecast(const FittedModel& model, const ForecastRequest& request) {
    const core::TimeSeries& h = request.history;
    core::TimeSeries out;
    out.sensor_id = h.sensor_id.empty() ? model.sensor_id : h.sensor_id;
    out.unit = model.unit;
    out.step_minutes = h.step_minutes;
    out.start = h.empty() ? h.start : h.last_time() + core::Minutes{h.step_minutes};
    if (request.horizon_steps == 0) {
        return out;
    }
    if (h.step_minutes != model.step_minutes) {
        throw Error(ErrorCode::invalid_argument, "history step differs from the model's training step");
    }
    if (h.size() < model.required_history()) {
        throw Error(ErrorCode::insufficient_data, "history has " + std::to_string(h.size()) + " steps, model " +
                                                      model.label() + " needs " +
                                                      std::to_string(model.required_history()));
    }
    std::vector<double> buffer = model.transform.apply(h.values);
    const std::size_t known = buffer.size();
    buffer.reserve(known + request.horizon_steps);
    SeriesView view{{}, h.start + core::Minutes{static_cast<std::int64_t>(model.transform.offset()) * h.step_minutes},
                    h.step_minutes, request.exogenous};
    for (std::size_t k = 0; k < request.horizon_steps; ++k) {
        view.values = std::span<const double>(buffer.data(), buffer.size());
        const double z = model.predictor->predict(view, buffer.size());
        if (!std::isfinite(z)) {
            throw Error(ErrorCode::degenerate, "model " + model.label() + " produced a non-finite forecast");
        }
        buffer.push_back(z);
    }
    out.values = model.transform.invert_path(std::span<const double>(buffer).subspan(known), h.values);
    return out;
}

std::vector<double> one_step_predictions(const FittedModel& model, const core::TimeSeries& series, std::size_t first,
                                         const Exogenous* exogenous) {
    if (first < model.predictor->lag_window() + model.transform.offset()) {
        throw Error(ErrorCode::insufficient_data, "first predicted index must leave the model's lag window");
    }
    const std::vector<double> z = model.transform.apply(series.values);
    const std::size_t off = model.transform.offset();
    SeriesView view{z, series.start + core::Minutes{static_cast<std::int64_t>(off) * series.step_minutes},
                    series.step_minutes, exogenous};
    std::vector<double> out;
    for (std::size_t i = first; i < series.size(); ++i) {
        out.push_back(model.transform.invert_one(model.predictor->predict(view, i - off), series.values, i));
    }
    return out;
}

} // namespace hometwin::forecasting
