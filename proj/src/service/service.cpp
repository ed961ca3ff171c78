#include "hometwin/service/service.hpp"

#include "hometwin/core/csv.hpp"
#include "hometwin/core/error.hpp"
#include "hometwin/diagnostics/heatmap.hpp"
#include "hometwin/diagnostics/occupancy.hpp"
#include "hometwin/forecasting/pipeline.hpp"
#include "hometwin/ingestion/simulator.hpp"
#include "hometwin/recommender/ubcf.hpp"
#include "hometwin/solar/solar.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace hometwin::service {

namespace {

constexpr int kGridMinutes = 5;

const std::string* param(const Request& r, const std::string& key) {
    auto it = r.query.find(key);
    return it == r.query.end() || it->second.empty() ? nullptr : &it->second;
}

const std::string& required(const Request& r, const std::string& key) {
    const auto* v = param(r, key);
    if (!v) {
        throw Error(ErrorCode::invalid_argument, "missing query parameter '" + key + "'");
    }
    return *v;
}

long long parse_integer(const std::string& text, const std::string& what) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::invalid_argument, what + " expects an integer, got '" + text + "'");
    }
    return v;
}

core::Timestamp parse_time(const std::string& text, const std::string& what) {
    try {
        return core::Timestamp::parse(text);
    } catch (const Error& e) {
        throw Error(ErrorCode::invalid_argument, what + ": " + e.what());
    }
}

double hours_of(const std::string& hhmm) {
    int h = -1, m = -1;
    char tail = 0;
    if (std::sscanf(hhmm.c_str(), "%d:%d%c", &h, &m, &tail) != 2 || h < 0 || h > 23 || m < 0 || m > 59) {
        throw Error(ErrorCode::invalid_argument, "time expects HH:MM (UTC), got '" + hhmm + "'");
    }
    return h + m / 60.0;
}

Json time_or_null(const std::optional<core::Timestamp>& t) { return t ? Json(t->to_string()) : Json(nullptr); }

core::Unit unit_of(const core::HouseModel& house, const std::string& id) {
    if (const auto* s = house.find_sensor(id)) {
        return core::default_unit(s->kind);
    }
    return core::Unit::celsius;
}

std::vector<forecasting::ModelKind> parse_models(const std::vector<std::string>& names) {
    std::vector<forecasting::ModelKind> kinds;
    for (const auto& n : names) {
        const auto k = forecasting::parse_model_kind(n);
        if (!k || *k == forecasting::ModelKind::external) {
            throw Error(ErrorCode::invalid_argument, "unknown model '" + n + "'");
        }
        if (std::find(kinds.begin(), kinds.end(), *k) == kinds.end()) {
            kinds.push_back(*k);
        }
    }
    if (kinds.empty()) {
        throw Error(ErrorCode::invalid_argument, "no models requested");
    }
    return kinds;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::string models_key(const std::vector<forecasting::ModelKind>& kinds) {
    std::string key;
    for (auto k : kinds) {
        key += std::string(forecasting::to_string(k)) + ",";
    }
    return key;
}

// every grid point of `s` between the given bounds, as a fresh series
core::TimeSeries window(const core::TimeSeries& s, core::Timestamp from, core::Timestamp to) {
    const std::size_t a = s.index_of(from);
    const std::size_t b = s.index_of(to);
    if (a == core::TimeSeries::npos || b == core::TimeSeries::npos || b < a) {
        throw Error(ErrorCode::invalid_argument, "series '" + s.sensor_id + "' is not on the shared grid");
    }
    return s.slice(a, b - a + 1);
}

double history_days(const std::vector<core::Sample>& samples) {
    if (samples.size() < 2) {
        return 0.0;
    }
    return static_cast<double>((samples.back().time - samples.front().time).count()) / core::kMinutesPerDay;
}

} // namespace

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::not_found:
        return 404;
    case ErrorCode::unavailable:
        return 503;
    default:
        return 422;
    }
}

Json sun_document(const core::HouseModel& house, const core::CivilDate& date, const std::string& time) {
    const double hours = hours_of(time);
    const auto r = solar::sun_horizontal({date, hours, house.longitude, house.latitude});
    const auto& i = r.intermediates;
    Json doc;
    doc["date"] = date.to_string();
    doc["time"] = time;
    doc["latitude"] = house.latitude;
    doc["longitude"] = house.longitude;
    doc["azimuth_deg"] = r.azimuth_deg;
    doc["altitude_deg"] = r.altitude_deg;
    doc["intermediates"] = {{"jd", i.jd},
                            {"jc", i.jc},
                            {"jd_d", i.jd_d},
                            {"jc_d", i.jc_d},
                            {"t_sr", i.t_sr},
                            {"t_srut", i.t_srut},
                            {"t_lsr", i.t_lsr},
                            {"mean_longitude", i.mean_longitude},
                            {"mean_anomaly", i.mean_anomaly},
                            {"equation_of_center", i.equation_of_center},
                            {"ecliptic_longitude", i.ecliptic_longitude},
                            {"ecliptic_latitude", i.ecliptic_latitude},
                            {"obliquity", i.obliquity},
                            {"right_ascension", i.right_ascension},
                            {"declination", i.declination},
                            {"hour_angle", i.hour_angle}};
    return doc;
}

Json sun_hours_document(const core::HouseModel& house, int year, const solar::HorizonMask* mask) {
    if (year < 1901 || year > 2099) {
        throw Error(ErrorCode::invalid_argument, "year must lie in [1901, 2099]");
    }
    Json doc;
    doc["year"] = year;
    doc["latitude"] = house.latitude;
    doc["longitude"] = house.longitude;
    doc["horizon_mask"] = mask != nullptr;
    Json months = Json::array();
    for (const auto& m : solar::monthly_sun_hours(year, house, mask)) {
        months.push_back({{"date", m.date.to_string()},
                          {"first_lit", time_or_null(m.first_lit)},
                          {"last_lit", time_or_null(m.last_lit)},
                          {"lit_minutes", m.lit_minutes}});
    }
    doc["months"] = std::move(months);
    return doc;
}

ForecastOutcome forecast_series(const core::TimeSeries& history, std::size_t horizon,
                                const std::vector<forecasting::ModelKind>& kinds, const ForecastSettings& settings) {
    if (history.step_minutes != kGridMinutes) {
        throw Error(ErrorCode::invalid_argument, "forecasting expects a 5-minute grid");
    }
    const std::size_t per_day = static_cast<std::size_t>(history.steps_per_day());
    const std::size_t val = static_cast<std::size_t>(settings.val_days) * per_day;
    if (history.size() < static_cast<std::size_t>(settings.min_history_days) * per_day) {
        throw Error(ErrorCode::insufficient_data, "sensor '" + history.sensor_id + "' has " +
                                                      std::to_string(history.size() / per_day) + " of " +
                                                      std::to_string(settings.min_history_days) +
                                                      " days needed to forecast");
    }
    const auto train = history.slice(0, history.size() - val);
    const auto validation = history.slice(history.size() - val, val);

    std::map<forecasting::ModelKind, std::vector<forecasting::BaseModelSpec>> grids;
    auto stack_grid = forecasting::default_grid(forecasting::ModelKind::stack);
    for (auto& spec : stack_grid) {
        spec.hyperparameters["folds"] = settings.folds;
    }
    grids[forecasting::ModelKind::stack] = std::move(stack_grid);

    ForecastOutcome out;
    out.ensemble = forecasting::build_ensemble(train, validation, kinds, settings.p, nullptr, nullptr, grids);
    out.forecast = forecasting::ensemble_forecast(out.ensemble, {history, horizon, nullptr});
    return out;
}

Json forecast_document(const ForecastOutcome& o) {
    const auto& c = o.forecast.combined;
    const auto weights = o.ensemble.normalized_weights();
    Json doc;
    doc["sensor"] = c.sensor_id;
    doc["unit"] = std::string(core::to_string(c.unit));
    doc["step_minutes"] = c.step_minutes;
    doc["horizon"] = c.size();
    doc["start"] = c.start.to_string();
    Json models = Json::array();
    for (std::size_t m = 0; m < o.ensemble.members.size(); ++m) {
        models.push_back({{"label", o.ensemble.members[m].label()},
                          {"val_rmse", o.ensemble.val_rmse[m]},
                          {"weight", weights[m]}});
    }
    doc["models"] = std::move(models);
    Json rows = Json::array();
    for (std::size_t k = 0; k < c.size(); ++k) {
        Json members = Json::array();
        for (const auto& m : o.forecast.members) {
            members.push_back(m.values[k]);
        }
        rows.push_back({{"t", c.time_at(k).to_string()}, {"value", c.values[k]}, {"members", std::move(members)}});
    }
    doc["rows"] = std::move(rows);
    return doc;
}

core::TimeSeries sensor_series(const ingestion::StoreSnapshot& snapshot, const core::HouseModel& house,
                               const std::string& sensor_id) {
    if (!snapshot.contains(sensor_id)) {
        throw Error(ErrorCode::not_found, "no data for sensor '" + sensor_id + "'");
    }
    const auto raw = snapshot.all(sensor_id);
    return core::resample(raw, kGridMinutes, {}, sensor_id, unit_of(house, sensor_id));
}

TwinService::TwinService(TwinConfig config)
    : config_(std::move(config)), trainings_(config_.listen.max_trainings) {
    config_.validate();
    if (!config_.horizon_mask.empty()) {
        mask_ = solar::HorizonMask::load(config_.horizon_mask);
    }
    if (!config_.recommender.behavior_matrix.empty()) {
        try {
            behavior_ = recommender::load_behavior_csv(config_.recommender.behavior_matrix);
        } catch (const Error& e) {
            throw Error(ErrorCode::config, std::string("behavior matrix: ") + e.what());
        }
    }
    if (!config_.store.path.empty() && config_.store.persist) {
        store_.load(config_.store.path);
    }
}

TwinService::~TwinService() { stop_sources(); }

void TwinService::start_sources() {
    for (const auto& s : config_.sources) {
        tasks_.push_back(std::make_unique<ingestion::SourceTask>(s, store_));
        tasks_.back()->start();
    }
}

void TwinService::stop_sources() {
    for (auto& t : tasks_) {
        t->stop();
    }
}

bool TwinService::warming_up() const {
    if (tasks_.empty() || store_.version() != 0) {
        return false;
    }
    return std::any_of(tasks_.begin(), tasks_.end(), [](const auto& t) { return !t->status().finished.load(); });
}

void TwinService::save() const {
    if (!config_.store.path.empty() && config_.store.persist) {
        store_.save(config_.store.path);
    }
}

CapabilityInputs TwinService::capability_inputs() const { return inputs_for(*store_.snapshot()); }

CapabilityInputs TwinService::inputs_for(const ingestion::StoreSnapshot& snap) const {
    CapabilityInputs in;
    in.house_valid = true;
    in.sources = config_.sources.size();
    in.min_history_days = config_.forecasting.min_history_days;
    for (const auto& s : config_.house.sensors) {
        if (s.kind != core::SensorKind::temperature) {
            continue;
        }
        if (!s.room.empty()) {
            ++in.mapped_temperature;
        }
        if (snap.contains(s.id)) {
            in.history_days = std::max(in.history_days, history_days(snap.all(s.id)));
        }
    }
    if (behavior_) {
        if (std::find(behavior_->users.begin(), behavior_->users.end(), config_.recommender.user) !=
            behavior_->users.end()) {
            in.behavior_events = behavior_->event_count(config_.recommender.user);
        }
    }
    return in;
}

CapabilityReport TwinService::capability() const { return assess_capability(capability_inputs()); }

Json TwinService::snapshot_info(const ingestion::StoreSnapshot& snapshot) const {
    const auto span = snapshot.time_span();
    return {{"version", snapshot.version()}, {"latest", span ? Json(span->second.to_string()) : Json(nullptr)}};
}

Response TwinService::json_response(Json body, const ingestion::StoreSnapshot& snapshot) const {
    body["snapshot"] = snapshot_info(snapshot);
    Response r;
    r.body = body.dump();
    r.body += '\n';
    return r;
}

Response TwinService::handle(const Request& request) {
    const auto snap = store_.snapshot();
    Response out;
    try {
        std::vector<std::string> parts;
        std::string part;
        std::istringstream in(request.path);
        while (std::getline(in, part, '/')) {
            if (!part.empty()) {
                parts.push_back(part);
            }
        }
        const bool get = request.method == "GET";
        const bool post = request.method == "POST";
        auto route = [&]() -> std::optional<Response> {
            if (parts.size() < 2 || parts[0] != "v1") {
                return std::nullopt;
            }
            const std::string& name = parts[1];
            if (parts.size() == 2) {
                if (name == "capability" && get) return get_capability(request, snap);
                if (name == "sensors" && get) return get_sensors(request, snap);
                if (name == "heatmap" && get) return get_heatmap(request, snap);
                if (name == "sun" && get) return get_sun(request, snap);
                if (name == "sunhours" && get) return get_sunhours(request, snap);
                if (name == "forecast" && get) return get_forecast(request, snap);
                if (name == "predict-multi" && get) return get_predict_multi(request, snap);
                if (name == "recommend" && post) return post_recommend(request, snap);
                if (name == "occupancy" && get) return get_occupancy(request, snap);
                if (name == "ingest" && post) return post_ingest(request);
                static const std::set<std::string> known = {"capability", "sensors", "heatmap", "sun",
                                                            "sunhours", "forecast", "predict-multi", "recommend",
                                                            "occupancy", "ingest"};
                if (known.count(name)) {
                    Response r = json_response(
                        {{"error", {{"code", "method_not_allowed"}, {"message", request.method + " not allowed"}}}},
                        *snap);
                    r.status = 405;
                    return r;
                }
            }
            if (parts.size() == 4 && name == "sensors" && parts[3] == "series" && get) {
                return get_series(request, snap, parts[2]);
            }
            return std::nullopt;
        };
        auto r = route();
        if (!r) {
            throw Error(ErrorCode::not_found, "no route for " + request.method + " " + request.path);
        }
        out = std::move(*r);
    } catch (const Error& e) {
        out = json_response({{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}}, *snap);
        out.status = http_status(e.code());
    } catch (const Json::exception& e) {
        out = json_response({{"error", {{"code", "invalid_argument"}, {"message", e.what()}}}}, *snap);
        out.status = 422;
    } catch (const std::exception& e) {
        out = json_response({{"error", {{"code", "internal"}, {"message", e.what()}}}}, *snap);
        out.status = 500;
    }
    if (out.headers.empty()) {
        const auto span = snap->time_span();
        out.headers["X-Snapshot-Version"] = std::to_string(snap->version());
        out.headers["X-Snapshot-Time"] = span ? span->second.to_string() : "";
    }
    return out;
}

Response TwinService::get_capability(const Request&, const Snapshot& snap) {
    const auto report = assess_capability(inputs_for(*snap));
    Json levels = Json::array();
    for (const auto& l : report.levels) {
        levels.push_back({{"level", std::string(to_string(l.level))}, {"available", l.available}, {"reason", l.reason}});
    }
    const auto* top = report.highest();
    return json_response({{"highest", top ? Json(std::string(to_string(top->level))) : Json(nullptr)},
                          {"levels", std::move(levels)}},
                         *snap);
}

Response TwinService::get_sensors(const Request&, const Snapshot& snap) {
    std::set<std::string> ids;
    for (const auto& s : config_.house.sensors) {
        ids.insert(s.id);
    }
    for (const auto& id : snap->sensors()) {
        ids.insert(id);
    }
    Json list = Json::array();
    for (const auto& id : ids) {
        Json s;
        s["id"] = id;
        const auto* d = config_.house.find_sensor(id);
        s["kind"] = d ? Json(std::string(core::to_string(d->kind))) : Json(nullptr);
        s["room"] = d && !d->room.empty() ? Json(d->room) : Json(nullptr);
        s["unit"] = std::string(core::to_string(unit_of(config_.house, id)));
        s["position"] = d ? Json::array({d->position.x, d->position.y, d->position.z}) : Json(nullptr);
        if (snap->contains(id) && snap->size(id) > 0) {
            const auto all = snap->all(id);
            s["count"] = all.size();
            s["first"] = all.front().time.to_string();
            s["last"] = all.back().time.to_string();
            s["latest"] = all.back().value;
        } else {
            s["count"] = 0;
            s["first"] = nullptr;
            s["last"] = nullptr;
            s["latest"] = nullptr;
        }
        list.push_back(std::move(s));
    }
    return json_response({{"sensors", std::move(list)}}, *snap);
}

Response TwinService::get_series(const Request& r, const Snapshot& snap, const std::string& sensor_id) {
    if (warming_up()) {
        throw Error(ErrorCode::unavailable, "store warming up");
    }
    if (!snap->contains(sensor_id)) {
        throw Error(ErrorCode::not_found, "unknown sensor '" + sensor_id + "'");
    }
    const auto from = param(r, "from") ? parse_time(*param(r, "from"), "from") : core::Timestamp::min();
    const auto to = param(r, "to") ? parse_time(*param(r, "to"), "to") : core::Timestamp::max();
    const auto points = snap->query(sensor_id, from, to);
    if (const auto* f = param(r, "format"); f && *f == "csv") {
        std::vector<core::Observation> rows;
        for (const auto& p : points) {
            rows.push_back({sensor_id, p.time, p.value});
        }
        std::ostringstream out;
        core::write_observations_csv(out, rows);
        Response resp;
        resp.content_type = "text/csv";
        resp.body = out.str();
        return resp;
    }
    Json pts = Json::array();
    for (const auto& p : points) {
        pts.push_back({{"t", p.time.to_string()}, {"value", p.value}});
    }
    return json_response({{"sensor", sensor_id},
                          {"unit", std::string(core::to_string(unit_of(config_.house, sensor_id)))},
                          {"count", points.size()},
                          {"points", std::move(pts)}},
                         *snap);
}

Response TwinService::get_heatmap(const Request& r, const Snapshot& snap) {
    if (warming_up()) {
        throw Error(ErrorCode::unavailable, "store warming up");
    }
    const std::string& room_name = required(r, "room");
    const auto* room = config_.house.find_room(room_name);
    if (!room) {
        throw Error(ErrorCode::not_found, "unknown room '" + room_name + "'");
    }
    core::Timestamp at;
    if (const auto* a = param(r, "at")) {
        at = parse_time(*a, "at");
    } else if (auto span = snap->time_span()) {
        at = span->second;
    } else {
        throw Error(ErrorCode::no_data, "store is empty");
    }
    std::vector<diagnostics::HeatSensor> sensors;
    Json used = Json::array();
    for (const auto& s : config_.house.sensors) {
        if (s.room != room_name || s.kind != core::SensorKind::temperature || !snap->contains(s.id)) {
            continue;
        }
        if (auto v = snap->latest_at(s.id, at)) {
            sensors.push_back({s.id, {s.position.x, s.position.y}, v->value});
            used.push_back({{"id", s.id}, {"x", s.position.x}, {"y", s.position.y}, {"temperature", v->value},
                            {"time", v->time.to_string()}});
        }
    }
    if (sensors.empty()) {
        throw Error(ErrorCode::no_data, "no temperature readings in room '" + room_name + "' at " + at.to_string());
    }
    diagnostics::HeatMapConfig hc;
    hc.alpha = config_.diagnostics.alpha;
    hc.resolution = config_.diagnostics.resolution;
    const auto frame = diagnostics::render_heatmap(sensors, core::bounding_box(room->polygon), hc, room_name);
    if (const auto* f = param(r, "format"); f && *f == "csv") {
        Response resp;
        resp.content_type = "text/csv";
        resp.body = diagnostics::heatmap_csv(frame);
        return resp;
    }
    Json doc = Json::parse(diagnostics::heatmap_json(frame));
    doc["at"] = at.to_string();
    doc["sensors"] = std::move(used);
    return json_response(std::move(doc), *snap);
}

Response TwinService::get_sun(const Request& r, const Snapshot& snap) {
    core::CivilDate date;
    try {
        date = core::CivilDate::parse(required(r, "date"));
    } catch (const Error& e) {
        throw Error(ErrorCode::invalid_argument, std::string("date: ") + e.what());
    }
    return json_response(sun_document(config_.house, date, required(r, "time")), *snap);
}

Response TwinService::get_sunhours(const Request& r, const Snapshot& snap) {
    const int year = static_cast<int>(parse_integer(required(r, "year"), "year"));
    return json_response(sun_hours_document(config_.house, year, mask_ ? &*mask_ : nullptr), *snap);
}

void TwinService::with_training_slot(const std::function<void()>& work) {
    if (!trainings_.try_acquire_for(std::chrono::seconds(config_.listen.training_wait_s))) {
        throw Error(ErrorCode::unavailable, "all training slots are busy, retry later");
    }
    struct Release {
        std::counting_semaphore<64>& s;
        ~Release() { s.release(); }
    } release{trainings_};
    work();
}

std::shared_ptr<const ForecastOutcome> TwinService::cached_forecast(const ingestion::StoreSnapshot& snapshot,
                                                                    const std::string& sensor, std::size_t horizon,
                                                                    const std::vector<forecasting::ModelKind>& kinds) {
    const ForecastKey key{sensor, horizon, models_key(kinds), snapshot.version()};
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = forecasts_.find(key); it != forecasts_.end()) {
            return it->second;
        }
    }
    const auto history = sensor_series(snapshot, config_.house, sensor);
    std::shared_ptr<const ForecastOutcome> made;
    with_training_slot([&] {
        made = std::make_shared<const ForecastOutcome>(forecast_series(history, horizon, kinds, config_.forecasting));
    });
    std::lock_guard lock(cache_mutex_);
    std::erase_if(forecasts_, [&](const auto& kv) { return std::get<3>(kv.first) < snapshot.version(); });
    forecasts_.emplace(key, made);
    return made;
}

Response TwinService::get_forecast(const Request& r, const Snapshot& snap) {
    if (warming_up()) {
        throw Error(ErrorCode::unavailable, "store warming up");
    }
    const std::string& sensor = required(r, "sensor");
    if (!snap->contains(sensor)) {
        throw Error(ErrorCode::not_found, "unknown sensor '" + sensor + "'");
    }
    const long long horizon = param(r, "horizon") ? parse_integer(*param(r, "horizon"), "horizon") : 288;
    if (horizon < 1 || horizon > config_.forecasting.max_horizon) {
        throw Error(ErrorCode::invalid_argument,
                    "horizon must lie in [1, " + std::to_string(config_.forecasting.max_horizon) + "]");
    }
    const auto kinds =
        parse_models(param(r, "models") ? split_commas(*param(r, "models")) : config_.forecasting.models);
    const auto outcome = cached_forecast(*snap, sensor, static_cast<std::size_t>(horizon), kinds);
    return json_response(forecast_document(*outcome), *snap);
}

std::shared_ptr<const forecasting::MultiOutputModel> TwinService::cached_multi(const ingestion::StoreSnapshot& snapshot) {
    {
        std::lock_guard lock(cache_mutex_);
        if (multi_.second && multi_.first == snapshot.version()) {
            return multi_.second;
        }
    }
    const auto& f = config_.forecasting;
    std::vector<std::string> targets = f.targets;
    if (targets.empty()) {
        targets.assign(ingestion::kCoupledTargets.begin(), ingestion::kCoupledTargets.end());
    }
    const auto fire = sensor_series(snapshot, config_.house, f.fireplace_sensor);
    std::map<std::string, core::TimeSeries> series;
    core::Timestamp first = fire.start;
    core::Timestamp last = fire.last_time();
    for (const auto& t : targets) {
        if (!snapshot.contains(t)) {
            continue;
        }
        auto s = sensor_series(snapshot, config_.house, t);
        first = std::max(first, s.start);
        last = std::min(last, s.last_time());
        series.emplace(t, std::move(s));
    }
    if (series.empty()) {
        throw Error(ErrorCode::no_data, "no coupled target sensors in the store");
    }
    if (last < first) {
        throw Error(ErrorCode::insufficient_data, "fireplace and target series do not overlap");
    }
    const auto fire_common = window(fire, first, last);
    const std::size_t per_day = static_cast<std::size_t>(fire.steps_per_day());
    if (fire_common.size() < static_cast<std::size_t>(f.min_history_days) * per_day) {
        throw Error(ErrorCode::insufficient_data, "multi-output needs " + std::to_string(f.min_history_days) +
                                                      " days of shared fireplace and target history");
    }
    const std::size_t val = static_cast<std::size_t>(f.val_days) * per_day;
    const std::size_t n_train = fire_common.size() - val;
    std::map<std::string, core::TimeSeries> t_train, t_val;
    for (const auto& [id, s] : series) {
        const auto common = window(s, first, last);
        t_train.emplace(id, common.slice(0, n_train));
        t_val.emplace(id, common.slice(n_train, val));
    }
    std::shared_ptr<const forecasting::MultiOutputModel> made;
    forecasting::MultiOutputOptions options;
    options.p = f.p;
    with_training_slot([&] {
        made = std::make_shared<const forecasting::MultiOutputModel>(forecasting::fit_multi_output(
            fire_common.slice(0, n_train), t_train, fire_common.slice(n_train, val), t_val, options));
    });
    std::lock_guard lock(cache_mutex_);
    multi_ = {snapshot.version(), made};
    return made;
}

Response TwinService::get_predict_multi(const Request& r, const Snapshot& snap) {
    if (warming_up()) {
        throw Error(ErrorCode::unavailable, "store warming up");
    }
    const auto& f = config_.forecasting;
    const long long horizon = param(r, "horizon") ? parse_integer(*param(r, "horizon"), "horizon") : 288;
    if (horizon < 1 || horizon > f.max_horizon) {
        throw Error(ErrorCode::invalid_argument, "horizon must lie in [1, " + std::to_string(f.max_horizon) + "]");
    }
    if (!snap->contains(f.fireplace_sensor)) {
        throw Error(ErrorCode::not_found, "no data for fireplace sensor '" + f.fireplace_sensor + "'");
    }
    const auto model = cached_multi(*snap);
    const auto fire = cached_forecast(*snap, f.fireplace_sensor, static_cast<std::size_t>(horizon),
                                      parse_models(f.models));
    const auto history = sensor_series(*snap, config_.house, f.fireplace_sensor);
    const std::size_t lead = std::min<std::size_t>(static_cast<std::size_t>(model->options.lags - 1), history.size());

    forecasting::MultiOutputRequest req;
    req.fireplace = history.slice(history.size() - lead, lead);
    req.fireplace.values.insert(req.fireplace.values.end(), fire->forecast.combined.values.begin(),
                                fire->forecast.combined.values.end());
    req.targets = model->target_ids();
    const auto predicted = forecasting::predict_multi_output(*model, req);

    const auto& combined = fire->forecast.combined;
    Json targets = Json::array();
    for (const auto& [id, s] : predicted) {
        const auto& tm = model->targets.at(id);
        const auto tail = s.slice(lead, combined.size());
        targets.push_back({{"sensor", id},
                           {"unit", std::string(core::to_string(tm.unit))},
                           {"val_rmse_linear", tm.val_rmse_linear},
                           {"val_rmse_gbm", tm.val_rmse_gbm},
                           {"values", tail.values}});
    }
    return json_response({{"horizon", combined.size()},
                          {"start", combined.start.to_string()},
                          {"step_minutes", combined.step_minutes},
                          {"fireplace", {{"sensor", f.fireplace_sensor}, {"values", combined.values}}},
                          {"targets", std::move(targets)}},
                         *snap);
}

Response TwinService::post_recommend(const Request& r, const Snapshot& snap) {
    const Json body = Json::parse(r.body);
    if (!body.is_object()) {
        throw Error(ErrorCode::invalid_argument, "recommend expects a JSON object");
    }
    if (!body.contains("temps") || !body["temps"].is_array()) {
        throw Error(ErrorCode::invalid_argument, "recommend expects 'temps': 288 outdoor temperatures");
    }
    std::vector<double> temps;
    for (const auto& v : body["temps"]) {
        if (!v.is_number()) {
            throw Error(ErrorCode::invalid_argument, "'temps' must hold numbers");
        }
        temps.push_back(v.get<double>());
    }
    const std::string user = body.value("user", config_.recommender.user);
    recommender::RecommendOptions opt{config_.recommender.rmse_threshold, config_.recommender.min_corr};
    opt.rmse_threshold = body.value("rmse_threshold", opt.rmse_threshold);
    opt.min_corr = body.value("min_corr", opt.min_corr);
    if (!(opt.rmse_threshold > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "rmse_threshold must be positive");
    }
    if (!behavior_) {
        throw Error(ErrorCode::insufficient_data, "insufficient behavioral data: no behavior matrix configured");
    }
    const auto res = recommender::recommend(temps, *behavior_, user, opt);
    Json days = Json::array();
    for (const auto& d : res.contributing_days) {
        days.push_back({{"user", d.user}, {"day", d.day}, {"rmse", d.rmse}, {"weight", d.weight}});
    }
    Json users = Json::array();
    for (const auto& u : res.contributing_users) {
        users.push_back({{"user", u.user}, {"pearson", u.pearson}, {"weight", u.weight}});
    }
    Json preds = Json::array();
    for (const auto& p : res.user_predictions) {
        preds.push_back({{"user", p.user}, {"step", p.step}});
    }
    return json_response({{"user", user},
                          {"recommended_step", res.recommended_step},
                          {"clock", recommender::step_to_clock(res.recommended_step)},
                          {"unrounded_step", res.unrounded_step},
                          {"contributing_days", std::move(days)},
                          {"contributing_users", std::move(users)},
                          {"user_predictions", std::move(preds)}},
                         *snap);
}

Response TwinService::get_occupancy(const Request& r, const Snapshot& snap) {
    if (warming_up()) {
        throw Error(ErrorCode::unavailable, "store warming up");
    }
    const std::string& room_name = required(r, "room");
    if (!config_.house.find_room(room_name)) {
        throw Error(ErrorCode::not_found, "unknown room '" + room_name + "'");
    }
    const core::SensorDescriptor* temp = nullptr;
    const core::SensorDescriptor* door = nullptr;
    for (const auto& s : config_.house.sensors) {
        if (s.room != room_name || !snap->contains(s.id)) {
            continue;
        }
        if (!temp && s.kind == core::SensorKind::temperature) {
            temp = &s;
        }
        if (!door && s.kind == core::SensorKind::proximity) {
            door = &s;
        }
    }
    if (!temp) {
        throw Error(ErrorCode::not_found, "room '" + room_name + "' has no temperature data");
    }
    if (!door) {
        throw Error(ErrorCode::not_found, "room '" + room_name + "' has no door sensor data");
    }
    const auto from = param(r, "from") ? parse_time(*param(r, "from"), "from") : core::Timestamp::min();
    const auto to = param(r, "to") ? parse_time(*param(r, "to"), "to") : core::Timestamp::max();
    if (to < from) {
        throw Error(ErrorCode::invalid_argument, "from must not be after to");
    }
    const auto raw = snap->query(temp->id, from, to);
    if (raw.empty()) {
        throw Error(ErrorCode::no_data, "no temperature readings for '" + temp->id + "' in the window");
    }
    const auto series =
        core::resample(raw, config_.diagnostics.occupancy_step_minutes, {}, temp->id, core::Unit::celsius);
    std::vector<diagnostics::DoorEvent> doors;
    std::optional<bool> state;
    for (const auto& p : snap->query(door->id, from, to)) {
        const bool open = p.value >= 0.5;
        if (state ? open != *state : open) {
            doors.push_back({p.time, open});
        }
        state = open;
    }
    diagnostics::OccupancyOptions opt{config_.diagnostics.occupancy_threshold_c,
                                      config_.diagnostics.occupancy_window_minutes};
    const auto events = diagnostics::detect_occupancy(series, doors, opt, room_name);
    Json list = Json::array();
    for (const auto& e : events) {
        list.push_back({{"room", e.room},
                        {"start", e.start.to_string()},
                        {"end", e.end.to_string()},
                        {"peak_delta_c", e.peak_delta_c},
                        {"door_event", e.door_event.to_string()}});
    }
    return json_response({{"room", room_name},
                          {"temperature_sensor", temp->id},
                          {"door_sensor", door->id},
                          {"events", std::move(list)}},
                         *snap);
}

Response TwinService::post_ingest(const Request& r) {
    std::vector<core::Observation> rows;
    const auto first = r.body.find_first_not_of(" \t\r\n");
    const bool json = r.content_type.find("json") != std::string::npos ||
                      (first != std::string::npos && (r.body[first] == '{' || r.body[first] == '['));
    if (json) {
        const Json body = Json::parse(r.body);
        const Json& list = body.is_array() ? body : body.at("observations");
        for (const auto& o : list) {
            core::Observation ob;
            ob.sensor_id = o.at("sensor_id").get<std::string>();
            ob.time = parse_time(o.at("timestamp").get<std::string>(), "timestamp");
            if (o.contains("value") && !o["value"].is_null()) {
                ob.value = o["value"].get<double>();
                if (!std::isfinite(*ob.value)) {
                    throw Error(ErrorCode::invalid_argument, "non-finite value for '" + ob.sensor_id + "'");
                }
            }
            if (ob.sensor_id.empty()) {
                throw Error(ErrorCode::invalid_argument, "empty sensor_id");
            }
            rows.push_back(std::move(ob));
        }
    } else {
        std::istringstream in(r.body);
        rows = core::read_observations_csv(in, "ingest body");
    }
    const std::size_t skipped = store_.append(rows);
    const auto snap = store_.snapshot();
    Response resp = json_response({{"accepted", rows.size() - skipped}, {"skipped", skipped}}, *snap);
    const auto span = snap->time_span();
    resp.headers["X-Snapshot-Version"] = std::to_string(snap->version());
    resp.headers["X-Snapshot-Time"] = span ? span->second.to_string() : "";
    return resp;
}

} // namespace hometwin::service
