#pragma once

#include "hometwin/core/error.hpp"
#include "hometwin/core/series.hpp"
#include "hometwin/forecasting/ensemble.hpp"
#include "hometwin/forecasting/multi_output.hpp"
#include "hometwin/ingestion/event_store.hpp"
#include "hometwin/ingestion/poller.hpp"
#include "hometwin/recommender/behavior.hpp"
#include "hometwin/service/capability.hpp"
#include "hometwin/service/config.hpp"
#include "hometwin/solar/sun_hours.hpp"

#include <json.hpp>

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <tuple>
#include <vector>

namespace hometwin::service {

using Json = nlohmann::ordered_json;

struct Request {
    std::string method = "GET";
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
    std::string content_type;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers; // X-Snapshot-Version, X-Snapshot-Time
};

/// HTTP status for an error code: not_found 404, unavailable 503, everything else 422.
int http_status(ErrorCode code);

/// Sun position document shared by the API and the CLI. `time` is `HH:MM` UTC.
Json sun_document(const core::HouseModel& house, const core::CivilDate& date, const std::string& time);
Json sun_hours_document(const core::HouseModel& house, int year, const solar::HorizonMask* mask);

struct ForecastOutcome {
    forecasting::EnsembleSpec ensemble;
    forecasting::EnsembleForecast forecast;
};

/// Fits the requested kinds on `history` minus its last val_days, weights them on
/// those days and forecasts `horizon` steps past the end of `history`.
ForecastOutcome forecast_series(const core::TimeSeries& history, std::size_t horizon,
                                const std::vector<forecasting::ModelKind>& kinds, const ForecastSettings& settings);
Json forecast_document(const ForecastOutcome& outcome);

/// Resampled 5-minute grid of one sensor in a snapshot. Throws Error(not_found).
core::TimeSeries sensor_series(const ingestion::StoreSnapshot& snapshot, const core::HouseModel& house,
                               const std::string& sensor_id);

/// Composes every module over one EventStore. Request handling is thread safe.
class TwinService {
public:
    explicit TwinService(TwinConfig config);
    ~TwinService();
    TwinService(const TwinService&) = delete;
    TwinService& operator=(const TwinService&) = delete;

    const TwinConfig& config() const { return config_; }
    ingestion::EventStore& store() { return store_; }
    const ingestion::EventStore& store() const { return store_; }
    const std::optional<recommender::BehaviorMatrix>& behavior() const { return behavior_; }

    /// Starts one ingestion task per configured source.
    void start_sources();
    void stop_sources();
    /// True while started sources have not delivered anything yet.
    bool warming_up() const;
    /// Writes the store to the configured path when persistence is on.
    void save() const;

    CapabilityInputs capability_inputs() const;
    CapabilityReport capability() const;

    Response handle(const Request& request);

private:
    using Snapshot = std::shared_ptr<const ingestion::StoreSnapshot>;

    CapabilityInputs inputs_for(const ingestion::StoreSnapshot& snapshot) const;
    Json snapshot_info(const ingestion::StoreSnapshot& snapshot) const;
    Response json_response(Json body, const ingestion::StoreSnapshot& snapshot) const;

    Response get_capability(const Request& r, const Snapshot& snap);
    Response get_sensors(const Request& r, const Snapshot& snap);
    Response get_series(const Request& r, const Snapshot& snap, const std::string& sensor_id);
    Response get_heatmap(const Request& r, const Snapshot& snap);
    Response get_sun(const Request& r, const Snapshot& snap);
    Response get_sunhours(const Request& r, const Snapshot& snap);
    Response get_forecast(const Request& r, const Snapshot& snap);
    Response get_predict_multi(const Request& r, const Snapshot& snap);
    Response post_recommend(const Request& r, const Snapshot& snap);
    Response get_occupancy(const Request& r, const Snapshot& snap);
    Response post_ingest(const Request& r);

    std::shared_ptr<const ForecastOutcome> cached_forecast(const ingestion::StoreSnapshot& snapshot,
                                                           const std::string& sensor, std::size_t horizon,
                                                           const std::vector<forecasting::ModelKind>& kinds);
    std::shared_ptr<const forecasting::MultiOutputModel> cached_multi(const ingestion::StoreSnapshot& snapshot);
    void with_training_slot(const std::function<void()>& work);

    TwinConfig config_;
    std::optional<solar::HorizonMask> mask_;
    std::optional<recommender::BehaviorMatrix> behavior_;
    ingestion::EventStore store_;
    std::vector<std::unique_ptr<ingestion::SourceTask>> tasks_;

    std::counting_semaphore<64> trainings_;
    std::mutex cache_mutex_;
    using ForecastKey = std::tuple<std::string, std::size_t, std::string, std::uint64_t>;
    std::map<ForecastKey, std::shared_ptr<const ForecastOutcome>> forecasts_;
    std::pair<std::uint64_t, std::shared_ptr<const forecasting::MultiOutputModel>> multi_{0, nullptr};
};

/// cpp-httplib front end over a TwinService.
class HttpFrontend {
public:
    explicit HttpFrontend(TwinService& service);
    ~HttpFrontend();

    /// Binds and serves on a background thread; port 0 picks a free port. Returns
    /// the bound port. Throws Error(unavailable) when the address cannot be bound.
    int start(const std::string& host, int port);
    void stop();
    /// Serves on the calling thread until stop().
    void run(const std::string& host, int port);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace hometwin::service
