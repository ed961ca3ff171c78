#pragma once

#include "hometwin/core/kvtext.hpp"
#include "hometwin/core/types.hpp"
#include "hometwin/ingestion/source.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hometwin::service {

struct StoreSettings {
    std::filesystem::path path; // empty keeps the store in memory
    bool persist = true;
};

struct ForecastSettings {
    std::vector<std::string> models = {"arima", "prophet", "gbm", "stack"};
    double p = 2.0;
    int folds = 5;
    int val_days = 2;
    int min_history_days = 4;
    std::string fireplace_sensor = "2Fireplace";
    std::vector<std::string> targets; // empty means the eight coupled second-floor sensors
    int max_horizon = 2016;
};

struct DiagnosticsSettings {
    double alpha = 4.0;
    double resolution = 10.0;
    double occupancy_threshold_c = 0.5;
    int occupancy_window_minutes = 60;
    int occupancy_step_minutes = 1;
};

struct RecommenderSettings {
    std::filesystem::path behavior_matrix; // empty: no behavioral data
    std::string user = "house";
    double rmse_threshold = 1.5;
    double min_corr = 0.3;
};

struct ListenSettings {
    std::string host = "127.0.0.1";
    int port = 8080;
    int max_trainings = 2;
    int training_wait_s = 30;
};

/// Sections and keys:
///   [house]            latitude, longitude, altitude_m, orientation_deg, horizon_mask
///   [room <name>]      floor, polygon ("x y; x y; ...")
///   [sensor <id>]      kind, room, position ("x y z"), floor
///   [source <id>]      see ingestion::SourceConfig
///   [store]            path, persist
///   [forecasting]      models, p, folds, val_days, min_history_days, fireplace_sensor, targets, max_horizon
///   [diagnostics]      alpha, resolution, occupancy_threshold_c, occupancy_window_minutes, occupancy_step_minutes
///   [recommender]      behavior_matrix, user, rmse_threshold, min_corr
///   [service]          listen ("host:port"), max_trainings, training_wait_s
/// Relative paths resolve against the config file's directory.
struct TwinConfig {
    core::HouseModel house;
    std::filesystem::path horizon_mask;
    std::vector<ingestion::SourceConfig> sources;
    StoreSettings store;
    ForecastSettings forecasting;
    DiagnosticsSettings diagnostics;
    RecommenderSettings recommender;
    ListenSettings listen;

    /// Throws Error(config) on cross-field violations.
    void validate() const;
};

/// Throws Error(config) as `origin:line: message` on unknown sections or keys,
/// bad values and duplicate names.
TwinConfig parse_twin_config(const core::KvDocument& doc, const std::filesystem::path& base_dir = {});
TwinConfig load_twin_config(const std::filesystem::path& path);

inline constexpr const char* kConfigEnv = "TWIN_CONFIG";

/// TWIN_CONFIG when set, else `cli_path`, else nothing.
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::filesystem::path>& cli_path);

} // namespace hometwin::service
