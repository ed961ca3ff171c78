#include "hometwin/service/config.hpp"

#include "hometwin/core/error.hpp"
#include "hometwin/forecasting/model.hpp"

#include <cstdlib>
#include <set>
#include <sstream>

namespace hometwin::service {

namespace {

using core::config_error;
using core::KvDocument;
using core::KvEntry;
using core::KvSection;

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a != std::string::npos) {
            out.push_back(item.substr(a, b - a + 1));
        }
    }
    return out;
}

std::vector<double> numbers(const KvDocument& doc, const KvEntry& e) {
    std::vector<double> out;
    for (const auto& word : split_list(e.value, ' ')) {
        out.push_back(core::kv_double(doc, KvEntry{e.key, word, e.line}));
    }
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_relative() && !base.empty() ? base / p : p;
}

int positive_int(const KvDocument& doc, const KvEntry& e) {
    const auto v = core::kv_int(doc, e);
    if (v <= 0 || v > 1'000'000) {
        config_error(doc.origin, e.line, "'" + e.key + "' must be a positive integer");
    }
    return static_cast<int>(v);
}

double positive(const KvDocument& doc, const KvEntry& e) {
    const double v = core::kv_double(doc, e);
    if (!(v > 0.0)) {
        config_error(doc.origin, e.line, "'" + e.key + "' must be positive");
    }
    return v;
}

[[noreturn]] void unknown_key(const KvDocument& doc, const KvSection& s, const KvEntry& e) {
    config_error(doc.origin, e.line, "unknown key '" + e.key + "' in [" + s.kind + "]");
}

void read_house(const KvDocument& doc, const KvSection& s, TwinConfig& c, const std::filesystem::path& base) {
    for (const auto& e : s.entries) {
        if (e.key == "latitude") {
            c.house.latitude = core::kv_double(doc, e);
        } else if (e.key == "longitude") {
            c.house.longitude = core::kv_double(doc, e);
        } else if (e.key == "altitude_m") {
            c.house.altitude_m = core::kv_double(doc, e);
        } else if (e.key == "orientation_deg") {
            c.house.orientation_deg = core::kv_double(doc, e);
        } else if (e.key == "horizon_mask") {
            c.horizon_mask = resolve(base, e.value);
        } else {
            unknown_key(doc, s, e);
        }
    }
}

void read_room(const KvDocument& doc, const KvSection& s, TwinConfig& c) {
    core::Room room;
    room.name = s.name;
    for (const auto& e : s.entries) {
        if (e.key == "floor") {
            room.floor = static_cast<int>(core::kv_int(doc, e));
        } else if (e.key == "polygon") {
            for (const auto& pt : split_list(e.value, ';')) {
                const auto xy = numbers(doc, KvEntry{e.key, pt, e.line});
                if (xy.size() != 2) {
                    config_error(doc.origin, e.line, "polygon points need 'x y', got '" + pt + "'");
                }
                room.polygon.push_back({xy[0], xy[1]});
            }
            if (room.polygon.size() < 3) {
                config_error(doc.origin, e.line, "polygon needs at least three points");
            }
        } else {
            unknown_key(doc, s, e);
        }
    }
    if (room.polygon.empty()) {
        config_error(doc.origin, s.line, "room '" + s.name + "' has no polygon");
    }
    c.house.rooms.push_back(std::move(room));
}

void read_sensor(const KvDocument& doc, const KvSection& s, TwinConfig& c) {
    core::SensorDescriptor d;
    d.id = s.name;
    for (const auto& e : s.entries) {
        if (e.key == "kind") {
            auto k = core::parse_sensor_kind(e.value);
            if (!k) {
                config_error(doc.origin, e.line, "unknown sensor kind '" + e.value + "'");
            }
            d.kind = *k;
        } else if (e.key == "room") {
            d.room = e.value;
        } else if (e.key == "position") {
            const auto v = numbers(doc, e);
            if (v.size() != 3) {
                config_error(doc.origin, e.line, "position needs 'x y z'");
            }
            d.position = {v[0], v[1], v[2]};
        } else if (e.key == "floor") {
            d.floor = static_cast<int>(core::kv_int(doc, e));
        } else {
            unknown_key(doc, s, e);
        }
    }
    c.house.sensors.push_back(std::move(d));
}

void read_store(const KvDocument& doc, const KvSection& s, TwinConfig& c, const std::filesystem::path& base) {
    for (const auto& e : s.entries) {
        if (e.key == "path") {
            c.store.path = resolve(base, e.value);
        } else if (e.key == "persist") {
            c.store.persist = core::kv_bool(doc, e);
        } else {
            unknown_key(doc, s, e);
        }
    }
}

void read_forecasting(const KvDocument& doc, const KvSection& s, TwinConfig& c) {
    auto& f = c.forecasting;
    for (const auto& e : s.entries) {
        if (e.key == "models") {
            f.models = split_list(e.value, ',');
            for (const auto& m : f.models) {
                const auto k = forecasting::parse_model_kind(m);
                if (!k || *k == forecasting::ModelKind::external) {
                    config_error(doc.origin, e.line, "unknown model '" + m + "'");
                }
            }
            if (f.models.empty()) {
                config_error(doc.origin, e.line, "models must not be empty");
            }
        } else if (e.key == "p") {
            f.p = positive(doc, e);
        } else if (e.key == "folds") {
            f.folds = positive_int(doc, e);
        } else if (e.key == "val_days") {
            f.val_days = positive_int(doc, e);
        } else if (e.key == "min_history_days") {
            f.min_history_days = positive_int(doc, e);
        } else if (e.key == "fireplace_sensor") {
            f.fireplace_sensor = e.value;
        } else if (e.key == "targets") {
            f.targets = split_list(e.value, ',');
        } else if (e.key == "max_horizon") {
            f.max_horizon = positive_int(doc, e);
        } else {
            unknown_key(doc, s, e);
        }
    }
    if (f.min_history_days < f.val_days + 2) {
        config_error(doc.origin, s.line, "min_history_days must be at least val_days + 2");
    }
    if (f.folds < 2) {
        config_error(doc.origin, s.line, "folds must be at least 2");
    }
}

void read_diagnostics(const KvDocument& doc, const KvSection& s, TwinConfig& c) {
    auto& d = c.diagnostics;
    for (const auto& e : s.entries) {
        if (e.key == "alpha") {
            d.alpha = positive(doc, e);
        } else if (e.key == "resolution") {
            d.resolution = positive(doc, e);
            if (d.resolution < 1.0) {
                config_error(doc.origin, e.line, "resolution must be at least 1 cell per meter");
            }
        } else if (e.key == "occupancy_threshold_c") {
            d.occupancy_threshold_c = positive(doc, e);
        } else if (e.key == "occupancy_window_minutes") {
            d.occupancy_window_minutes = positive_int(doc, e);
        } else if (e.key == "occupancy_step_minutes") {
            d.occupancy_step_minutes = positive_int(doc, e);
            if (core::kMinutesPerDay % d.occupancy_step_minutes != 0) {
                config_error(doc.origin, e.line, "occupancy_step_minutes must divide a day");
            }
        } else {
            unknown_key(doc, s, e);
        }
    }
}

void read_recommender(const KvDocument& doc, const KvSection& s, TwinConfig& c, const std::filesystem::path& base) {
    auto& r = c.recommender;
    for (const auto& e : s.entries) {
        if (e.key == "behavior_matrix") {
            r.behavior_matrix = resolve(base, e.value);
        } else if (e.key == "user") {
            r.user = e.value;
        } else if (e.key == "rmse_threshold") {
            r.rmse_threshold = positive(doc, e);
        } else if (e.key == "min_corr") {
            r.min_corr = core::kv_double(doc, e);
            if (!(r.min_corr >= -1.0 && r.min_corr <= 1.0)) {
                config_error(doc.origin, e.line, "min_corr must lie in [-1, 1]");
            }
        } else {
            unknown_key(doc, s, e);
        }
    }
}

void read_service(const KvDocument& doc, const KvSection& s, TwinConfig& c) {
    auto& l = c.listen;
    for (const auto& e : s.entries) {
        if (e.key == "listen") {
            const auto colon = e.value.rfind(':');
            if (colon == std::string::npos || colon == 0) {
                config_error(doc.origin, e.line, "listen expects host:port");
            }
            l.host = e.value.substr(0, colon);
            const auto port = core::kv_int(doc, KvEntry{e.key, e.value.substr(colon + 1), e.line});
            if (port < 0 || port > 65535) {
                config_error(doc.origin, e.line, "port out of range");
            }
            l.port = static_cast<int>(port);
        } else if (e.key == "max_trainings") {
            l.max_trainings = positive_int(doc, e);
            if (l.max_trainings > 64) {
                config_error(doc.origin, e.line, "max_trainings must be at most 64");
            }
        } else if (e.key == "training_wait_s") {
            l.training_wait_s = positive_int(doc, e);
        } else {
            unknown_key(doc, s, e);
        }
    }
}

void check_source_keys(const KvDocument& doc, const KvSection& s, const ingestion::SourceConfig& src) {
    using ingestion::SourceKind;
    std::set<std::string> allowed = {"kind", "endpoint", "poll_interval_s", "user_agent"};
    switch (src.kind) {
    case SourceKind::replay:
        allowed.insert({"path", "speed"});
        break;
    case SourceKind::simulator:
        allowed.insert({"seed", "days", "start", "significant_change", "heartbeat_minutes"});
        break;
    case SourceKind::poll_bearer:
        allowed.insert("token");
        break;
    case SourceKind::poll_oauth_password:
        allowed.insert({"token_url", "client_id", "client_secret", "username", "password"});
        break;
    case SourceKind::poll_jwt_assertion:
        allowed.insert({"token_url", "key_id", "key_secret", "subject"});
        break;
    }
    for (const auto& e : s.entries) {
        if (!allowed.count(e.key)) {
            config_error(doc.origin, e.line,
                         "unknown key '" + e.key + "' for source kind " + std::string(ingestion::to_string(src.kind)));
        }
    }
}

} // namespace

void TwinConfig::validate() const {
    try {
        house.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::config, std::string("house: ") + e.what());
    }
    std::set<std::string> rooms;
    for (const auto& r : house.rooms) {
        if (!rooms.insert(r.name).second) {
            throw Error(ErrorCode::config, "duplicate room '" + r.name + "'");
        }
    }
    for (const auto& s : house.sensors) {
        if (!s.room.empty() && !rooms.count(s.room)) {
            throw Error(ErrorCode::config, "sensor '" + s.id + "' names unknown room '" + s.room + "'");
        }
    }
    std::set<std::string> ids;
    for (const auto& s : sources) {
        s.validate();
        if (!ids.insert(s.source_id).second) {
            throw Error(ErrorCode::config, "duplicate source '" + s.source_id + "'");
        }
    }
}

TwinConfig parse_twin_config(const KvDocument& doc, const std::filesystem::path& base_dir) {
    TwinConfig c;
    std::set<std::string> singletons;
    for (const auto& s : doc.sections) {
        if (s.kind.empty()) {
            if (!s.entries.empty()) {
                config_error(doc.origin, s.entries.front().line, "key outside a section");
            }
            continue;
        }
        const bool named = s.kind == "room" || s.kind == "sensor" || s.kind == "source";
        if (named && s.name.empty()) {
            config_error(doc.origin, s.line, "[" + s.kind + "] needs a name");
        }
        if (!named && !s.name.empty()) {
            config_error(doc.origin, s.line, "[" + s.kind + "] takes no name");
        }
        if (!named && !singletons.insert(s.kind).second) {
            config_error(doc.origin, s.line, "duplicate section [" + s.kind + "]");
        }
        if (s.kind == "house") {
            read_house(doc, s, c, base_dir);
        } else if (s.kind == "room") {
            if (c.house.find_room(s.name)) {
                config_error(doc.origin, s.line, "duplicate room '" + s.name + "'");
            }
            read_room(doc, s, c);
        } else if (s.kind == "sensor") {
            if (c.house.find_sensor(s.name)) {
                config_error(doc.origin, s.line, "duplicate sensor '" + s.name + "'");
            }
            read_sensor(doc, s, c);
        } else if (s.kind == "source") {
            auto src = ingestion::source_from_section(doc, s);
            check_source_keys(doc, s, src);
            if (auto it = src.credentials.find("path"); it != src.credentials.end()) {
                it->second = resolve(base_dir, it->second).string();
            }
            for (const auto& other : c.sources) {
                if (other.source_id == src.source_id) {
                    config_error(doc.origin, s.line, "duplicate source '" + src.source_id + "'");
                }
            }
            c.sources.push_back(std::move(src));
        } else if (s.kind == "store") {
            read_store(doc, s, c, base_dir);
        } else if (s.kind == "forecasting") {
            read_forecasting(doc, s, c);
        } else if (s.kind == "diagnostics") {
            read_diagnostics(doc, s, c);
        } else if (s.kind == "recommender") {
            read_recommender(doc, s, c, base_dir);
        } else if (s.kind == "service") {
            read_service(doc, s, c);
        } else {
            config_error(doc.origin, s.line, "unknown section [" + s.kind + "]");
        }
    }
    for (const auto& sensor : c.house.sensors) {
        if (!sensor.room.empty() && !c.house.find_room(sensor.room)) {
            for (const auto& s : doc.sections) {
                if (s.kind == "sensor" && s.name == sensor.id) {
                    config_error(doc.origin, s.find("room")->line, "unknown room '" + sensor.room + "'");
                }
            }
        }
    }
    try {
        c.house.validate();
    } catch (const Error& e) {
        config_error(doc.origin, 0, e.what());
    }
    c.validate();
    return c;
}

TwinConfig load_twin_config(const std::filesystem::path& path) {
    const auto doc = core::parse_kv_document(path);
    return parse_twin_config(doc, path.parent_path());
}

std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::filesystem::path>& cli_path) {
    if (const char* env = std::getenv(kConfigEnv); env && *env) {
        return std::filesystem::path(env);
    }
    return cli_path;
}

} // namespace hometwin::service
