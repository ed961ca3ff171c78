#include "hometwin/ingestion/poll.hpp"

#include "hometwin/core/error.hpp"

#include <json.hpp>

#include <cmath>

namespace hometwin::ingestion {

using nlohmann::json;

namespace {

std::optional<double> finite_number(const json& v) {
    if (!v.is_number()) {
        return std::nullopt;
    }
    const double x = v.get<double>();
    return std::isfinite(x) ? std::optional<double>(x) : std::nullopt;
}

std::optional<std::string> nonempty_string(const json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty()) {
        return std::nullopt;
    }
    return obj[key].get<std::string>();
}

std::optional<core::Timestamp> rfc3339(const json& obj, const char* key) {
    auto text = nonempty_string(obj, key);
    if (!text) {
        return std::nullopt;
    }
    try {
        return core::Timestamp::parse(*text);
    } catch (const Error&) {
        return std::nullopt;
    }
}

// One adapter per provider kind; each returns nullopt for a record it cannot map.
std::optional<core::Observation> map_bearer(const json& rec) {
    auto id = nonempty_string(rec, "id");
    auto t = rfc3339(rec, "lastupdated");
    auto v = rec.contains("value") ? finite_number(rec["value"]) : std::nullopt;
    if (!id || !t || !v) {
        return std::nullopt;
    }
    return core::Observation{*id, *t, *v};
}

std::optional<core::Observation> map_oauth(const json& rec) {
    auto id = nonempty_string(rec, "id");
    if (!id || !rec.contains("time_utc") || !rec["time_utc"].is_number_integer()) {
        return std::nullopt;
    }
    auto v = rec.contains("value") ? finite_number(rec["value"]) : std::nullopt;
    if (!v) {
        return std::nullopt;
    }
    const auto seconds = rec["time_utc"].get<std::int64_t>();
    const std::int64_t minutes = seconds >= 0 ? seconds / 60 : -((-seconds + 59) / 60);
    return core::Observation{*id, core::Timestamp::from_minutes(minutes), *v};
}

std::optional<core::Observation> map_jwt(const json& rec) {
    auto id = nonempty_string(rec, "device");
    auto t = rfc3339(rec, "timestamp");
    if (!id || !t || !rec.contains("data") || !rec["data"].is_object() || !rec["data"].contains("value")) {
        return std::nullopt;
    }
    auto v = finite_number(rec["data"]["value"]);
    if (!v) {
        return std::nullopt;
    }
    return core::Observation{*id, *t, *v};
}

} // namespace

PollResult parse_payload(SourceKind kind, std::string_view body) {
    PollResult out;
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        return out;
    }
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::source, std::string("payload is not JSON: ") + e.what());
    }
    const char* array_key = nullptr;
    std::optional<core::Observation> (*mapper)(const json&) = nullptr;
    switch (kind) {
    case SourceKind::poll_bearer:
        array_key = "sensors";
        mapper = map_bearer;
        break;
    case SourceKind::poll_oauth_password:
        array_key = "body";
        mapper = map_oauth;
        break;
    case SourceKind::poll_jwt_assertion:
        array_key = "events";
        mapper = map_jwt;
        break;
    default:
        throw Error(ErrorCode::invalid_argument, "kind " + std::string(to_string(kind)) + " has no payload adapter");
    }
    if (!doc.is_object() || !doc.contains(array_key) || doc[array_key].is_null()) {
        return out;
    }
    const json& records = doc[array_key];
    if (!records.is_array()) {
        throw Error(ErrorCode::source, std::string("payload field '") + array_key + "' is not an array");
    }
    for (const json& rec : records) {
        auto obs = rec.is_object() ? mapper(rec) : std::nullopt;
        if (obs) {
            out.observations.push_back(std::move(*obs));
        } else {
            ++out.skipped;
        }
    }
    return out;
}

PollResult poll_once(const SourceConfig& config, const TokenState& token, HttpTransport& transport) {
    if (token.access_token.empty()) {
        throw Error(ErrorCode::unauthorized, "source '" + config.source_id + "' polled without a token");
    }
    HttpRequest req;
    req.method = "GET";
    req.url = config.endpoint;
    req.headers.emplace_back("Authorization", "Bearer " + token.access_token);
    if (auto ua = config.credentials.find("user_agent"); ua != config.credentials.end()) {
        req.headers.emplace_back("User-Agent", ua->second);
    }
    const HttpResponse resp = transport.send(req);
    if (resp.status == 401) {
        throw Error(ErrorCode::unauthorized, "source '" + config.source_id + "' rejected the access token");
    }
    if (resp.status < 200 || resp.status >= 300) {
        throw Error(ErrorCode::source,
                    "source '" + config.source_id + "' poll failed with status " + std::to_string(resp.status));
    }
    return parse_payload(config.kind, resp.body);
}

} // namespace hometwin::ingestion
