#include <doctest.h>

#include "hometwin/core/csv.hpp"
#include "hometwin/core/error.hpp"
#include "hometwin/diagnostics/occupancy.hpp"
#include "hometwin/ingestion/simulator.hpp"
#include "hometwin/recommender/surrogate.hpp"
#include "hometwin/service/service.hpp"
#include "hometwin/solar/solar.hpp"
#include "support/office.hpp"
#include "support/twin.hpp"

#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace hometwin;
using namespace hometwin::service;
using twin::fill;
using twin::get;

namespace {

const std::filesystem::path kConfig = HOMETWIN_SOURCE_DIR "/config/twin.conf";

TwinConfig shipped(bool with_sources = false) {
    auto c = load_twin_config(kConfig);
    c.store.path.clear();
    if (!with_sources) {
        c.sources.clear();
    }
    return c;
}

TwinConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_twin_config(core::parse_kv_document(in, "t.conf"), HOMETWIN_SOURCE_DIR "/config");
}

std::string config_error_of(const std::string& text) {
    try {
        parse_text(text);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config);
        return e.what();
    }
    return "";
}

Response post(TwinService& svc, const std::string& path, std::string body, std::string type = "application/json") {
    Request r;
    r.method = "POST";
    r.path = path;
    r.body = std::move(body);
    r.content_type = std::move(type);
    return svc.handle(r);
}

Json body_of(const Response& r) { return Json::parse(r.body); }

} // namespace

TEST_CASE("shipped config parses") {
    const auto c = load_twin_config(kConfig);
    CHECK(c.house.latitude == 63.4305);
    CHECK(c.house.rooms.size() == 4);
    CHECK(c.house.find_sensor("2Fireplace")->room == "living");
    CHECK(c.house.find_room("office")->polygon.size() == 4);
    CHECK(c.sources.size() == 1);
    CHECK(c.store.path.filename() == "store");
    CHECK(c.recommender.behavior_matrix.filename() == "behavior_matrix.csv");
    CHECK(c.listen.port == 8080);
    CHECK(c.forecasting.models.size() == 4);
}

TEST_CASE("config errors name the line") {
    CHECK(config_error_of("[house]\nlatitude = 63\ncolour = red\n").find("t.conf:3:") == 0);
    CHECK(config_error_of("[garden]\n").find("t.conf:1: unknown section") == 0);
    CHECK(config_error_of("[house]\nlatitude 63\n").find("t.conf:2:") == 0);
    CHECK(config_error_of("[room a]\npolygon = 0 0; 1 0; 1 1\n[sensor s]\nroom = b\n").find("t.conf:4:") == 0);
    CHECK(config_error_of("[source s]\nkind = simulator\nseeed = 3\n").find("t.conf:3:") == 0);
    CHECK(config_error_of("[forecasting]\nmodels = arima,tarot\n").find("t.conf:2:") == 0);
    CHECK(config_error_of("[forecasting]\nval_days = 3\nmin_history_days = 4\n").find("t.conf:1:") == 0);
    CHECK(config_error_of("[service]\nlisten = nowhere\n").find("t.conf:2:") == 0);
    CHECK(config_error_of("[house]\n[house]\n").find("t.conf:2: duplicate") == 0);
    CHECK(config_error_of("[room a]\nfloor = 1\n").find("t.conf:1:") == 0);
    CHECK(config_error_of("[house]\nlatitude = 95\n").find("latitude") != std::string::npos);
    CHECK(config_error_of("").empty());
}

TEST_CASE("config path from the environment wins") {
    ::unsetenv(kConfigEnv);
    CHECK(resolve_config_path(std::nullopt) == std::nullopt);
    CHECK(resolve_config_path(std::filesystem::path("a.conf")) == std::filesystem::path("a.conf"));
    ::setenv(kConfigEnv, "/tmp/b.conf", 1);
    CHECK(resolve_config_path(std::filesystem::path("a.conf")) == std::filesystem::path("/tmp/b.conf"));
    ::unsetenv(kConfigEnv);
}

TEST_CASE("capability gating") {
    {
        TwinService svc(shipped(false));
        const auto report = svc.capability();
        CHECK(report.at(CapabilityLevel::standalone).available);
        CHECK_FALSE(report.at(CapabilityLevel::descriptive).available);
        CHECK_FALSE(report.at(CapabilityLevel::prescriptive).available);
        CHECK(report.at(CapabilityLevel::diagnostic).reason == "requires descriptive");
    }
    {
        TwinService svc(shipped(true));
        CHECK(svc.capability().at(CapabilityLevel::descriptive).available);
        CHECK_FALSE(svc.capability().at(CapabilityLevel::predictive).available);
        fill(svc, 5);
        const auto body = body_of(get(svc, "/v1/capability"));
        CHECK(body["highest"] == "prescriptive");
        for (const auto& l : body["levels"]) {
            CHECK(l["available"] == true);
        }
    }
}

TEST_CASE("capability levels are cumulative over generated configs") {
    std::mt19937_64 rng(11);
    int top_counts[6] = {};
    for (int trial = 0; trial < 100; ++trial) {
        auto svc = twin::generated(rng, HOMETWIN_SOURCE_DIR "/config");
        const auto report = svc->capability();
        for (std::size_t i = 1; i < report.levels.size(); ++i) {
            if (report.levels[i].available) {
                CHECK(report.levels[i - 1].available);
            }
        }
        const auto body = body_of(get(*svc, "/v1/capability"));
        int highest = 0;
        for (std::size_t i = 0; i < report.levels.size(); ++i) {
            CHECK(body["levels"][i]["available"] == report.levels[i].available);
            highest += report.levels[i].available ? 1 : 0;
        }
        ++top_counts[highest];
    }
    // the generator reaches every level
    for (int h = 1; h <= 5; ++h) {
        CHECK(top_counts[h] > 0);
    }
}

TEST_CASE("sensors and series") {
    TwinService svc(shipped());
    fill(svc, 2);
    const auto sensors = body_of(get(svc, "/v1/sensors"));
    bool found = false;
    for (const auto& s : sensors["sensors"]) {
        if (s["id"] == "2Fireplace") {
            found = true;
            CHECK(s["room"] == "living");
            CHECK(s["count"] == 576);
        }
    }
    CHECK(found);
    CHECK(sensors["snapshot"]["version"] == 1);
    CHECK(sensors["snapshot"]["latest"] == "2022-01-02T23:55:00Z");

    const auto r = get(svc, "/v1/sensors/2Fireplace/series", {{"from", "2022-01-01T10:00:00Z"}, {"to", "2022-01-01T11:00Z"}});
    CHECK(r.status == 200);
    CHECK(r.headers.at("X-Snapshot-Version") == "1");
    const auto body = body_of(r);
    CHECK(body["count"] == 13);
    const auto expected = svc.store().query("2Fireplace", core::Timestamp::parse("2022-01-01T10:00Z"),
                                            core::Timestamp::parse("2022-01-01T11:00Z"));
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(body["points"][i]["value"].get<double>() == expected[i].value);
    }
    const auto csv = get(svc, "/v1/sensors/2Fireplace/series", {{"to", "2022-01-01T00:10Z"}, {"format", "csv"}});
    CHECK(csv.content_type == "text/csv");
    CHECK(csv.body.rfind(std::string(core::kObservationCsvHeader), 0) == 0);

    CHECK(get(svc, "/v1/sensors/nope/series").status == 404);
    CHECK(get(svc, "/v1/sensors/2Fireplace/series", {{"from", "yesterday"}}).status == 422);
}

TEST_CASE("heat map reflects store values at the requested time") {
    TwinService svc(shipped());
    fill(svc, 2);
    const std::string at = "2022-01-02T18:00:00Z";
    const auto r = get(svc, "/v1/heatmap", {{"room", "living"}, {"at", at}});
    REQUIRE(r.status == 200);
    const auto doc = body_of(r);
    double lo = 1e9, hi = -1e9;
    for (const char* id : {"2Fireplace", "2LivingRoomCenter", "2LRWindow"}) {
        const auto v = svc.store().snapshot()->latest_at(id, core::Timestamp::parse(at));
        REQUIRE(v.has_value());
        lo = std::min(lo, v->value);
        hi = std::max(hi, v->value);
    }
    CHECK(doc["min_temp"].get<double>() == doctest::Approx(lo).epsilon(1e-12));
    CHECK(doc["max_temp"].get<double>() == doctest::Approx(hi).epsilon(1e-12));
    CHECK(doc["sensors"].size() == 3);
    CHECK(doc["width"] == 80);
    CHECK(doc["height"] == 60);
    CHECK(doc["rows"].size() == 60);

    CHECK(get(svc, "/v1/heatmap", {{"room", "garage"}}).status == 404);
    CHECK(get(svc, "/v1/heatmap", {{"room", "living"}, {"at", "2021-01-01T00:00Z"}}).status == 422);
    CHECK(get(svc, "/v1/heatmap").status == 422);
    CHECK(get(svc, "/v1/heatmap", {{"room", "living"}, {"at", at}, {"format", "csv"}}).body.rfind("x,y,temperature", 0) == 0);
}

TEST_CASE("sun endpoints match the shared documents") {
    TwinService svc(shipped());
    const auto r = body_of(get(svc, "/v1/sun", {{"date", "2022-03-07"}, {"time", "12:00"}}));
    const auto direct = solar::sun_position(core::Timestamp::parse("2022-03-07T12:00Z"), 63.4305, 10.3951);
    CHECK(r["azimuth_deg"].get<double>() == direct.azimuth_deg);
    CHECK(r["altitude_deg"].get<double>() == direct.altitude_deg);
    auto doc = sun_document(svc.config().house, core::CivilDate::parse("2022-03-07"), "12:00");
    auto no_snapshot = r;
    no_snapshot.erase("snapshot");
    CHECK(no_snapshot == doc);

    CHECK(get(svc, "/v1/sun", {{"date", "2022-02-30"}, {"time", "12:00"}}).status == 422);
    CHECK(get(svc, "/v1/sun", {{"date", "2022-03-07"}, {"time", "25:00"}}).status == 422);
    CHECK(get(svc, "/v1/sun", {{"date", "2022-03-07"}}).status == 422);

    const auto hours = body_of(get(svc, "/v1/sunhours", {{"year", "2022"}}));
    REQUIRE(hours["months"].size() == 12);
    CHECK(hours["months"][5]["lit_minutes"].get<int>() > hours["months"][11]["lit_minutes"].get<int>());
    CHECK(get(svc, "/v1/sunhours", {{"year", "twenty"}}).status == 422);
}

TEST_CASE("forecast endpoint") {
    TwinService svc(shipped());
    fill(svc, 5);
    const auto r = get(svc, "/v1/forecast", {{"sensor", "2Fireplace"}, {"horizon", "288"}, {"models", "arima,gbm"}});
    REQUIRE(r.status == 200);
    const auto doc = body_of(r);
    CHECK(doc["rows"].size() == 288);
    CHECK(doc["models"].size() == 2);
    CHECK(doc["start"] == "2022-01-06T00:00:00Z");
    double w = 0.0;
    for (const auto& m : doc["models"]) {
        w += m["weight"].get<double>();
    }
    CHECK(w == doctest::Approx(1.0));
    for (const auto& row : doc["rows"]) {
        CHECK(std::isfinite(row["value"].get<double>()));
    }

    CHECK(get(svc, "/v1/forecast", {{"sensor", "ghost"}}).status == 404);
    CHECK(get(svc, "/v1/forecast", {{"sensor", "2Fireplace"}, {"horizon", "0"}}).status == 422);
    CHECK(get(svc, "/v1/forecast", {{"sensor", "2Fireplace"}, {"models", "crystal-ball"}}).status == 422);

    TwinService short_store(shipped());
    fill(short_store, 2);
    const auto too_short = get(short_store, "/v1/forecast", {{"sensor", "2Fireplace"}, {"models", "arima"}});
    CHECK(too_short.status == 422);
    CHECK(body_of(too_short)["error"]["code"] == "insufficient_data");
}

TEST_CASE("forecast cache follows the store version") {
    TwinService svc(shipped());
    fill(svc, 5);
    const std::map<std::string, std::string> q = {{"sensor", "2Fireplace"}, {"horizon", "12"}, {"models", "arima"}};
    const auto a = get(svc, "/v1/forecast", q);
    const std::vector<core::Observation> more = {
        {"2Fireplace", core::Timestamp::parse("2022-01-06T00:00Z"), 30.0}};
    svc.store().append(more);
    const auto b = get(svc, "/v1/forecast", q);
    CHECK(body_of(a)["snapshot"]["version"] == 1);
    CHECK(body_of(b)["snapshot"]["version"] == 2);
    CHECK(body_of(b)["start"] == "2022-01-06T00:05:00Z");
}

TEST_CASE("multi-output prediction covers the coupled sensors") {
    TwinService svc(shipped());
    fill(svc, 5);
    const auto r = get(svc, "/v1/predict-multi", {{"horizon", "24"}});
    REQUIRE(r.status == 200);
    const auto doc = body_of(r);
    CHECK(doc["targets"].size() == 8);
    CHECK(doc["fireplace"]["values"].size() == 24);
    for (const auto& t : doc["targets"]) {
        CHECK(t["values"].size() == 24);
    }
}

TEST_CASE("GET responses are byte-identical over an unchanged store") {
    const std::vector<std::pair<std::string, std::map<std::string, std::string>>> requests = {
        {"/v1/capability", {}},
        {"/v1/sensors", {}},
        {"/v1/sensors/2Stair/series", {{"from", "2022-01-02T00:00Z"}, {"to", "2022-01-02T06:00Z"}}},
        {"/v1/heatmap", {{"room", "living"}, {"at", "2022-01-03T12:00Z"}}},
        {"/v1/sun", {{"date", "2022-06-21"}, {"time", "10:30"}}},
        {"/v1/sunhours", {{"year", "2022"}}},
        {"/v1/forecast", {{"sensor", "2Fireplace"}, {"horizon", "36"}}},
        {"/v1/predict-multi", {{"horizon", "12"}}},
        {"/v1/occupancy", {{"room", "office"}}},
        {"/v1/heatmap", {{"room", "nowhere"}}},
    };
    TwinService a(shipped());
    TwinService b(shipped());
    fill(a, 5);
    fill(b, 5);
    const auto office_day = office::day({{11 * 60, 14 * 60}});
    for (auto* svc : {&a, &b}) {
        std::vector<core::Sample> door;
        for (const auto& d : office_day.doors) {
            door.push_back({d.time, d.open ? 1.0 : 0.0});
        }
        svc->store().append("2OfficeDoor", door);
    }
    for (const auto& [path, query] : requests) {
        CAPTURE(path);
        const auto first = get(a, path, query);
        const auto again = get(a, path, query);
        const auto other = get(b, path, query);
        CHECK(first.body == again.body);
        CHECK(first.body == other.body);
        CHECK(first.status == other.status);
        CHECK(first.headers == again.headers);
    }
}

TEST_CASE("recommend endpoint") {
    TwinService svc(shipped());
    const auto matrix = recommender::load_behavior_csv(svc.config().recommender.behavior_matrix);
    const auto* day23 = matrix.find("house", 23);
    Json req = {{"user", "house"}, {"temps", day23->outdoor_temps}};
    auto r = post(svc, "/v1/recommend", req.dump());
    REQUIRE(r.status == 200);
    auto doc = body_of(r);
    // day 23 itself is in the shipped matrix, so it dominates with the zero-RMSE weight
    CHECK(doc["recommended_step"] == 204);
    CHECK(doc["clock"] == "17:00");

    // a duplicated stored day lands on that day's lit step when only the house counts
    Json dup = {{"temps", matrix.find("house", 40)->outdoor_temps}, {"min_corr", 0.9999}};
    doc = body_of(post(svc, "/v1/recommend", dup.dump()));
    CHECK(doc["recommended_step"] == *matrix.find("house", 40)->lit_step);
    CHECK(doc["contributing_users"].size() == 1);

    Json far = {{"temps", std::vector<double>(288, 35.0)}};
    auto none = post(svc, "/v1/recommend", far.dump());
    CHECK(none.status == 422);
    CHECK(body_of(none)["error"]["message"].get<std::string>().find("insufficient behavioral data") == 0);

    CHECK(post(svc, "/v1/recommend", R"({"temps":[1,2,3]})").status == 422);
    CHECK(post(svc, "/v1/recommend", "not json").status == 422);
    Json ghost = {{"user", "ghost"}, {"temps", day23->outdoor_temps}};
    CHECK(post(svc, "/v1/recommend", ghost.dump()).status == 404);
    CHECK(get(svc, "/v1/recommend").status == 405);

    auto c = shipped();
    c.recommender.behavior_matrix.clear();
    TwinService empty(c);
    CHECK(post(empty, "/v1/recommend", req.dump()).status == 422);
}

TEST_CASE("occupancy endpoint on the office day") {
    TwinService svc(shipped());
    const auto day = office::day({{11 * 60, 14 * 60}});
    std::ostringstream csv;
    std::vector<core::Observation> rows;
    for (std::size_t k = 0; k < day.temperature.size(); ++k) {
        rows.push_back({"2OfficeDesk", day.temperature.time_at(k), day.temperature.values[k]});
    }
    for (const auto& d : day.doors) {
        rows.push_back({"2OfficeDoor", d.time, d.open ? 1.0 : 0.0});
    }
    core::write_observations_csv(csv, rows);
    const auto ing = post(svc, "/v1/ingest", csv.str(), "text/csv");
    REQUIRE(ing.status == 200);
    CHECK(body_of(ing)["accepted"] == rows.size());

    const auto r = get(svc, "/v1/occupancy",
                       {{"room", "office"}, {"from", "2022-01-21T00:00Z"}, {"to", "2022-01-21T23:55Z"}});
    REQUIRE(r.status == 200);
    const auto doc = body_of(r);
    REQUIRE(doc["events"].size() == 1);
    const auto& e = doc["events"][0];
    const double overlap = diagnostics::interval_overlap(
        core::Timestamp::parse(e["start"].get<std::string>()), core::Timestamp::parse(e["end"].get<std::string>()),
        core::Timestamp::parse("2022-01-21T11:00Z"), core::Timestamp::parse("2022-01-21T14:00Z"));
    CHECK(overlap >= 0.9);

    CHECK(get(svc, "/v1/occupancy", {{"room", "kitchen"}}).status == 404);
    CHECK(get(svc, "/v1/occupancy", {{"room", "attic"}}).status == 404);
}

TEST_CASE("ingest accepts JSON batches") {
    TwinService svc(shipped());
    const auto r = post(svc, "/v1/ingest", R"({"observations":[
        {"sensor_id":"2Stair","timestamp":"2022-01-01T00:00:00Z","value":20.5},
        {"sensor_id":"2Stair","timestamp":"2022-01-01T00:05:00Z","value":null},
        {"sensor_id":"2Stair","timestamp":"2022-01-01T00:10:00+00:00","value":20.7}]})");
    REQUIRE(r.status == 200);
    CHECK(body_of(r)["accepted"] == 2);
    CHECK(body_of(r)["skipped"] == 1);
    CHECK(svc.store().snapshot()->size("2Stair") == 2);
    CHECK(post(svc, "/v1/ingest", R"([{"sensor_id":"x"}])").status == 422);
    CHECK(post(svc, "/v1/ingest", "sensor_id,timestamp_rfc3339,value\nx,garbage,1\n", "text/csv").status == 422);
    CHECK(svc.store().version() == 1);
}

TEST_CASE("routing errors") {
    TwinService svc(shipped());
    CHECK(get(svc, "/v2/capability").status == 404);
    CHECK(get(svc, "/v1/teleport").status == 404);
    CHECK(post(svc, "/v1/capability", "").status == 405);
    const auto body = body_of(get(svc, "/v1/teleport"));
    CHECK(body["error"]["code"] == "not_found");
    CHECK(body.contains("snapshot"));
}

TEST_CASE("store warming up answers 503") {
    auto c = shipped();
    ingestion::SourceConfig dead;
    dead.source_id = "dead";
    dead.kind = ingestion::SourceKind::poll_bearer;
    dead.endpoint = "http://127.0.0.1:9/sensors";
    dead.poll_interval_s = 3600;
    dead.credentials["token"] = "t";
    c.sources.push_back(dead);
    TwinService svc(c);
    CHECK_FALSE(svc.warming_up());
    svc.start_sources();
    CHECK(svc.warming_up());
    CHECK(get(svc, "/v1/sensors/2Fireplace/series").status == 503);
    CHECK(get(svc, "/v1/forecast", {{"sensor", "2Fireplace"}}).status == 503);
    CHECK(get(svc, "/v1/capability").status == 200);
    fill(svc, 1);
    CHECK_FALSE(svc.warming_up());
    svc.stop_sources();
}

TEST_CASE("HTTP front end serves the same bodies") {
    TwinService svc(shipped());
    fill(svc, 1);
    HttpFrontend http(svc);
    const int port = http.start("127.0.0.1", 0);
    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/v1/sun?date=2022-03-07&time=12:00");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == get(svc, "/v1/sun", {{"date", "2022-03-07"}, {"time", "12:00"}}).body);
    CHECK(res->get_header_value("X-Snapshot-Version") == "1");
    auto missing = client.Get("/v1/sensors/nope/series");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    Json req = {{"temps", std::vector<double>(288, -6.0)}};
    auto rec = client.Post("/v1/recommend", req.dump(), "application/json");
    REQUIRE(rec);
    CHECK(rec->status == 200);

    HttpFrontend clash(svc);
    CHECK_THROWS_AS(clash.start("127.0.0.1", port), Error);
    http.stop();
}

TEST_CASE("store persists through the configured path") {
    const auto dir = std::filesystem::temp_directory_path() / "hometwin_service_store";
    std::filesystem::remove_all(dir);
    auto c = shipped();
    c.store.path = dir;
    {
        TwinService svc(c);
        fill(svc, 1);
        svc.save();
    }
    TwinService again(c);
    CHECK(again.store().snapshot()->size("2Fireplace") == 288);
    std::filesystem::remove_all(dir);
}
