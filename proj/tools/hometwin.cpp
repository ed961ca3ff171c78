#include "hometwin/core/csv.hpp"
#include "hometwin/core/error.hpp"
#include "hometwin/ingestion/event_store.hpp"
#include "hometwin/ingestion/replay.hpp"
#include "hometwin/ingestion/simulator.hpp"
#include "hometwin/recommender/surrogate.hpp"
#include "hometwin/recommender/ubcf.hpp"
#include "hometwin/service/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

using namespace hometwin;
using namespace hometwin::service;

namespace {

struct Common {
    std::string config;
    std::string store;
};

TwinConfig config_of(const Common& c, bool required) {
    std::optional<std::filesystem::path> cli;
    if (!c.config.empty()) {
        cli = c.config;
    }
    const auto path = resolve_config_path(cli);
    if (!path) {
        if (required) {
            throw Error(ErrorCode::config, "no config: pass --config or set TWIN_CONFIG");
        }
        return TwinConfig{};
    }
    auto cfg = load_twin_config(*path);
    if (!c.store.empty()) {
        cfg.store.path = c.store;
    }
    return cfg;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::invalid_argument, "cannot write '" + path + "'");
    }
    return out;
}

int serve(const Common& common, const std::string& listen, bool no_sources) {
    auto cfg = config_of(common, true);
    if (!listen.empty()) {
        const auto colon = listen.rfind(':');
        if (colon == std::string::npos) {
            throw Error(ErrorCode::config, "--listen expects host:port");
        }
        cfg.listen.host = listen.substr(0, colon);
        cfg.listen.port = std::stoi(listen.substr(colon + 1));
    }
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    TwinService svc(cfg);
    HttpFrontend http(svc);
    const int port = http.start(cfg.listen.host, cfg.listen.port);
    if (!no_sources) {
        svc.start_sources();
    }
    std::cerr << "listening on " << cfg.listen.host << ":" << port << "\n";
    int sig = 0;
    sigwait(&signals, &sig);
    std::cerr << "stopping\n";
    http.stop();
    svc.stop_sources();
    svc.save();
    return 0;
}

int replay_cmd(const Common& common, const std::string& file) {
    auto cfg = config_of(common, false);
    if (cfg.store.path.empty()) {
        throw Error(ErrorCode::invalid_argument, "replay needs --store or a config with a store path");
    }
    ingestion::EventStore store;
    store.load(cfg.store.path);
    std::size_t skipped = 0;
    const auto n = ingestion::replay(file, ingestion::ReplaySpeed::instant(),
                                     [&](std::span<const core::Observation> rows) { skipped += store.append(rows); });
    store.save(cfg.store.path);
    std::cout << "replayed " << n << " observations (" << skipped << " gaps) into " << cfg.store.path.string() << "\n";
    return 0;
}

int forecast_cmd(const Common& common, const std::string& sensor, int horizon, const std::string& models,
                 const std::string& input) {
    auto cfg = config_of(common, false);
    ingestion::EventStore store;
    if (!input.empty()) {
        store.append(core::read_observations_csv(std::filesystem::path(input)));
    } else if (!cfg.store.path.empty()) {
        store.load(cfg.store.path);
    } else {
        throw Error(ErrorCode::invalid_argument, "forecast needs --input, --store or a config with a store path");
    }
    std::vector<forecasting::ModelKind> kinds;
    std::vector<std::string> names = cfg.forecasting.models;
    if (!models.empty()) {
        names.clear();
        std::istringstream in(models);
        for (std::string m; std::getline(in, m, ',');) {
            names.push_back(m);
        }
    }
    for (const auto& m : names) {
        const auto k = forecasting::parse_model_kind(m);
        if (!k || *k == forecasting::ModelKind::external) {
            throw Error(ErrorCode::invalid_argument, "unknown model '" + m + "'");
        }
        kinds.push_back(*k);
    }
    const auto history = sensor_series(*store.snapshot(), cfg.house, sensor);
    const auto out = forecast_series(history, static_cast<std::size_t>(horizon), kinds, cfg.forecasting);
    core::write_series_csv(std::cout, out.forecast.combined, "ensemble");
    const auto weights = out.ensemble.normalized_weights();
    for (std::size_t m = 0; m < out.ensemble.members.size(); ++m) {
        std::cerr << out.ensemble.members[m].label() << " val_rmse=" << core::format_double(out.ensemble.val_rmse[m])
                  << " weight=" << core::format_double(weights[m]) << "\n";
    }
    return 0;
}

int sun_cmd(const Common& common, const std::string& date, const std::string& time) {
    const auto cfg = config_of(common, false);
    std::cout << sun_document(cfg.house, core::CivilDate::parse(date), time).dump(2) << "\n";
    return 0;
}

int sun_hours_cmd(const Common& common, int year, const std::string& mask_path, bool json) {
    const auto cfg = config_of(common, false);
    std::optional<solar::HorizonMask> mask;
    if (!mask_path.empty()) {
        mask = solar::HorizonMask::load(mask_path);
    } else if (!cfg.horizon_mask.empty()) {
        mask = solar::HorizonMask::load(cfg.horizon_mask);
    }
    const auto doc = sun_hours_document(cfg.house, year, mask ? &*mask : nullptr);
    if (json) {
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::cout << "date,first_lit,last_lit,lit_minutes\n";
    for (const auto& m : doc["months"]) {
        auto text = [](const Json& v) { return v.is_null() ? std::string() : v.get<std::string>(); };
        std::cout << m["date"].get<std::string>() << "," << text(m["first_lit"]) << "," << text(m["last_lit"]) << ","
                  << m["lit_minutes"].get<int>() << "\n";
    }
    return 0;
}

int heatmap_cmd(const Common& common, const std::string& room, const std::string& at, const std::string& format) {
    auto cfg = config_of(common, true);
    cfg.sources.clear();
    TwinService svc(cfg);
    Request r;
    r.path = "/v1/heatmap";
    r.query = {{"room", room}, {"format", format}};
    if (!at.empty()) {
        r.query["at"] = at;
    }
    const auto res = svc.handle(r);
    if (res.status != 200) {
        std::cerr << "error: " << Json::parse(res.body)["error"]["message"].get<std::string>() << "\n";
        return 1;
    }
    std::cout << res.body;
    return 0;
}

int recommend_cmd(const Common& common, const std::string& scenario, std::string user, std::string matrix_path,
                  std::optional<double> threshold, std::optional<double> min_corr, bool json) {
    const auto cfg = config_of(common, false);
    if (matrix_path.empty()) {
        matrix_path = cfg.recommender.behavior_matrix.string();
    }
    if (matrix_path.empty()) {
        throw Error(ErrorCode::invalid_argument, "recommend needs --matrix or a config with a behavior matrix");
    }
    if (user.empty()) {
        user = cfg.recommender.user;
    }
    std::ifstream in(scenario);
    if (!in) {
        throw Error(ErrorCode::invalid_argument, "cannot read scenario '" + scenario + "'");
    }
    const auto temps = recommender::read_scenario(in, scenario);
    const auto matrix = recommender::load_behavior_csv(matrix_path);
    recommender::RecommendOptions opt{threshold.value_or(cfg.recommender.rmse_threshold),
                                      min_corr.value_or(cfg.recommender.min_corr)};
    const auto r = recommender::recommend(temps, matrix, user, opt);
    if (json) {
        Json doc = {{"user", user},
                    {"recommended_step", r.recommended_step},
                    {"clock", recommender::step_to_clock(r.recommended_step)},
                    {"unrounded_step", r.unrounded_step}};
        Json days = Json::array();
        for (const auto& d : r.contributing_days) {
            days.push_back({{"user", d.user}, {"day", d.day}, {"rmse", d.rmse}, {"weight", d.weight}});
        }
        doc["contributing_days"] = std::move(days);
        Json users = Json::array();
        for (const auto& u : r.contributing_users) {
            users.push_back({{"user", u.user}, {"pearson", u.pearson}, {"weight", u.weight}});
        }
        doc["contributing_users"] = std::move(users);
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::cout << "recommended_step " << r.recommended_step << " (" << recommender::step_to_clock(r.recommended_step)
              << " UTC)\n";
    for (const auto& d : r.contributing_days) {
        std::cout << "  day " << d.day << " " << d.user << " rmse " << core::format_double(d.rmse) << "\n";
    }
    for (const auto& u : r.contributing_users) {
        std::cout << "  user " << u.user << " pearson " << core::format_double(u.pearson) << "\n";
    }
    return 0;
}

int simulate_cmd(int days, std::uint64_t seed, const std::string& out, const std::string& behavior_out) {
    ingestion::SimulatorConfig sim;
    sim.days = days;
    sim.seed = seed;
    const auto rows = ingestion::simulate_observations(sim);
    if (out.empty() || out == "-") {
        core::write_observations_csv(std::cout, rows);
    } else {
        auto f = open_out(out);
        core::write_observations_csv(f, rows);
        std::cerr << "wrote " << rows.size() << " observations to " << out << "\n";
    }
    if (!behavior_out.empty()) {
        auto f = open_out(behavior_out);
        recommender::write_behavior_csv(f, recommender::behavior_surrogate().matrix);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hometwin: digital twin engine for an instrumented house"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config, "twin config file (TWIN_CONFIG overrides)");
    app.add_option("--store", common.store, "store directory, overrides the config");

    std::string listen;
    bool no_sources = false;
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP API");
    serve_cmd->add_option("--listen", listen, "host:port, overrides the config");
    serve_cmd->add_flag("--no-sources", no_sources, "do not start ingestion sources");

    std::string replay_file;
    auto* replay = app.add_subcommand("replay", "load an observation CSV into the store");
    replay->add_option("file", replay_file, "observation CSV")->required();

    std::string sensor = "2Fireplace", models, input;
    int horizon = 288;
    auto* forecast = app.add_subcommand("forecast", "ensemble forecast of one sensor as CSV");
    forecast->add_option("--sensor", sensor);
    forecast->add_option("--horizon", horizon)->check(CLI::Range(1, 100000));
    forecast->add_option("--models", models, "comma list: arima,prophet,gbm,stack,random-walk");
    forecast->add_option("--input", input, "observation CSV instead of the store");

    std::string date, time = "12:00";
    auto* sun = app.add_subcommand("sun", "sun position for the house");
    sun->add_option("--date", date, "YYYY-MM-DD")->required();
    sun->add_option("--time", time, "HH:MM UTC");

    int year = 2022;
    std::string mask;
    bool hours_json = false;
    auto* sun_hours = app.add_subcommand("sun-hours", "lit minutes on the last day of each month");
    sun_hours->add_option("--year", year);
    sun_hours->add_option("--mask", mask, "horizon mask CSV");
    sun_hours->add_flag("--json", hours_json);

    std::string room, at, format = "json";
    auto* heatmap = app.add_subcommand("heatmap", "heat map grid of a room");
    heatmap->add_option("--room", room)->required();
    heatmap->add_option("--at", at, "RFC 3339 time, default latest");
    heatmap->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

    std::string scenario, user, matrix;
    std::optional<double> threshold, min_corr;
    bool rec_json = false;
    auto* recommend = app.add_subcommand("recommend", "fireplace lighting step for a scenario day");
    recommend->add_option("--scenario", scenario, "288 outdoor temperatures")->required();
    recommend->add_option("--user", user);
    recommend->add_option("--matrix", matrix, "behavior matrix CSV");
    recommend->add_option("--rmse-threshold", threshold);
    recommend->add_option("--min-corr", min_corr);
    recommend->add_flag("--json", rec_json);

    int sim_days = 90;
    std::uint64_t seed = 42;
    std::string out = "-", behavior_out;
    auto* simulate = app.add_subcommand("simulate", "write simulator observations as CSV");
    simulate->add_option("--days", sim_days)->check(CLI::Range(1, 3650));
    simulate->add_option("--seed", seed);
    simulate->add_option("--out", out, "output file, - for stdout");
    simulate->add_option("--behavior-out", behavior_out, "also write the surrogate behavior matrix");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*serve_cmd) return serve(common, listen, no_sources);
        if (*replay) return replay_cmd(common, replay_file);
        if (*forecast) return forecast_cmd(common, sensor, horizon, models, input);
        if (*sun) return sun_cmd(common, date, time);
        if (*sun_hours) return sun_hours_cmd(common, year, mask, hours_json);
        if (*heatmap) return heatmap_cmd(common, room, at, format);
        if (*recommend) return recommend_cmd(common, scenario, user, matrix, threshold, min_corr, rec_json);
        if (*simulate) return simulate_cmd(sim_days, seed, out, behavior_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::config ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
