#include "hometwin/ingestion/poller.hpp"

#include "hometwin/core/error.hpp"
#include "hometwin/ingestion/poll.hpp"
#include "hometwin/ingestion/replay.hpp"
#include "hometwin/ingestion/simulator.hpp"
#include "hometwin/ingestion/token.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <mutex>

namespace hometwin::ingestion {

namespace {

SimulatorConfig simulator_config(const SourceConfig& cfg) {
    SimulatorConfig sim;
    auto get = [&](const char* key) -> const std::string* {
        auto it = cfg.credentials.find(key);
        return it == cfg.credentials.end() ? nullptr : &it->second;
    };
    try {
        if (auto v = get("seed")) {
            sim.seed = std::stoull(*v);
        }
        if (auto v = get("days")) {
            sim.days = std::stoi(*v);
        }
        if (auto v = get("start")) {
            sim.start = core::Timestamp::parse(*v);
        }
        if (auto v = get("significant_change")) {
            sim.significant_change = std::stod(*v);
        }
        if (auto v = get("heartbeat_minutes")) {
            sim.heartbeat_minutes = std::stoi(*v);
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::config, "source '" + cfg.source_id + "': bad simulator parameter");
    }
    return sim;
}

} // namespace

SourceTask::SourceTask(SourceConfig config, EventStore& store, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), store_(store), transport_(std::move(transport)) {
    config_.validate();
    if (is_polling(config_.kind) && !transport_) {
        transport_ = std::make_shared<HttplibTransport>();
    }
}

SourceTask::~SourceTask() { stop(); }

void SourceTask::start() {
    if (thread_.joinable()) {
        return;
    }
    thread_ = std::jthread([this](std::stop_token st) { run(st); });
}

void SourceTask::stop() {
    if (thread_.joinable()) {
        thread_.request_stop();
        thread_.join();
    }
}

void SourceTask::run(std::stop_token stop) {
    auto sink = [this](std::span<const core::Observation> batch) {
        store_.append(batch);
        status_.observations += batch.size();
    };
    try {
        if (config_.kind == SourceKind::replay) {
            auto speed = ReplaySpeed::instant();
            if (auto it = config_.credentials.find("speed"); it != config_.credentials.end()) {
                speed = ReplaySpeed::parse(it->second);
            }
            replay(config_.credential("path"), speed, sink, stop);
            ++status_.polls;
        } else if (config_.kind == SourceKind::simulator) {
            const auto rows = simulate_observations(simulator_config(config_));
            sink(rows);
            ++status_.polls;
        } else {
            TokenManager tokens(config_, *transport_);
            std::mutex m;
            std::condition_variable_any cv;
            while (!stop.stop_requested()) {
                try {
                    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
                    PollResult r = poll_once(config_, tokens.acquire(now), *transport_);
                    sink(r.observations);
                    status_.skipped += r.skipped;
                    ++status_.polls;
                } catch (const Error& e) {
                    ++status_.failures;
                    if (e.code() == ErrorCode::unauthorized) {
                        tokens.invalidate();
                    }
                    std::fprintf(stderr, "source %s: %s\n", config_.source_id.c_str(), e.what());
                }
                std::unique_lock lock(m);
                cv.wait_for(lock, stop, std::chrono::seconds(config_.poll_interval_s), [] { return false; });
            }
        }
    } catch (const std::exception& e) {
        ++status_.failures;
        std::fprintf(stderr, "source %s stopped: %s\n", config_.source_id.c_str(), e.what());
    }
    status_.finished = true;
}

} // namespace hometwin::ingestion
