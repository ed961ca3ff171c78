#pragma once

#include "hometwin/ingestion/event_store.hpp"
#include "hometwin/ingestion/http.hpp"
#include "hometwin/ingestion/source.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <stop_token>
#include <string>
#include <thread>

namespace hometwin::ingestion {

struct SourceStatus {
    std::atomic<std::size_t> polls{0};
    std::atomic<std::size_t> observations{0};
    std::atomic<std::size_t> skipped{0};
    std::atomic<std::size_t> failures{0};
    std::atomic<bool> finished{false};
};

/// One writer thread per source feeding an EventStore. Replay sources run at
/// instant speed unless a `speed` credential is given; the simulator source
/// writes its whole run once; polling sources loop on poll_interval_s.
class SourceTask {
public:
    SourceTask(SourceConfig config, EventStore& store, std::shared_ptr<HttpTransport> transport = nullptr);
    ~SourceTask();
    SourceTask(const SourceTask&) = delete;
    SourceTask& operator=(const SourceTask&) = delete;

    void start();
    void stop();
    const SourceConfig& config() const { return config_; }
    const SourceStatus& status() const { return status_; }

private:
    void run(std::stop_token stop);

    SourceConfig config_;
    EventStore& store_;
    std::shared_ptr<HttpTransport> transport_;
    SourceStatus status_;
    std::jthread thread_;
};

} // namespace hometwin::ingestion
