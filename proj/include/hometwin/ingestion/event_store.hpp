#pragma once

#include "hometwin/core/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace hometwin::ingestion {

/// Immutable view of every sensor log at one store version.
class StoreSnapshot {
public:
    using Chunk = std::vector<core::Sample>; // sorted by time
    struct Log {
        std::vector<std::shared_ptr<const Chunk>> chunks;
        std::size_t count = 0;
        core::Timestamp first;
        core::Timestamp last;
    };

    std::uint64_t version() const { return version_; }
    std::vector<std::string> sensors() const;
    bool contains(const std::string& sensor_id) const { return logs_.count(sensor_id) != 0; }
    std::size_t size(const std::string& sensor_id) const;
    std::size_t total_size() const;

    /// All points in [from, to], sorted by time; equal times keep append order.
    /// Unknown sensor throws Error(not_found); from > to throws Error(invalid_argument).
    std::vector<core::Sample> query(const std::string& sensor_id, core::Timestamp from, core::Timestamp to) const;
    std::vector<core::Sample> all(const std::string& sensor_id) const;
    /// Time of the last point at or before `at`, if any.
    std::optional<core::Sample> latest_at(const std::string& sensor_id, core::Timestamp at) const;
    /// Smallest first-time and largest last-time over all logs.
    std::optional<std::pair<core::Timestamp, core::Timestamp>> time_span() const;

private:
    friend class EventStore;
    std::uint64_t version_ = 0;
    std::map<std::string, Log> logs_;
};

/// Append-only per-sensor store. Writers serialize on a mutex and publish a new
/// snapshot per batch; readers take the current snapshot without blocking writers.
class EventStore {
public:
    EventStore() : current_(std::make_shared<const StoreSnapshot>()) {}

    /// Appends one batch atomically. Observations without a value are skipped
    /// and counted in the return value.
    std::size_t append(std::span<const core::Observation> batch);
    void append(const std::string& sensor_id, std::span<const core::Sample> samples);

    std::shared_ptr<const StoreSnapshot> snapshot() const;
    std::uint64_t version() const { return snapshot()->version(); }

    std::vector<core::Sample> query(const std::string& sensor_id, core::Timestamp from, core::Timestamp to) const {
        return snapshot()->query(sensor_id, from, to);
    }

    /// Directory layout: `index.tsv` (sensor, file, count, first, last) plus one
    /// observation CSV per sensor. Files are written beside and renamed into place.
    void save(const std::filesystem::path& dir) const;
    /// Replaces the content with a saved directory. Missing directory yields an empty store.
    void load(const std::filesystem::path& dir);

private:
    void publish(std::map<std::string, std::vector<core::Sample>>&& additions);

    mutable std::mutex write_mutex_;
    mutable std::mutex publish_mutex_;
    std::shared_ptr<const StoreSnapshot> current_;
};

} // namespace hometwin::ingestion
