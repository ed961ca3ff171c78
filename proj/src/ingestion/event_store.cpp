#include "hometwin/ingestion/event_store.hpp"

#include "hometwin/core/csv.hpp"
#include "hometwin/core/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hometwin::ingestion {

namespace {

bool by_time(const core::Sample& a, const core::Sample& b) { return a.time < b.time; }

} // namespace

std::vector<std::string> StoreSnapshot::sensors() const {
    std::vector<std::string> out;
    out.reserve(logs_.size());
    for (const auto& [id, log] : logs_) {
        out.push_back(id);
    }
    return out;
}

std::size_t StoreSnapshot::size(const std::string& sensor_id) const {
    auto it = logs_.find(sensor_id);
    return it == logs_.end() ? 0 : it->second.count;
}

std::size_t StoreSnapshot::total_size() const {
    std::size_t n = 0;
    for (const auto& [id, log] : logs_) {
        n += log.count;
    }
    return n;
}

std::vector<core::Sample> StoreSnapshot::query(const std::string& sensor_id, core::Timestamp from,
                                               core::Timestamp to) const {
    if (from > to) {
        throw Error(ErrorCode::invalid_argument, "query range has from > to");
    }
    auto it = logs_.find(sensor_id);
    if (it == logs_.end()) {
        throw Error(ErrorCode::not_found, "sensor '" + sensor_id + "' not found");
    }
    std::vector<core::Sample> out;
    std::size_t contributing = 0;
    for (const auto& chunk : it->second.chunks) {
        auto lo = std::lower_bound(chunk->begin(), chunk->end(), core::Sample{from, 0.0}, by_time);
        auto hi = std::upper_bound(lo, chunk->end(), core::Sample{to, 0.0}, by_time);
        if (lo != hi) {
            ++contributing;
            out.insert(out.end(), lo, hi);
        }
    }
    if (contributing > 1) {
        std::stable_sort(out.begin(), out.end(), by_time);
    }
    return out;
}

std::vector<core::Sample> StoreSnapshot::all(const std::string& sensor_id) const {
    return query(sensor_id, core::Timestamp::min(), core::Timestamp::max());
}

std::optional<core::Sample> StoreSnapshot::latest_at(const std::string& sensor_id, core::Timestamp at) const {
    auto it = logs_.find(sensor_id);
    if (it == logs_.end()) {
        throw Error(ErrorCode::not_found, "sensor '" + sensor_id + "' not found");
    }
    std::optional<core::Sample> best;
    for (const auto& chunk : it->second.chunks) {
        auto hi = std::upper_bound(chunk->begin(), chunk->end(), core::Sample{at, 0.0}, by_time);
        if (hi == chunk->begin()) {
            continue;
        }
        const core::Sample& s = *(hi - 1);
        if (!best || s.time >= best->time) {
            best = s;
        }
    }
    return best;
}

std::optional<std::pair<core::Timestamp, core::Timestamp>> StoreSnapshot::time_span() const {
    std::optional<std::pair<core::Timestamp, core::Timestamp>> out;
    for (const auto& [id, log] : logs_) {
        if (log.count == 0) {
            continue;
        }
        if (!out) {
            out.emplace(log.first, log.last);
        } else {
            out->first = std::min(out->first, log.first);
            out->second = std::max(out->second, log.last);
        }
    }
    return out;
}

std::size_t EventStore::append(std::span<const core::Observation> batch) {
    std::map<std::string, std::vector<core::Sample>> additions;
    std::size_t skipped = 0;
    for (const auto& obs : batch) {
        if (!obs.value) {
            ++skipped;
            continue;
        }
        additions[obs.sensor_id].push_back(core::Sample{obs.time, *obs.value});
    }
    publish(std::move(additions));
    return skipped;
}

void EventStore::append(const std::string& sensor_id, std::span<const core::Sample> samples) {
    std::map<std::string, std::vector<core::Sample>> additions;
    additions[sensor_id].assign(samples.begin(), samples.end());
    publish(std::move(additions));
}

std::shared_ptr<const StoreSnapshot> EventStore::snapshot() const {
    std::lock_guard lock(publish_mutex_);
    return current_;
}

void EventStore::publish(std::map<std::string, std::vector<core::Sample>>&& additions) {
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<StoreSnapshot>(*snapshot());
    for (auto& [id, samples] : additions) {
        StoreSnapshot::Log& log = next->logs_[id];
        if (samples.empty()) {
            continue;
        }
        std::stable_sort(samples.begin(), samples.end(), by_time);
        log.first = log.count == 0 ? samples.front().time : std::min(log.first, samples.front().time);
        log.last = log.count == 0 ? samples.back().time : std::max(log.last, samples.back().time);
        log.count += samples.size();
        log.chunks.push_back(std::make_shared<const StoreSnapshot::Chunk>(std::move(samples)));
        // keep chunk sizes geometric so queries touch O(log n) chunks
        while (log.chunks.size() >= 2 && log.chunks[log.chunks.size() - 2]->size() <= 2 * log.chunks.back()->size()) {
            const auto& older = *log.chunks[log.chunks.size() - 2];
            const auto& newer = *log.chunks.back();
            auto merged = std::make_shared<StoreSnapshot::Chunk>();
            merged->reserve(older.size() + newer.size());
            std::merge(older.begin(), older.end(), newer.begin(), newer.end(), std::back_inserter(*merged), by_time);
            log.chunks.pop_back();
            log.chunks.back() = std::move(merged);
        }
    }
    ++next->version_;
    std::lock_guard lock(publish_mutex_);
    current_ = std::move(next);
}

void EventStore::save(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    const auto snap = snapshot();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::config, "cannot create store directory '" + dir.string() + "': " + ec.message());
    }
    std::ostringstream index;
    index << "sensor_id\tfile\tcount\tfirst\tlast\n";
    std::size_t n = 0;
    for (const auto& [id, log] : snap->logs_) {
        if (id.find_first_of("\t\n") != std::string::npos) {
            throw Error(ErrorCode::invalid_argument, "sensor id with tab or newline cannot be persisted");
        }
        const std::string file = "sensor-" + std::to_string(n++) + ".csv";
        std::vector<core::Observation> rows;
        rows.reserve(log.count);
        for (const auto& s : snap->all(id)) {
            rows.push_back(core::Observation{id, s.time, s.value});
        }
        {
            std::ofstream out(dir / (file + ".tmp"), std::ios::trunc);
            core::write_observations_csv(out, rows);
            if (!out) {
                throw Error(ErrorCode::config, "cannot write '" + (dir / file).string() + "'");
            }
        }
        fs::rename(dir / (file + ".tmp"), dir / file);
        index << id << '\t' << file << '\t' << log.count << '\t' << log.first.to_string() << '\t'
              << log.last.to_string() << '\n';
    }
    {
        std::ofstream out(dir / "index.tsv.tmp", std::ios::trunc);
        out << index.str();
        if (!out) {
            throw Error(ErrorCode::config, "cannot write store index in '" + dir.string() + "'");
        }
    }
    fs::rename(dir / "index.tsv.tmp", dir / "index.tsv");
}

void EventStore::load(const std::filesystem::path& dir) {
    std::map<std::string, std::vector<core::Sample>> loaded;
    const auto index_path = dir / "index.tsv";
    if (std::filesystem::exists(index_path)) {
        std::ifstream in(index_path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line_no == 1 || line.empty()) {
                continue;
            }
            std::vector<std::string> cols;
            std::istringstream fields(line);
            for (std::string col; std::getline(fields, col, '\t');) {
                cols.push_back(col);
            }
            if (cols.size() != 5) {
                throw Error(ErrorCode::config, index_path.string() + ":" + std::to_string(line_no) + ": expected 5 columns");
            }
            auto& samples = loaded[cols[0]];
            for (const auto& obs : core::read_observations_csv(dir / cols[1])) {
                if (obs.sensor_id != cols[0] || !obs.value) {
                    throw Error(ErrorCode::config, (dir / cols[1]).string() + ": unexpected row for sensor '" + obs.sensor_id + "'");
                }
                samples.push_back(core::Sample{obs.time, *obs.value});
            }
            if (std::to_string(samples.size()) != cols[2]) {
                throw Error(ErrorCode::config, index_path.string() + ":" + std::to_string(line_no) +
                                                   ": count mismatch for '" + cols[0] + "'");
            }
        }
    }
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<StoreSnapshot>();
    next->version_ = snapshot()->version() + 1;
    for (auto& [id, samples] : loaded) {
        StoreSnapshot::Log log;
        std::stable_sort(samples.begin(), samples.end(), by_time);
        log.count = samples.size();
        if (!samples.empty()) {
            log.first = samples.front().time;
            log.last = samples.back().time;
            log.chunks.push_back(std::make_shared<const StoreSnapshot::Chunk>(std::move(samples)));
        }
        next->logs_.emplace(id, std::move(log));
    }
    std::lock_guard lock(publish_mutex_);
    current_ = std::move(next);
}

} // namespace hometwin::ingestion
