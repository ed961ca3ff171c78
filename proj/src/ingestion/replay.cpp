#include "hometwin/ingestion/replay.hpp"

#include "hometwin/core/csv.hpp"
#include "hometwin/core/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>

namespace hometwin::ingestion {

ReplaySpeed ReplaySpeed::scaled(double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw Error(ErrorCode::invalid_argument, "replay speed must be a positive number");
    }
    return ReplaySpeed{factor};
}

ReplaySpeed ReplaySpeed::parse(std::string_view text) {
    if (text == "instant") {
        return instant();
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::invalid_argument, "replay speed must be 'instant' or a number, got '" + std::string(text) + "'");
    }
    return scaled(v);
}

std::vector<core::Observation> load_replay(const std::filesystem::path& path) {
    auto rows = core::read_observations_csv(path);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const core::Observation& a, const core::Observation& b) { return a.time < b.time; });
    return rows;
}

std::size_t replay(const std::filesystem::path& path, ReplaySpeed speed, const ObservationSink& sink,
                   std::stop_token stop) {
    const auto rows = load_replay(path);
    if (rows.empty()) {
        return 0;
    }
    if (!speed.factor) {
        sink(rows);
        return rows.size();
    }
    std::mutex m;
    std::condition_variable_any cv;
    std::size_t delivered = 0;
    std::size_t begin = 0;
    while (begin < rows.size()) {
        if (stop.stop_requested()) {
            break;
        }
        std::size_t end = begin;
        while (end < rows.size() && rows[end].time == rows[begin].time) {
            ++end;
        }
        if (begin > 0) {
            const double gap_s = static_cast<double>((rows[begin].time - rows[begin - 1].time).count()) * 60.0;
            const auto wait = std::chrono::duration<double>(gap_s / *speed.factor);
            std::unique_lock lock(m);
            if (cv.wait_for(lock, stop, wait, [] { return false; })) {
                break;
            }
            if (stop.stop_requested()) {
                break;
            }
        }
        sink(std::span<const core::Observation>(rows.data() + begin, end - begin));
        delivered += end - begin;
        begin = end;
    }
    return delivered;
}

} // namespace hometwin::ingestion
