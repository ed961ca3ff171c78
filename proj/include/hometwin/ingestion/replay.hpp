#pragma once

#include "hometwin/core/types.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stop_token>
#include <vector>

namespace hometwin::ingestion {

/// Emission pace of a replay: instant, or `factor` times real time.
struct ReplaySpeed {
    std::optional<double> factor;

    static ReplaySpeed instant() { return {}; }
    static ReplaySpeed scaled(double factor);
    /// "instant" or a positive number.
    static ReplaySpeed parse(std::string_view text);
};

/// Reads a core observation CSV and sorts it by time (stable for ties).
std::vector<core::Observation> load_replay(const std::filesystem::path& path);

using ObservationSink = std::function<void(std::span<const core::Observation>)>;

/// Emits observations in time order. Instant speed delivers one batch; a scaled
/// speed sleeps the scaled gap between distinct timestamps and emits per instant.
/// Returns the number of observations delivered before completion or a stop request.
std::size_t replay(const std::filesystem::path& path, ReplaySpeed speed, const ObservationSink& sink,
                   std::stop_token stop = {});

} // namespace hometwin::ingestion
