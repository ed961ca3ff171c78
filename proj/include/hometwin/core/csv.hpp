#pragma once

#include "hometwin/core/series.hpp"
#include "hometwin/core/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hometwin::core {

inline constexpr std::string_view kObservationCsvHeader = "sensor_id,timestamp_rfc3339,value";

/// Parses the observation CSV. Malformed rows raise Error(invalid_argument) naming
/// `origin` and the 1-based line number.
std::vector<Observation> read_observations_csv(std::istream& in, std::string_view origin = "<stream>");
std::vector<Observation> read_observations_csv(const std::filesystem::path& path);

void write_observations_csv(std::ostream& out, std::span<const Observation> rows);

/// Writes a series in the observation format; a non-empty `model` adds a trailing `model` column.
void write_series_csv(std::ostream& out, const TimeSeries& series, std::string_view model = {});

std::vector<std::string> split_csv_line(std::string_view line);
std::string format_double(double value);

} // namespace hometwin::core
