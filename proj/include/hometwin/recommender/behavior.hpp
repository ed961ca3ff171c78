#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hometwin::recommender {

inline constexpr std::size_t kStepsPerDay = 288;
/// A day counts as a lighting event when its largest 5-minute rise exceeds this.
inline constexpr double kLitThresholdC = 1.0;

/// Step of the largest consecutive rise (earliest on ties), absent when that rise
/// is not above `threshold_c`. Throws Error(invalid_argument) unless 288 values.
std::optional<int> extract_lit_step(std::span<const double> fireplace_day, double threshold_c = kLitThresholdC);

struct ScenarioDay {
    int day = 0;
    std::vector<double> outdoor_temps; // 288 values
    std::optional<int> lit_step;
};

/// Users by days; every user row holds one ScenarioDay per entry of `days`.
struct BehaviorMatrix {
    std::vector<int> days;
    std::vector<std::string> users;
    std::vector<std::vector<ScenarioDay>> cells; // [user][day]

    /// Throws Error(invalid_argument) on shape, range or duplicate violations.
    void validate() const;
    std::size_t user_index(const std::string& user) const; // Error(not_found) when absent
    const ScenarioDay* find(const std::string& user, int day) const;
    BehaviorMatrix without_day(int day) const;
    BehaviorMatrix only_users(const std::vector<std::string>& keep) const;
    std::size_t event_count(const std::string& user) const;
};

inline constexpr std::string_view kBehaviorCsvFirstColumns = "user,day";

/// Columns `user,day,step0..step287,lit_step`; lit_step empty when absent.
BehaviorMatrix read_behavior_csv(std::istream& in, std::string_view origin = "<stream>");
BehaviorMatrix load_behavior_csv(const std::filesystem::path& path);
void write_behavior_csv(std::ostream& out, const BehaviorMatrix& matrix);

/// A 288-value scenario, either one `value` per line or the observation CSV.
std::vector<double> read_scenario(std::istream& in, std::string_view origin = "<stream>");

} // namespace hometwin::recommender
