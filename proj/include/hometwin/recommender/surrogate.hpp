#pragma once

#include "hometwin/recommender/behavior.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace hometwin::recommender {

inline constexpr const char* kHouseUser = "house";
inline constexpr int kSurrogateDays = 102;
inline constexpr int kHeldOutDay = 23;

struct SurrogateData {
    BehaviorMatrix matrix;
    std::map<int, std::vector<double>> house_fireplace; // per day, 288 values
};

/// A 102-day behavior matrix: the observed house lights the fireplace on eight days (lit steps extracted from
/// simulated fireplace traces), plus three artificial neighbours. Days 1, 2 and 25
/// are the event days whose weather lies within 1.5 RMSE of day 23.
SurrogateData behavior_surrogate(std::uint64_t seed = 23);

} // namespace hometwin::recommender
