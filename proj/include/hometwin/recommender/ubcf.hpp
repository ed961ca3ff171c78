#pragma once

#include "hometwin/recommender/behavior.hpp"

#include <span>
#include <string>
#include <vector>

namespace hometwin::recommender {

/// RMSE values below this are clamped before taking reciprocals.
inline constexpr double kScenarioRmseFloor = 1e-6;

struct DayWeight {
    std::string user;
    int day = 0;
    double rmse = 0.0;
    double weight = 0.0;
};

/// Days on which `user` lit the fireplace and whose outdoor profile lies within
/// `rmse_threshold` of `input`, weighted by 1 / max(rmse, floor).
/// Throws Error(insufficient_data) "no similar scenarios" when none qualify.
std::vector<DayWeight> scenario_weights(std::span<const double> input, const BehaviorMatrix& matrix,
                                        const std::string& user, double rmse_threshold);

struct UserWeight {
    std::string user;
    double pearson = 0.0;
    double weight = 0.0;
};

/// Pearson correlation of lit steps over the days both users lit the fireplace,
/// with means taken over those days. Pairs sharing fewer than two days, or with no
/// spread, are skipped.
std::optional<double> lit_step_correlation(const BehaviorMatrix& matrix, std::size_t p, std::size_t q);

/// The target first with weight 1, then every other user whose correlation is at least `min_corr`.
std::vector<UserWeight> user_weights(const BehaviorMatrix& matrix, const std::string& target, double min_corr);

struct RecommendOptions {
    double rmse_threshold = 1.5;
    double min_corr = 0.3;
};

struct UserPrediction {
    std::string user;
    double step = 0.0;
};

struct RecommendationResult {
    int recommended_step = 0;
    double unrounded_step = 0.0;
    std::vector<DayWeight> contributing_days;
    std::vector<UserWeight> contributing_users;
    std::vector<UserPrediction> user_predictions;
};

/// Per user, the RMSE-weighted mean lit step over that user's qualifying days;
/// then the correlation-weighted mean over users, rounded to the nearest step.
/// Throws Error(not_found) for an unknown target, Error(invalid_argument) for a
/// scenario that is not 288 finite values and Error(insufficient_data)
/// "insufficient behavioral data" when no user has a qualifying day.
RecommendationResult recommend(std::span<const double> input, const BehaviorMatrix& matrix, const std::string& target,
                               const RecommendOptions& options = {});

/// Step index to clock text, 0 -> "00:00", 204 -> "17:00".
std::string step_to_clock(int step);

} // namespace hometwin::recommender
