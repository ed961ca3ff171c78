#include "hometwin/recommender/ubcf.hpp"

#include "hometwin/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hometwin::recommender {

namespace {

void check_scenario(std::span<const double> input) {
    if (input.size() != kStepsPerDay) {
        throw Error(ErrorCode::invalid_argument, "scenario needs 288 values, got " + std::to_string(input.size()));
    }
    for (double t : input) {
        if (!std::isfinite(t)) {
            throw Error(ErrorCode::invalid_argument, "scenario has a non-finite temperature");
        }
    }
}

double scenario_rmse(std::span<const double> a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double e = a[k] - b[k];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(a.size()));
}

std::vector<DayWeight> qualifying_days(std::span<const double> input, const BehaviorMatrix& matrix, std::size_t u,
                                       double rmse_threshold) {
    std::vector<DayWeight> out;
    for (const auto& c : matrix.cells[u]) {
        if (!c.lit_step) {
            continue;
        }
        const double r = scenario_rmse(input, c.outdoor_temps);
        if (r <= rmse_threshold) {
            out.push_back({matrix.users[u], c.day, r, 1.0 / std::max(r, kScenarioRmseFloor)});
        }
    }
    return out;
}

} // namespace

std::vector<DayWeight> scenario_weights(std::span<const double> input, const BehaviorMatrix& matrix,
                                        const std::string& user, double rmse_threshold) {
    check_scenario(input);
    auto out = qualifying_days(input, matrix, matrix.user_index(user), rmse_threshold);
    if (out.empty()) {
        throw Error(ErrorCode::insufficient_data, "no similar scenarios for user '" + user + "'");
    }
    return out;
}

std::optional<double> lit_step_correlation(const BehaviorMatrix& matrix, std::size_t p, std::size_t q) {
    std::vector<double> a, b;
    for (std::size_t d = 0; d < matrix.days.size(); ++d) {
        const auto& cp = matrix.cells[p][d];
        const auto& cq = matrix.cells[q][d];
        if (cp.lit_step && cq.lit_step) {
            a.push_back(*cp.lit_step);
            b.push_back(*cq.lit_step);
        }
    }
    if (a.size() < 2) {
        return std::nullopt;
    }
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        return std::nullopt;
    }
    return std::clamp(sab / (std::sqrt(saa) * std::sqrt(sbb)), -1.0, 1.0);
}

std::vector<UserWeight> user_weights(const BehaviorMatrix& matrix, const std::string& target, double min_corr) {
    const std::size_t t = matrix.user_index(target);
    std::vector<UserWeight> out = {{target, 1.0, 1.0}};
    for (std::size_t u = 0; u < matrix.users.size(); ++u) {
        if (u == t) {
            continue;
        }
        const auto r = lit_step_correlation(matrix, t, u);
        if (r && *r >= min_corr && *r > 0.0) {
            out.push_back({matrix.users[u], *r, *r});
        }
    }
    return out;
}

RecommendationResult recommend(std::span<const double> input, const BehaviorMatrix& matrix, const std::string& target,
                               const RecommendOptions& options) {
    check_scenario(input);
    const auto users = user_weights(matrix, target, options.min_corr);
    RecommendationResult r;
    double num = 0.0, den = 0.0;
    for (const auto& uw : users) {
        const std::size_t u = matrix.user_index(uw.user);
        const auto days = qualifying_days(input, matrix, u, options.rmse_threshold);
        if (days.empty()) {
            continue;
        }
        double dn = 0.0, dd = 0.0;
        for (const auto& d : days) {
            dn += d.weight * *matrix.find(uw.user, d.day)->lit_step;
            dd += d.weight;
        }
        const double step = dn / dd;
        r.user_predictions.push_back({uw.user, step});
        r.contributing_users.push_back(uw);
        r.contributing_days.insert(r.contributing_days.end(), days.begin(), days.end());
        num += uw.weight * step;
        den += uw.weight;
    }
    if (r.user_predictions.empty()) {
        throw Error(ErrorCode::insufficient_data,
                    "insufficient behavioral data: no similar lighting days for '" + target + "' or correlated users");
    }
    r.unrounded_step = num / den;
    r.recommended_step = std::clamp(static_cast<int>(std::lround(r.unrounded_step)), 0, static_cast<int>(kStepsPerDay) - 1);
    return r;
}

std::string step_to_clock(int step) {
    const int minutes = step * 5;
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", (minutes / 60) % 24, minutes % 60);
    return buf;
}

} // namespace hometwin::recommender
