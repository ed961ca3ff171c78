#include <doctest.h>

#include "hometwin/core/error.hpp"
#include "hometwin/recommender/behavior.hpp"
#include "hometwin/recommender/surrogate.hpp"
#include "hometwin/recommender/ubcf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace hometwin;
using namespace hometwin::recommender;

namespace {

std::vector<double> flat(double t) { return std::vector<double>(kStepsPerDay, t); }

std::vector<double> profile(double mean, double amp) {
    std::vector<double> v(kStepsPerDay);
    for (std::size_t k = 0; k < kStepsPerDay; ++k) {
        v[k] = mean + amp * std::sin(2.0 * 3.141592653589793 * static_cast<double>(k) / kStepsPerDay);
    }
    return v;
}

// one user per entry of `steps`, every user shares the same weather per day
BehaviorMatrix matrix_of(const std::vector<std::vector<double>>& weather, const std::vector<std::vector<std::optional<int>>>& steps) {
    BehaviorMatrix m;
    for (std::size_t d = 0; d < weather.size(); ++d) {
        m.days.push_back(static_cast<int>(d) + 1);
    }
    for (std::size_t u = 0; u < steps.size(); ++u) {
        m.users.push_back(u == 0 ? "me" : "u" + std::to_string(u));
        m.cells.emplace_back();
        for (std::size_t d = 0; d < weather.size(); ++d) {
            m.cells[u].push_back({m.days[d], weather[d], steps[u][d]});
        }
    }
    m.validate();
    return m;
}

int code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return static_cast<int>(e.code());
    }
    return -1;
}

} // namespace

TEST_CASE("lit step of a step function") {
    auto day = flat(19.0);
    std::fill(day.begin() + 100, day.end(), 24.0);
    CHECK(extract_lit_step(day) == 100);
    CHECK_FALSE(extract_lit_step(flat(19.0)).has_value());

    auto small = flat(19.0);
    std::fill(small.begin() + 50, small.end(), 20.0);
    CHECK_FALSE(extract_lit_step(small).has_value());

    auto tie = flat(19.0);
    std::fill(tie.begin() + 40, tie.end(), 21.0);
    std::fill(tie.begin() + 200, tie.end(), 23.0);
    CHECK(extract_lit_step(tie) == 40);

    CHECK(code_of([] { extract_lit_step(std::vector<double>(287, 1.0)); }) == static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("lit step ignores a constant shift") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 0.8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> day(kStepsPerDay);
        for (auto& v : day) {
            v = 20.0 + n(rng);
        }
        const double shift = std::uniform_real_distribution<double>(-30.0, 30.0)(rng);
        auto moved = day;
        for (auto& v : moved) {
            v += shift;
        }
        const auto a = extract_lit_step(day);
        const auto b = extract_lit_step(moved);
        // a shift can only disturb a rounding-level tie
        if (a && b) {
            CHECK(std::abs(day[*a] - day[*a - 1] - (day[*b] - day[*b - 1])) < 1e-9);
        } else {
            CHECK(a.has_value() == b.has_value());
        }
    }
}

TEST_CASE("correlation with self and with a mirror") {
    const std::vector<std::vector<double>> w(5, flat(0.0));
    const std::vector<std::optional<int>> mine = {100, 130, std::nullopt, 110, 150};
    std::vector<std::optional<int>> mirror;
    for (auto s : mine) {
        mirror.push_back(s ? std::optional<int>(2 * 122 - *s) : std::nullopt);
    }
    auto m = matrix_of(w, {mine, mine, mirror});
    CHECK(*lit_step_correlation(m, 0, 1) == doctest::Approx(1.0));
    CHECK(*lit_step_correlation(m, 0, 2) == doctest::Approx(-1.0));
    auto users = user_weights(m, "me", 0.01);
    REQUIRE(users.size() == 2);
    CHECK(users[0].user == "me");
    CHECK(users[0].weight == 1.0);
    CHECK(users[1].user == "u1");
}

TEST_CASE("correlation is skipped on one shared day or no spread") {
    const std::vector<std::vector<double>> w(4, flat(0.0));
    auto m = matrix_of(w, {{100, 120, std::nullopt, std::nullopt},
                           {std::nullopt, 90, 95, 97},
                           {110, 110, std::nullopt, 130}});
    CHECK_FALSE(lit_step_correlation(m, 0, 1).has_value());
    CHECK_FALSE(lit_step_correlation(m, 0, 2).has_value());
    CHECK(user_weights(m, "me", 0.3).size() == 1);
}

TEST_CASE("single user matrix weighs only itself") {
    auto m = matrix_of({flat(0.0), flat(1.0)}, {{120, 130}});
    auto users = user_weights(m, "me", 0.3);
    REQUIRE(users.size() == 1);
    CHECK(users[0].user == "me");
    CHECK(users[0].pearson == 1.0);
    CHECK(code_of([&] { user_weights(m, "nobody", 0.3); }) == static_cast<int>(ErrorCode::not_found));
}

TEST_CASE("scenario weights") {
    auto m = matrix_of({flat(0.0), flat(1.0), flat(5.0), flat(0.5)}, {{120, 130, 140, std::nullopt}});
    auto w = scenario_weights(flat(0.0), m, "me", 1.5);
    REQUIRE(w.size() == 2);
    CHECK(w[0].day == 1);
    CHECK(w[0].rmse == 0.0);
    CHECK(w[0].weight == doctest::Approx(1.0 / kScenarioRmseFloor));
    CHECK(w[1].day == 2);
    CHECK(w[1].weight == doctest::Approx(1.0));
    CHECK(code_of([&] { scenario_weights(flat(-20.0), m, "me", 1.5); }) ==
          static_cast<int>(ErrorCode::insufficient_data));
}

TEST_CASE("recommend collapses to simple averages") {
    auto one = matrix_of({flat(0.0), flat(9.0)}, {{120, 40}});
    CHECK(recommend(flat(0.3), one, "me").recommended_step == 120);

    auto two = matrix_of({flat(1.0), flat(-1.0), flat(9.0)}, {{100, 140, 10}});
    auto r = recommend(flat(0.0), two, "me");
    CHECK(r.recommended_step == 120);
    CHECK(r.unrounded_step == doctest::Approx(120.0));
    CHECK(r.contributing_days.size() == 2);
    CHECK(r.contributing_users.size() == 1);
}

TEST_CASE("recommend errors") {
    auto m = matrix_of({flat(0.0), flat(1.0)}, {{std::nullopt, std::nullopt}, {100, 120}});
    // the other user has no correlation with an empty target, so nothing qualifies
    auto e = [&] { recommend(flat(0.0), m, "me"); };
    CHECK(code_of(e) == static_cast<int>(ErrorCode::insufficient_data));
    try {
        e();
    } catch (const Error& err) {
        CHECK(std::string(err.what()).find("insufficient behavioral data") != std::string::npos);
    }
    CHECK(code_of([&] { recommend(flat(0.0), m, "ghost"); }) == static_cast<int>(ErrorCode::not_found));
    CHECK(code_of([&] { recommend(std::vector<double>(10, 0.0), m, "u1"); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
    auto bad = flat(0.0);
    bad[7] = NAN;
    CHECK(code_of([&] { recommend(bad, m, "u1"); }) == static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("clock text") {
    CHECK(step_to_clock(0) == "00:00");
    CHECK(step_to_clock(204) == "17:00");
    CHECK(step_to_clock(287) == "23:55");
}

namespace {

struct Random {
    BehaviorMatrix m;
    std::vector<double> input;
};

Random random_matrix(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mean(-5.0, 5.0);
    std::uniform_int_distribution<int> step(150, 250);
    std::bernoulli_distribution lit(0.4);
    const int days = 6 + static_cast<int>(rng() % 10);
    const int users = 1 + static_cast<int>(rng() % 5);
    std::vector<std::vector<double>> w;
    for (int d = 0; d < days; ++d) {
        w.push_back(profile(mean(rng), 2.0));
    }
    std::vector<std::vector<std::optional<int>>> s(users);
    for (auto& row : s) {
        for (int d = 0; d < days; ++d) {
            row.push_back(lit(rng) ? std::optional<int>(step(rng)) : std::nullopt);
        }
    }
    return {matrix_of(w, s), profile(mean(rng), 2.0)};
}

std::optional<RecommendationResult> try_recommend(const Random& r, RecommendOptions o = {3.0, 0.0}) {
    try {
        return recommend(r.input, r.m, "me", o);
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace

TEST_CASE("recommendation lies within the qualifying lit steps") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        auto r = random_matrix(seed);
        auto res = try_recommend(r);
        if (!res) {
            continue;
        }
        ++checked;
        int lo = 287, hi = 0;
        for (const auto& d : res->contributing_days) {
            const int s = *r.m.find(d.user, d.day)->lit_step;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
            CHECK(d.weight > 0.0);
        }
        for (const auto& u : res->contributing_users) {
            CHECK(u.weight > 0.0);
        }
        CHECK(res->unrounded_step >= lo - 1e-9);
        CHECK(res->unrounded_step <= hi + 1e-9);
        CHECK(res->recommended_step >= 0);
        CHECK(res->recommended_step <= 287);
    }
    CHECK(checked > 100);
}

TEST_CASE("recommendation ignores day and user order") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto r = random_matrix(seed);
        auto base = try_recommend(r);
        std::mt19937_64 rng(seed + 1000);

        Random shuffled = r;
        std::vector<std::size_t> order(r.m.days.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < order.size(); ++i) {
            shuffled.m.days[i] = r.m.days[order[i]];
            for (std::size_t u = 0; u < r.m.users.size(); ++u) {
                shuffled.m.cells[u][i] = r.m.cells[u][order[i]];
            }
        }
        std::vector<std::size_t> users(r.m.users.size());
        for (std::size_t i = 0; i < users.size(); ++i) {
            users[i] = i;
        }
        std::shuffle(users.begin(), users.end(), rng);
        Random both = shuffled;
        for (std::size_t i = 0; i < users.size(); ++i) {
            both.m.users[i] = shuffled.m.users[users[i]];
            both.m.cells[i] = shuffled.m.cells[users[i]];
        }
        both.m.validate();
        auto moved = try_recommend(both);
        REQUIRE(base.has_value() == moved.has_value());
        if (base) {
            CHECK(moved->unrounded_step == doctest::Approx(base->unrounded_step).epsilon(1e-12));
            CHECK(moved->recommended_step == base->recommended_step);
        }
    }
}

TEST_CASE("a dissimilar extra day changes nothing") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto r = random_matrix(seed);
        auto base = try_recommend(r);
        Random more = r;
        const int day = r.m.days.back() + 1;
        more.m.days.push_back(day);
        for (std::size_t u = 0; u < more.m.users.size(); ++u) {
            // lit only for the target so correlations stay as they were
            more.m.cells[u].push_back({day, profile(40.0, 2.0), u == 0 ? std::optional<int>(10) : std::nullopt});
        }
        more.m.validate();
        auto after = try_recommend(more);
        REQUIRE(base.has_value() == after.has_value());
        if (base) {
            CHECK(after->unrounded_step == base->unrounded_step);
            CHECK(after->contributing_days.size() == base->contributing_days.size());
        }
    }
}

TEST_CASE("behavior csv round trip") {
    auto m = behavior_surrogate().matrix.only_users({"house", "neighbor-c"});
    std::stringstream buf;
    write_behavior_csv(buf, m);
    auto back = read_behavior_csv(buf);
    CHECK(back.users == m.users);
    CHECK(back.days == m.days);
    for (std::size_t u = 0; u < m.users.size(); ++u) {
        for (std::size_t d = 0; d < m.days.size(); ++d) {
            CHECK(back.cells[u][d].lit_step == m.cells[u][d].lit_step);
            CHECK(back.cells[u][d].outdoor_temps == m.cells[u][d].outdoor_temps);
        }
    }

    std::istringstream bad_header("user,day,lit_step\n");
    CHECK(code_of([&] { read_behavior_csv(bad_header); }) == static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("scenario reader") {
    std::ostringstream plain;
    plain << "value\n";
    for (std::size_t k = 0; k < kStepsPerDay; ++k) {
        plain << (k * 0.5) << "\n";
    }
    std::istringstream in(plain.str());
    auto v = read_scenario(in);
    REQUIRE(v.size() == kStepsPerDay);
    CHECK(v[10] == 5.0);

    std::istringstream short_in("1\n2\n3\n");
    CHECK_THROWS_AS(read_scenario(short_in), Error);
}

TEST_CASE("surrogate matrix shape") {
    auto s = behavior_surrogate();
    const auto& m = s.matrix;
    CHECK(m.days.size() == static_cast<std::size_t>(kSurrogateDays));
    CHECK(m.users.front() == kHouseUser);
    CHECK(m.event_count(kHouseUser) == 8);
    for (const auto& c : m.cells[0]) {
        CHECK(extract_lit_step(s.house_fireplace.at(c.day)) == c.lit_step);
    }
    CHECK(behavior_surrogate(23).matrix.cells[1][4].outdoor_temps == m.cells[1][4].outdoor_temps);
}

TEST_CASE("shipped behavior matrix matches the generator") {
    auto shipped = load_behavior_csv(HOMETWIN_DATA_DIR "/behavior_matrix.csv");
    std::ostringstream a, b;
    write_behavior_csv(a, shipped);
    write_behavior_csv(b, behavior_surrogate().matrix);
    CHECK(a.str() == b.str());
}

TEST_CASE("held out day 23 on the shipped matrix") {
    auto m = load_behavior_csv(HOMETWIN_DATA_DIR "/behavior_matrix.csv");
    const auto truth = m.find(kHouseUser, kHeldOutDay);
    REQUIRE(truth->lit_step.has_value());
    const auto input = truth->outdoor_temps;
    auto train = m.without_day(kHeldOutDay);

    std::set<int> days;
    for (const auto& d : scenario_weights(input, train, kHouseUser, 1.5)) {
        days.insert(d.day);
    }
    CHECK(days == std::set<int>{1, 2, 25});
    CHECK(days.size() < train.event_count(kHouseUser));

    auto r = recommend(input, train, kHouseUser, {1.5, 0.3});
    CHECK(std::abs(r.recommended_step - *truth->lit_step) <= 6);
    // the mirrored neighbour never contributes
    for (const auto& u : r.contributing_users) {
        CHECK(u.user != "neighbor-b");
    }

    auto alone = recommend(input, train.only_users({kHouseUser}), kHouseUser, {1.5, 0.3});
    CHECK(std::abs(alone.recommended_step - *truth->lit_step) <= 6);
}
