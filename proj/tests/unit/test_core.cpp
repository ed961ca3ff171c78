#include <doctest.h>

#include "hometwin/core/csv.hpp"
#include "hometwin/core/error.hpp"
#include "hometwin/core/kvtext.hpp"
#include "hometwin/core/series.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace hometwin;
using namespace hometwin::core;

namespace {

Timestamp t0() { return Timestamp::from_civil({2022, 1, 1}); }

std::vector<Sample> grid_samples(std::size_t n, int step, double (*f)(std::size_t)) {
    std::vector<Sample> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({t0() + Minutes{static_cast<long>(i) * step}, f(i)});
    }
    return out;
}

} // namespace

TEST_CASE("timestamp civil round trip and RFC 3339 formatting") {
    const Timestamp t = Timestamp::from_civil({2022, 3, 7}, 12, 5);
    CHECK(t.to_string() == "2022-03-07T12:05:00Z");
    CHECK(Timestamp::parse("2022-03-07T12:05:00Z") == t);
    CHECK(Timestamp::parse("2022-03-07T12:05:59.123Z") == t);
    CHECK(Timestamp::parse("2022-03-07T13:05:00+01:00") == t);
    CHECK(t.minute_of_day() == 725);
    CHECK((t - t.floor_to_day()).count() == 725);
    CHECK(Timestamp::from_civil({1970, 1, 1}).minutes() == 0);
    const Timestamp before_epoch = Timestamp::from_civil({1969, 12, 31}, 23, 59);
    CHECK(before_epoch.minutes() == -1);
    CHECK(before_epoch.minute_of_day() == 1439);
    CHECK(before_epoch.to_string() == "1969-12-31T23:59:00Z");
    CHECK_THROWS_AS(Timestamp::parse("2022-02-30T00:00Z"), Error);
    CHECK_THROWS_AS(Timestamp::parse("yesterday"), Error);
}

TEST_CASE("resample passes on-grid points through bit-exactly") {
    auto raw = grid_samples(50, 5, [](std::size_t i) { return std::sin(0.37 * static_cast<double>(i)) * 3.1; });
    const TimeSeries s = resample(raw, 5);
    REQUIRE(s.size() == raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(s.values[i] == raw[i].value);
        CHECK(s.time_at(i) == raw[i].time);
    }
}

TEST_CASE("resample interpolates the midpoint linearly") {
    std::vector<Sample> raw{{t0(), 10.0}, {t0() + Minutes{10}, 12.0}};
    const TimeSeries s = resample(raw, 5);
    REQUIRE(s.size() == 3);
    CHECK(s.values[1] == doctest::Approx(11.0));
}

TEST_CASE("resample carries the last observation across long gaps") {
    std::vector<Sample> raw{{t0(), 10.0}, {t0() + Minutes{15}, 13.0}, {t0() + Minutes{60}, 20.0}};
    const TimeSeries s = resample(raw, 5);
    REQUIRE(s.size() == 13);
    CHECK(s.values[1] == doctest::Approx(11.0)); // 15-minute gap: linear
    CHECK(s.values[2] == doctest::Approx(12.0));
    CHECK(s.values[4] == 13.0); // 45-minute gap: carried forward
    CHECK(s.values[11] == 13.0);
    CHECK(s.values[12] == 20.0);
}

TEST_CASE("resample of 90 days at five minutes has 25920 points") {
    std::vector<Sample> raw;
    for (int i = 0; i < 90 * 288; ++i) {
        raw.push_back({t0() + Minutes{5 * i}, 1.0});
    }
    CHECK(resample(raw, 5).size() == 25920);
}

TEST_CASE("resample rejects empty and unsorted input") {
    std::vector<Sample> none;
    CHECK_THROWS_WITH(resample(none, 5), "no data");
    std::vector<Sample> unsorted{{t0() + Minutes{5}, 1.0}, {t0(), 2.0}};
    CHECK_THROWS_WITH(resample(unsorted, 5), "unsorted");
}

TEST_CASE("split produces contiguous day windows") {
    TimeSeries s;
    s.start = t0();
    s.values.assign(90 * 288, 0.0);
    const DatasetSplit d = split(s, 70, 10, 10);
    CHECK(d.train.size() == 20160);
    CHECK(d.validation.size() == 2880);
    CHECK(d.test.size() == 2880);
    CHECK(d.train.last_time() + Minutes{5} == d.validation.start);
    CHECK(d.validation.last_time() + Minutes{5} == d.test.start);

    CHECK_THROWS_WITH(split(s, 90, 0, 0), "empty split");
    s.values.assign(89 * 288, 0.0);
    CHECK_THROWS_WITH(split(s, 70, 10, 10), "insufficient length: required 25920 steps, have 25632");
}

TEST_CASE("difference examples") {
    TimeSeries s;
    s.start = t0();
    s.values = {1, 3, 6, 10};
    const Differenced d = difference(s, 1);
    CHECK(d.series.values == std::vector<double>{2, 3, 4});
    CHECK(d.series.start == t0() + Minutes{5});
    CHECK(d.anchors == std::vector<double>{1});

    s.values.assign(10, 4.2);
    for (double v : difference(s, 1).series.values) {
        CHECK(v == 0.0);
    }
    s.values = {1.0, 2.0};
    CHECK_THROWS_AS(difference(s, 2), Error);
}

TEST_CASE("difference and undifference are exact inverses on random series") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        TimeSeries s;
        s.start = t0();
        s.values.resize(5 + rng() % 200);
        for (double& v : s.values) {
            v = noise(rng);
        }
        const int order = 1 + static_cast<int>(rng() % 3);
        const Differenced d = difference(s, order);
        const TimeSeries back = undifference(d.series, d.anchors);
        REQUIRE(back.size() == s.size());
        CHECK(back.start == s.start);
        for (std::size_t i = 0; i < s.size(); ++i) {
            // first-order inversion is exact to 1e-12; higher orders integrate rounding twice or more
            const double tol = order == 1 ? 1e-12 : 1e-9;
            CHECK(std::abs(back.values[i] - s.values[i]) <= tol);
        }
    }
}

TEST_CASE("normalize uses the population standard deviation") {
    TimeSeries s;
    s.values = {0.0, 2.0};
    const Normalized n = normalize(s);
    CHECK(n.mean == 1.0);
    CHECK(n.std == 1.0);
    CHECK(n.series.values == std::vector<double>{-1.0, 1.0});

    const Normalized again = normalize(n.series);
    CHECK(again.series.values[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(again.series.values[1] == doctest::Approx(1.0).epsilon(1e-9));

    s.values.assign(5, 3.3);
    CHECK_THROWS_WITH(normalize(s), "zero variance");
}

TEST_CASE("normalize round trip on random data") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        TimeSeries s;
        s.values.resize(2 + rng() % 300);
        for (double& v : s.values) {
            v = u(rng);
        }
        const Normalized n = normalize(s);
        CHECK(std::abs(mean_of(n.series.values)) <= 1e-9);
        CHECK(std::abs(population_std(n.series.values, mean_of(n.series.values)) - 1.0) <= 1e-9);
        const TimeSeries back = denormalize(n.series, n.mean, n.std);
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(std::abs(back.values[i] - s.values[i]) <= 1e-9);
        }
    }
}

TEST_CASE("observation CSV reads gaps and reports malformed rows with line numbers") {
    std::istringstream in("sensor_id,timestamp_rfc3339,value\n"
                          "2Fireplace,2022-03-07T12:00:00Z,21.5\n"
                          "2Fireplace,2022-03-07T12:05:00Z,\n");
    const auto rows = read_observations_csv(in, "fixture.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].value == 21.5);
    CHECK_FALSE(rows[1].value.has_value());

    std::ostringstream out;
    write_observations_csv(out, rows);
    std::istringstream again(out.str());
    CHECK(read_observations_csv(again) == rows);

    std::istringstream bad("sensor_id,timestamp_rfc3339,value\n"
                           "a,2022-03-07T12:00:00Z,1\n"
                           "a,not-a-time,1\n");
    CHECK_THROWS_WITH_AS(read_observations_csv(bad, "bad.csv"), doctest::Contains("bad.csv:3:"), Error);

    std::istringstream fields("sensor_id,timestamp_rfc3339,value\na,2022-03-07T12:00:00Z\n");
    CHECK_THROWS_WITH_AS(read_observations_csv(fields, "f.csv"), doctest::Contains("f.csv:2: expected 3 fields"),
                         Error);
}

TEST_CASE("key-value documents carry line numbers into errors") {
    std::istringstream in("# twin\n[house]\nlatitude = 63.43\n\n[source netatmo]\nkind = replay\n");
    const KvDocument doc = parse_kv_document(in, "twin.conf");
    REQUIRE(doc.sections.size() == 2);
    CHECK(doc.sections[1].kind == "source");
    CHECK(doc.sections[1].name == "netatmo");
    CHECK(doc.sections[0].find("latitude")->line == 3);
    CHECK(kv_double(doc, *doc.sections[0].find("latitude")) == 63.43);

    std::istringstream bad("[house]\nlatitude 63\n");
    CHECK_THROWS_WITH(parse_kv_document(bad, "x.conf"), "x.conf:2: expected 'key = value'");
}
