// Runs every acceptance criterion and prints one PASS/FAIL line each.
#include "hometwin/core/error.hpp"
#include "hometwin/diagnostics/color.hpp"
#include "hometwin/diagnostics/heatmap.hpp"
#include "hometwin/diagnostics/occupancy.hpp"
#include "hometwin/forecasting/arima.hpp"
#include "hometwin/forecasting/gbm.hpp"
#include "hometwin/forecasting/metrics.hpp"
#include "hometwin/forecasting/multi_output.hpp"
#include "hometwin/forecasting/pipeline.hpp"
#include "hometwin/forecasting/stack.hpp"
#include "hometwin/ingestion/simulator.hpp"
#include "hometwin/recommender/surrogate.hpp"
#include "hometwin/recommender/ubcf.hpp"
#include "hometwin/solar/solar.hpp"
#include "hometwin/solar/sun_hours.hpp"
#include "oracles/noaa_solar.hpp"
#include "support/office.hpp"
#include "support/synthetic.hpp"
#include "support/twin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hometwin;

namespace {

/// Collects failed conditions and a few numbers worth printing.
struct Outcome {
    std::vector<std::string> failures;
    std::ostringstream note;

    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) {
            failures.push_back(what);
        } else if (!ok) {
            failures.push_back("");
        }
    }
};

struct Criterion {
    const char* name;
    double budget_s; // 0 means no runtime bound
    std::function<void(Outcome&)> run;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// ---- solar ----

void solar_oracle(Outcome& o) {
    constexpr double lat = 63.4305, lon = 10.3951;
    double worst_alt = 0.0, worst_az = 0.0;
    int points = 0;
    for (int day = 0; day < 365; ++day) {
        const auto d = (core::Timestamp::from_civil({2022, 1, 1}) + core::Minutes{day * 1440}).date();
        for (double ut : {0.0, 6.0, 12.0, 18.0}) {
            const auto r = solar::sun_horizontal(solar::SolarInput{d, ut, lon, lat});
            const auto ref = oracle::noaa_sun(d.year, static_cast<int>(d.month), static_cast<int>(d.day), ut, lat, lon);
            const double da = std::abs(r.altitude_deg - ref.altitude_deg);
            worst_alt = std::max(worst_alt, da);
            o.expect(da <= 0.5, "altitude gap " + fmt(da) + " on day " + std::to_string(day));
            if (std::abs(ref.altitude_deg) <= 85.0) {
                const double dz = oracle::azimuth_gap(r.azimuth_deg, ref.azimuth_deg);
                worst_az = std::max(worst_az, dz);
                o.expect(dz <= 1.0, "azimuth gap " + fmt(dz) + " on day " + std::to_string(day));
            }
            ++points;
        }
    }
    o.note << points << " points, max |dalt| " << fmt(worst_alt) << " deg, max |daz| " << fmt(worst_az) << " deg";
}

void j2000_anchor(Outcome& o) {
    const double jd = solar::julian_from_j2000({2000, 1, 1}, 12.0).jd_d;
    const double omega = solar::sun_equatorial(0.0, 0.0).obliquity;
    const double l0 = solar::sun_ecliptic(0.0).mean_longitude;
    o.expect(jd == 0.0, "jd_d " + fmt(jd, 17));
    o.expect(omega == 23.439, "obliquity " + fmt(omega, 17));
    o.expect(l0 == 280.466, "mean longitude " + fmt(l0, 17));
    o.note << "jd_d " << fmt(jd, 17) << ", obliquity " << fmt(omega, 17) << ", L0 " << fmt(l0, 17);
}

void sun_hours_shape(Outcome& o) {
    const core::HouseModel trondheim;
    const auto months = solar::monthly_sun_hours(2022, trondheim, nullptr);
    o.expect(months.size() == 12, "month count");
    if (months.size() != 12) {
        return;
    }
    std::vector<int> lit;
    for (const auto& m : months) {
        lit.push_back(m.lit_minutes);
    }
    const auto top = std::max_element(lit.begin(), lit.end()) - lit.begin();
    const auto low = std::min_element(lit.begin(), lit.end()) - lit.begin();
    o.expect(top == 5, "maximum in month " + std::to_string(top + 1));
    o.expect(low == 11, "minimum in month " + std::to_string(low + 1));
    for (std::size_t i = 1; i < 12; ++i) {
        if (static_cast<long>(i) <= top) {
            o.expect(lit[i] > lit[i - 1], "not rising into month " + std::to_string(i + 1));
        } else {
            o.expect(lit[i] < lit[i - 1], "not falling into month " + std::to_string(i + 1));
        }
    }
    const auto wall = solar::HorizonMask::flat(90.0);
    const auto blocked = solar::monthly_sun_hours(2022, trondheim, &wall);
    for (const auto& m : blocked) {
        o.expect(m.lit_minutes == 0, "masked month lit " + std::to_string(m.lit_minutes));
    }
    o.note << "lit minutes Jan.." << "Dec:";
    for (int v : lit) {
        o.note << ' ' << v;
    }
}

// ---- forecasting ----

void weight_average_suite(Outcome& o) {
    using forecasting::weight_average;
    const std::vector<double> a = {1.0, -3.5, 2.25};
    const std::vector<double> b = {4.0, 0.5, -8.0};
    o.expect(weight_average({a}, std::vector<double>{0.37}, 2.0) == a, "single member is not the identity");
    for (double p : {0.25, 1.0, 2.0, 7.0}) {
        const auto m = weight_average({a, b}, std::vector<double>{0.8, 0.8}, p);
        for (std::size_t i = 0; i < a.size(); ++i) {
            o.expect(std::abs(m[i] - 0.5 * (a[i] + b[i])) <= 1e-9, "equal scores not the mean at p=" + fmt(p));
        }
    }
    const auto h = weight_average({a, b}, std::vector<double>{1.0, 2.0}, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        o.expect(std::abs(h[i] - (a[i] + 0.5 * b[i]) / 1.5) <= 1e-9, "scores 1,2 at p=1");
    }

    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> members(1, 6), length(1, 12);
    std::normal_distribution<double> value(0.0, 10.0);
    std::uniform_real_distribution<double> score(1e-3, 5.0), power(0.1, 6.0), scale(-50.0, 50.0);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto m = static_cast<std::size_t>(members(rng));
        const auto n = static_cast<std::size_t>(length(rng));
        std::vector<std::vector<double>> preds(m, std::vector<double>(n));
        std::vector<double> scores(m);
        for (auto& p : preds) {
            for (auto& x : p) x = value(rng);
        }
        for (auto& s : scores) s = score(rng);
        const double p = power(rng), c = scale(rng);
        const auto out = weight_average(preds, scores, p);
        auto scaled = preds;
        for (auto& v : scaled) {
            for (auto& x : v) x *= c;
        }
        const auto out_scaled = weight_average(scaled, scores, p);
        for (std::size_t i = 0; i < n; ++i) {
            double lo = preds[0][i], hi = preds[0][i];
            for (const auto& v : preds) {
                lo = std::min(lo, v[i]);
                hi = std::max(hi, v[i]);
            }
            const double tol = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
            o.expect(out[i] >= lo - tol && out[i] <= hi + tol, "outside the hull in trial " + std::to_string(trial));
            o.expect(std::abs(out_scaled[i] - c * out[i]) <= 1e-9 * std::max(1.0, std::abs(c * out[i])),
                     "scale equivariance in trial " + std::to_string(trial));
            ++checked;
        }
    }
    o.note << "1000 random instances, " << checked << " points";
}

/// Wraps a real model and records what every fit saw and predicted.
struct Recorder {
    struct Fit {
        std::vector<std::size_t> trained;
        std::size_t lag = 0;
        std::map<std::size_t, std::vector<double>> predicted;
    };
    std::vector<Fit> fits;
};

class RecordingPredictor : public forecasting::Predictor {
public:
    RecordingPredictor(std::shared_ptr<const forecasting::Predictor> inner, Recorder* rec, std::size_t fit)
        : inner_(std::move(inner)), rec_(rec), fit_(fit) {}
    std::size_t lag_window() const override { return inner_->lag_window(); }
    double predict(const forecasting::SeriesView& view, std::size_t index) const override {
        const double v = inner_->predict(view, index);
        rec_->fits[fit_].predicted[index].push_back(v);
        return v;
    }

private:
    std::shared_ptr<const forecasting::Predictor> inner_;
    Recorder* rec_;
    std::size_t fit_;
};

forecasting::BaseModelSpec recorded(const std::string& name, const forecasting::BaseModelSpec& real, Recorder& rec) {
    forecasting::register_external_model(
        name, [real, &rec](const forecasting::BaseModelSpec&, const forecasting::SeriesView& view,
                           std::span<const std::size_t> rows) -> std::shared_ptr<const forecasting::Predictor> {
            auto inner = forecasting::fit_predictor(real, view, rows);
            rec.fits.push_back({{rows.begin(), rows.end()}, inner->lag_window(), {}});
            return std::make_shared<RecordingPredictor>(std::move(inner), &rec, rec.fits.size() - 1);
        });
    forecasting::BaseModelSpec s;
    s.kind = forecasting::ModelKind::external;
    s.external_name = name;
    return s;
}

void stacking_integrity(Outcome& o) {
    using namespace forecasting;
    constexpr int folds = 5;
    const auto x = synthetic::daily_with_noise(12, 2024);
    const auto all = synthetic::series(x);
    const auto train = all.slice(0, 288 * 9);
    const std::vector<BaseModelSpec> real = {arima_spec(2, 0, 0), prophet_spec(10, 4), gbm_spec(100, 3)};
    std::vector<Recorder> recs(real.size());
    std::vector<BaseModelSpec> wrapped;
    for (std::size_t m = 0; m < real.size(); ++m) {
        wrapped.push_back(recorded("acceptance-member-" + std::to_string(m), real[m], recs[m]));
    }
    StackDiagnostics d;
    const FittedModel st = stack(wrapped, train, folds, Transform::none, nullptr, &d);

    const std::set<std::size_t> usable(d.rows.begin(), d.rows.end());
    std::size_t oof_cells = 0;
    for (std::size_t m = 0; m < real.size(); ++m) {
        const auto& fits = recs[m].fits;
        o.expect(fits.size() == folds + 1, "member " + std::to_string(m) + " fit " + std::to_string(fits.size()) + " times");
        if (fits.size() != folds + 1) {
            continue;
        }
        std::map<std::size_t, int> hits;
        for (int f = 0; f < folds; ++f) {
            const auto& fit = fits[static_cast<std::size_t>(f)];
            const std::set<std::size_t> seen(fit.trained.begin(), fit.trained.end());
            o.expect(fit.trained == d.fold_train_rows[static_cast<std::size_t>(f)], "fold rows differ from diagnostics");
            for (const auto& [row, values] : fit.predicted) {
                o.expect(seen.count(row) == 0, "row " + std::to_string(row) + " predicted by a fit trained on it");
                o.expect(usable.count(row) == 1, "prediction outside the sample rows");
                hits[row] += static_cast<int>(values.size());
            }
        }
        for (std::size_t i = 0; i < d.rows.size(); ++i) {
            const std::size_t row = d.rows[i];
            const double cell = d.oof(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
            // rows inside the member's lag window cannot be predicted and stay empty
            const int want = row >= fits[static_cast<std::size_t>(d.fold_of_row[i])].lag ? 1 : 0;
            o.expect(hits[row] == want, "row " + std::to_string(row) + " has " + std::to_string(hits[row]) +
                                            " out-of-fold predictions for member " + std::to_string(m));
            if (want == 0) {
                o.expect(std::isnan(cell), "filled oof cell inside the lag window");
            } else if (hits[row] == 1) {
                const auto f = static_cast<std::size_t>(d.fold_of_row[i]);
                const auto it = fits[f].predicted.find(row);
                o.expect(it != fits[f].predicted.end() && it->second.front() == cell,
                         "oof cell does not come from the row's fold");
                ++oof_cells;
            }
        }
        o.expect(fits[folds].trained.size() == train.size(), "refit does not use every row");
    }

    const std::size_t first = train.size();
    const std::vector<double> truth(x.begin() + static_cast<std::ptrdiff_t>(first), x.end());
    const double e_stack = rmse(one_step_predictions(st, all, first), truth);
    double best = 1e300;
    for (const auto& m : real) {
        best = std::min(best, rmse(one_step_predictions(fit(m, train), all, first), truth));
    }
    o.expect(e_stack <= 1.05 * best, "stack rmse " + fmt(e_stack) + " > 1.05 x " + fmt(best));
    o.note << d.rows.size() << " rows x " << real.size() << " members, " << oof_cells
           << " oof cells, stack rmse " << fmt(e_stack) << " vs best member " << fmt(best);
}

void gbm_and_arima(Outcome& o) {
    using namespace forecasting;
    int stages = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0.0, 1.0);
        std::uniform_int_distribution<int> rows(20, 300), cols(1, 6), depth(1, 6);
        std::uniform_real_distribution<double> lr(0.01, 1.0);
        const int r = rows(rng), c = cols(rng);
        Eigen::MatrixXd x(r, c);
        std::vector<double> y(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < c; ++j) x(i, j) = n(rng);
            y[static_cast<std::size_t>(i)] = std::sin(x(i, 0)) * 3.0 + (c > 1 ? x(i, 1) * x(i, 1) : 0.0) + n(rng);
        }
        GbmParams p;
        p.n_trees = 40;
        p.depth = depth(rng);
        p.learning_rate = lr(rng);
        p.seed = seed;
        const GbmModel m = fit_gbm(x, y, p);
        for (std::size_t k = 1; k < m.stage_loss.size(); ++k) {
            o.expect(m.stage_loss[k] <= m.stage_loss[k - 1] + 1e-12 * m.stage_loss[0],
                     "stage loss rose on seed " + std::to_string(seed));
            ++stages;
        }
    }
    const auto series = synthetic::ar1(5000, 0.8, 0.01, 11);
    const FittedModel m = fit_arima(synthetic::series(series), 1, 0, 0);
    const auto& coef = std::dynamic_pointer_cast<const ArimaPredictor>(m.predictor)->coefficients();
    const double phi = coef.ar.empty() ? NAN : coef.ar[0];
    o.expect(std::abs(phi - 0.8) <= 0.05, "AR(1) estimate " + fmt(phi));
    o.note << "100 datasets, " << stages << " stage steps monotone; AR(1) estimate " << fmt(phi, 6) << " for 0.8";
}

void beats_baseline(Outcome& o) {
    ingestion::SimulatorConfig cfg;
    cfg.days = 90;
    const auto data = ingestion::simulate(cfg);
    forecasting::PipelineOptions opt; // 70/10/10
    const auto report = forecasting::run_pipeline(data.series.at(ingestion::kFireplaceSensor), opt);
    const double ens = report.test_rmse.at("ensemble");
    const double rw = report.test_rmse.at("random-walk");
    o.expect(ens < rw, "ensemble " + fmt(ens) + " vs random walk " + fmt(rw));
    o.note << "ensemble " << fmt(ens) << " vs random walk " << fmt(rw) << "; members";
    for (const auto& [label, v] : report.test_rmse) {
        if (label != "ensemble" && label != "random-walk") {
            o.note << ' ' << label << '=' << fmt(v);
        }
    }
}

void multi_output(Outcome& o) {
    ingestion::SimulatorConfig cfg;
    cfg.days = 20;
    const auto data = ingestion::simulate(cfg);
    auto split = [](const core::TimeSeries& s) {
        return std::pair{s.slice(0, 288 * 14), s.slice(288 * 14, 288 * 6)};
    };
    const auto [ftr, fva] = split(data.series.at(ingestion::kFireplaceSensor));
    std::map<std::string, core::TimeSeries> tr, va;
    for (const char* id : ingestion::kCoupledTargets) {
        auto [t, v] = split(data.series.at(id));
        tr[id] = t;
        va[id] = v;
    }
    const auto model = forecasting::fit_multi_output(ftr, tr, fva, va);
    const auto pred = forecasting::predict_multi_output(model, {fva, {}});
    o.expect(pred.size() == 8, std::to_string(pred.size()) + " targets predicted");
    double worst = 0.0;
    for (const char* id : ingestion::kCoupledTargets) {
        if (!pred.count(id)) {
            o.expect(false, std::string("missing ") + id);
            continue;
        }
        const auto& truth = va[id].values;
        const double sd = core::population_std(truth, core::mean_of(truth));
        const double ratio = forecasting::rmse(pred.at(id).values, truth) / sd;
        worst = std::max(worst, ratio);
        o.expect(ratio <= 0.05, std::string(id) + " rmse/std " + fmt(ratio));
    }
    o.note << "8 targets, worst rmse/std " << fmt(worst);
}

// ---- recommender ----

void recommender_scenario(Outcome& o) {
    using namespace recommender;
    const auto m = load_behavior_csv(HOMETWIN_SOURCE_DIR "/data/behavior_matrix.csv");
    const auto truth = m.find(kHouseUser, kHeldOutDay);
    o.expect(truth && truth->lit_step, "held-out day has no event");
    if (!truth || !truth->lit_step) {
        return;
    }
    o.expect(m.event_count(kHouseUser) == 8, std::to_string(m.event_count(kHouseUser)) + " house events");
    const auto train = m.without_day(kHeldOutDay);
    std::set<int> days;
    for (const auto& d : scenario_weights(truth->outdoor_temps, train, kHouseUser, 1.5)) {
        days.insert(d.day);
    }
    o.expect(days == std::set<int>{1, 2, 25}, "qualifying days differ");
    o.expect(!days.empty() && days.size() < train.event_count(kHouseUser), "not a strict subset");
    const auto r = recommend(truth->outdoor_temps, train, kHouseUser, {1.5, 0.3});
    const int gap = r.recommended_step - *truth->lit_step;
    o.expect(std::abs(gap) <= 6, "off by " + std::to_string(gap) + " steps");
    o.note << "qualifying days {";
    const char* sep = "";
    for (int d : days) {
        o.note << sep << d;
        sep = ", ";
    }
    o.note << "} of " << train.event_count(kHouseUser) << " events; step " << r.recommended_step << " vs "
           << *truth->lit_step;
}

// ---- diagnostics ----

void diagnostics_suite(Outcome& o) {
    using namespace diagnostics;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> size(1.0, 8.0), alpha(0.5, 6.0), temp(10.0, 30.0);
    std::uniform_int_distribution<int> count(1, 6), res(1, 12);
    long cells = 0;
    for (int layout = 0; layout < 200; ++layout) {
        const double w = size(rng), h = size(rng);
        std::uniform_real_distribution<double> px(-0.5, w + 0.5), py(-0.5, h + 0.5);
        std::vector<HeatSensor> sensors;
        for (int i = 0, n = count(rng); i < n; ++i) {
            sensors.push_back({"s" + std::to_string(i), {px(rng), py(rng)}, temp(rng)});
        }
        HeatMapConfig cfg;
        cfg.alpha = alpha(rng);
        cfg.resolution = res(rng);
        const auto f = render_heatmap(sensors, {0.0, 0.0, w, h}, cfg);
        for (int iy = 0; iy < f.height; ++iy) {
            for (int ix = 0; ix < f.width; ++ix) {
                const auto c = f.cell_center(ix, iy);
                bool reach = false;
                for (const auto& s : sensors) {
                    reach = reach || std::hypot(c.x - s.position.x, c.y - s.position.y) <= cfg.alpha / 2.0;
                }
                o.expect(f.at(ix, iy).has_value() == reach, "coverage differs in layout " + std::to_string(layout));
                ++cells;
            }
        }
    }
    o.expect(temp_to_color(0.0) == Rgb{0, 0, 255}, "0 C is not blue");
    o.expect(temp_to_color(40.0) == Rgb{255, 0, 0}, "40 C is not red");
    const std::vector<std::pair<double, int>> bands = {{0, 0},   {399.999, 0}, {400, 1}, {599.999, 1},
                                                       {600, 2}, {799.999, 2}, {800, 3}, {5000, 3}};
    for (const auto& [ppm, band] : bands) {
        o.expect(co2_band(ppm).index == band, "co2 " + fmt(ppm) + " in band " + std::to_string(co2_band(ppm).index));
    }
    const auto d = office::day({{11 * 60, 14 * 60}});
    const auto events = detect_occupancy(d.temperature, d.doors, {}, "office");
    const auto day0 = d.temperature.start;
    double overlap = 0.0;
    for (const auto& e : events) {
        overlap = std::max(overlap, interval_overlap(e.start, e.end, day0 + core::Minutes{11 * 60},
                                                     day0 + core::Minutes{14 * 60}));
    }
    o.expect(overlap >= 0.9, "office overlap " + fmt(overlap));
    o.note << "200 layouts, " << cells << " cells; office overlap " << fmt(overlap);
}

// ---- service ----

void service_contract(Outcome& o) {
    const std::vector<std::pair<std::string, std::map<std::string, std::string>>> requests = {
        {"/v1/capability", {}},
        {"/v1/sensors", {}},
        {"/v1/sensors/2Stair/series", {{"from", "2022-01-02T00:00Z"}, {"to", "2022-01-02T06:00Z"}}},
        {"/v1/heatmap", {{"room", "living"}, {"at", "2022-01-03T12:00Z"}}},
        {"/v1/sun", {{"date", "2022-06-21"}, {"time", "10:30"}}},
        {"/v1/sunhours", {{"year", "2022"}}},
        {"/v1/forecast", {{"sensor", "2Fireplace"}, {"horizon", "36"}}},
        {"/v1/predict-multi", {{"horizon", "12"}}},
        {"/v1/occupancy", {{"room", "office"}}},
        {"/v1/heatmap", {{"room", "nowhere"}}},
    };
    auto config = service::load_twin_config(HOMETWIN_SOURCE_DIR "/config/twin.conf");
    config.sources.clear();
    config.store.persist = false;
    service::TwinService a(config), b(config);
    twin::fill(a, 5);
    twin::fill(b, 5);
    int compared = 0;
    for (const auto& [path, query] : requests) {
        const auto first = twin::get(a, path, query);
        const auto again = twin::get(a, path, query);
        const auto other = twin::get(b, path, query);
        o.expect(first.body == again.body && first.headers == again.headers, path + " changed between calls");
        o.expect(first.body == other.body && first.status == other.status, path + " differs across instances");
        ++compared;
    }

    std::mt19937_64 rng(11);
    std::map<int, int> highest;
    for (int trial = 0; trial < 100; ++trial) {
        auto svc = twin::generated(rng, HOMETWIN_SOURCE_DIR "/config");
        const auto report = svc->capability();
        int top = 0;
        for (std::size_t i = 0; i < report.levels.size(); ++i) {
            if (i > 0 && report.levels[i].available) {
                o.expect(report.levels[i - 1].available, "level above an unavailable one in trial " + std::to_string(trial));
            }
            top += report.levels[i].available ? 1 : 0;
        }
        ++highest[top];
    }
    o.note << compared << " GETs byte-identical; 100 configs, available-level counts";
    for (const auto& [k, n] : highest) {
        o.note << ' ' << k << ':' << n;
    }
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"solar position vs independent oracle", 5.0, solar_oracle},
        {"J2000 anchor constants", 0.0, j2000_anchor},
        {"monthly sun-hours shape", 0.0, sun_hours_shape},
        {"inverse-rmse weight average", 0.0, weight_average_suite},
        {"stacking integrity", 30.0, stacking_integrity},
        {"gbm monotone loss and AR(1) recovery", 0.0, gbm_and_arima},
        {"ensemble beats random walk on 90 simulated days", 120.0, beats_baseline},
        {"multi-output imputation", 0.0, multi_output},
        {"recommender held-out scenario", 0.0, recommender_scenario},
        {"diagnostics", 0.0, diagnostics_suite},
        {"service contract", 0.0, service_contract},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.failures.push_back(std::string("threw: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs >= c.budget_s) {
            o.failures.push_back("took " + fmt(secs) + " s, budget " + fmt(c.budget_s) + " s");
        }
        const bool ok = o.failures.empty();
        failed += ok ? 0 : 1;
        std::printf("%s  %2zu %-48s %7.2fs  %s\n", ok ? "PASS" : "FAIL", i + 1, c.name, secs, o.note.str().c_str());
        int shown = 0;
        for (const auto& f : o.failures) {
            if (!f.empty() && shown++ < 5) {
                std::printf("        %s\n", f.c_str());
            }
        }
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
