#include "hometwin/forecasting/gbm.hpp"

#include "hometwin/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace hometwin::forecasting {

BinnedFeatures bin_features(const Eigen::MatrixXd& features, int max_bins) {
    if (max_bins < 2 || max_bins > 255) {
        throw Error(ErrorCode::invalid_argument, "gbm: max_bins must lie in [2, 255]");
    }
    BinnedFeatures b;
    b.rows = static_cast<std::size_t>(features.rows());
    b.cols = static_cast<std::size_t>(features.cols());
    b.bins.resize(b.rows * b.cols);
    b.thresholds.resize(b.cols);
    std::vector<double> sorted(b.rows);
    for (std::size_t c = 0; c < b.cols; ++c) {
        for (std::size_t r = 0; r < b.rows; ++r) {
            sorted[r] = features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> uniq;
        std::unique_copy(sorted.begin(), sorted.end(), std::back_inserter(uniq));
        auto& thr = b.thresholds[c];
        if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
            for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
                thr.push_back(0.5 * (uniq[i] + uniq[i + 1]));
            }
        } else {
            // quantile edges, placed between distinct neighbours
            for (int k = 1; k < max_bins; ++k) {
                const std::size_t pos = static_cast<std::size_t>(k) * b.rows / static_cast<std::size_t>(max_bins);
                const double v = sorted[pos];
                auto next = std::upper_bound(uniq.begin(), uniq.end(), v);
                if (next == uniq.end()) {
                    continue;
                }
                const double edge = 0.5 * (v + *next);
                if (thr.empty() || edge > thr.back()) {
                    thr.push_back(edge);
                }
            }
        }
        for (std::size_t r = 0; r < b.rows; ++r) {
            const double v = features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            b.bins[r * b.cols + c] = static_cast<std::uint8_t>(std::lower_bound(thr.begin(), thr.end(), v) - thr.begin());
        }
    }
    return b;
}

double GbmTree::predict(const double* row) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const Node& n = nodes[static_cast<std::size_t>(i)];
        i = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

double GbmModel::predict(const double* row) const {
    double y = 0.0;
    for (const auto& t : trees) {
        y += t.predict(row);
    }
    return base_value + learning_rate * y;
}

Eigen::VectorXd GbmModel::predict(const Eigen::MatrixXd& features) const {
    if (static_cast<std::size_t>(features.cols()) != n_features) {
        throw Error(ErrorCode::invalid_argument, "gbm: feature count differs from training");
    }
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = features;
    Eigen::VectorXd out(features.rows());
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        out(r) = predict(rm.row(r).data());
    }
    return out;
}

namespace {

struct TreeBuilder {
    const BinnedFeatures& binned;
    const std::vector<double>& residual;
    const GbmParams& params;
    GbmTree tree;
    std::vector<double> sum;
    std::vector<std::uint32_t> count;

    int build(std::vector<std::size_t>& rows, int depth) {
        double total = 0.0;
        for (std::size_t r : rows) {
            total += residual[r];
        }
        const double n = static_cast<double>(rows.size());
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(GbmTree::Node{-1, 0.0, -1, -1, rows.empty() ? 0.0 : total / n});
        if (depth >= params.depth || rows.size() < 2 * static_cast<std::size_t>(params.min_leaf)) {
            return id;
        }

        const std::size_t cols = binned.cols;
        sum.assign(cols * 256, 0.0);
        count.assign(cols * 256, 0);
        for (std::size_t r : rows) {
            const std::uint8_t* b = &binned.bins[r * cols];
            const double g = residual[r];
            for (std::size_t c = 0; c < cols; ++c) {
                sum[c * 256 + b[c]] += g;
                ++count[c * 256 + b[c]];
            }
        }
        const double parent = total * total / n;
        double best_gain = 0.0;
        int best_feature = -1;
        std::size_t best_bin = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t nb = binned.thresholds[c].size();
            double sl = 0.0;
            std::size_t nl = 0;
            for (std::size_t b = 0; b < nb; ++b) {
                sl += sum[c * 256 + b];
                nl += count[c * 256 + b];
                const std::size_t nr = rows.size() - nl;
                if (nl < static_cast<std::size_t>(params.min_leaf)) {
                    continue;
                }
                if (nr < static_cast<std::size_t>(params.min_leaf)) {
                    break;
                }
                const double sr = total - sl;
                const double gain = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr) - parent;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(c);
                    best_bin = b;
                }
            }
        }
        if (best_feature < 0 || !(best_gain > 1e-12 * std::max(1.0, parent))) {
            return id;
        }
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        const auto f = static_cast<std::size_t>(best_feature);
        for (std::size_t r : rows) {
            (binned.bins[r * cols + f] <= best_bin ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        tree.nodes[static_cast<std::size_t>(id)].feature = best_feature;
        tree.nodes[static_cast<std::size_t>(id)].threshold = binned.thresholds[f][best_bin];
        const int l = build(left, depth + 1);
        const int rr = build(right, depth + 1);
        tree.nodes[static_cast<std::size_t>(id)].left = l;
        tree.nodes[static_cast<std::size_t>(id)].right = rr;
        return id;
    }
};

void check_params(const GbmParams& p) {
    if (p.n_trees < 1) {
        throw Error(ErrorCode::invalid_argument, "gbm: n_trees must be >= 1");
    }
    if (p.depth < 1 || p.depth > 6) {
        throw Error(ErrorCode::invalid_argument, "gbm: depth must lie in [1, 6]");
    }
    if (!(p.learning_rate > 0.0 && p.learning_rate <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "gbm: learning_rate must lie in (0, 1]");
    }
    if (!(p.subsample > 0.0 && p.subsample <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "gbm: subsample must lie in (0, 1]");
    }
    if (p.min_leaf < 1) {
        throw Error(ErrorCode::invalid_argument, "gbm: min_leaf must be >= 1");
    }
}

} // namespace

GbmModel fit_gbm(const Eigen::MatrixXd& features, std::span<const double> target, const GbmParams& params) {
    check_params(params);
    if (!features.allFinite()) {
        throw Error(ErrorCode::invalid_argument, "gbm: non-finite feature value");
    }
    return fit_gbm(features, bin_features(features, params.max_bins), target, params);
}

GbmModel fit_gbm(const Eigen::MatrixXd& features, const BinnedFeatures& binned, std::span<const double> target,
                 const GbmParams& params) {
    check_params(params);
    const auto n = static_cast<std::size_t>(features.rows());
    if (n != target.size() || binned.rows != n || binned.cols != static_cast<std::size_t>(features.cols())) {
        throw Error(ErrorCode::invalid_argument, "gbm: features and target differ in length");
    }
    if (n < 20) {
        throw Error(ErrorCode::insufficient_data, "gbm needs at least 20 rows, have " + std::to_string(n));
    }
    for (double y : target) {
        if (!std::isfinite(y)) {
            throw Error(ErrorCode::invalid_argument, "gbm: non-finite target value");
        }
    }
    if (!features.allFinite()) {
        throw Error(ErrorCode::invalid_argument, "gbm: non-finite feature value");
    }

    GbmModel model;
    model.learning_rate = params.learning_rate;
    model.n_features = static_cast<std::size_t>(features.cols());
    model.base_value = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(n);

    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = features;
    std::vector<double> fitted(n, model.base_value);
    std::vector<double> residual(n);
    auto loss = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            residual[i] = target[i] - fitted[i];
            s += residual[i] * residual[i];
        }
        return s / static_cast<double>(n);
    };
    model.stage_loss.push_back(loss());

    std::mt19937_64 rng(params.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto sample_size = std::max<std::size_t>(
        static_cast<std::size_t>(2 * params.min_leaf),
        static_cast<std::size_t>(std::floor(params.subsample * static_cast<double>(n))));

    for (int stage = 0; stage < params.n_trees; ++stage) {
        std::vector<std::size_t> rows;
        if (sample_size >= n) {
            rows = order;
        } else {
            for (std::size_t i = 0; i < sample_size; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, n - 1);
                std::swap(order[i], order[pick(rng)]);
            }
            rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sample_size));
            std::sort(rows.begin(), rows.end());
        }
        TreeBuilder builder{binned, residual, params, {}, {}, {}};
        builder.build(rows, 0);
        for (std::size_t i = 0; i < n; ++i) {
            fitted[i] += params.learning_rate * builder.tree.predict(rm.row(static_cast<Eigen::Index>(i)).data());
        }
        model.trees.push_back(std::move(builder.tree));
        model.stage_loss.push_back(loss());
    }
    return model;
}

void gbm_forecast_features(const SeriesView& view, std::size_t index, double* out) {
    for (std::size_t i = 0; i < kGbmLags.size(); ++i) {
        out[i] = view.values[index - kGbmLags[i]];
    }
    const double phase = 2.0 * std::numbers::pi * view.time_at(index).minute_of_day() / core::kMinutesPerDay;
    out[kGbmLags.size()] = std::sin(phase);
    out[kGbmLags.size() + 1] = std::cos(phase);
}

double GbmForecaster::predict(const SeriesView& view, std::size_t index) const {
    if (index < lag_window()) {
        throw Error(ErrorCode::insufficient_data, "gbm: not enough history for the lag window");
    }
    double row[kGbmForecastFeatures];
    gbm_forecast_features(view, index, row);
    return model_.predict(row);
}

std::shared_ptr<const GbmForecaster> fit_gbm_forecaster(const SeriesView& view, std::span<const std::size_t> rows,
                                                        const GbmParams& params) {
    std::vector<std::size_t> used;
    for (std::size_t r : rows) {
        if (r >= kGbmLags.back() && r < view.values.size()) {
            used.push_back(r);
        }
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(used.size()), static_cast<Eigen::Index>(kGbmForecastFeatures));
    std::vector<double> y(used.size());
    double row[kGbmForecastFeatures];
    for (std::size_t i = 0; i < used.size(); ++i) {
        gbm_forecast_features(view, used[i], row);
        for (std::size_t c = 0; c < kGbmForecastFeatures; ++c) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
        }
        y[i] = view.values[used[i]];
    }
    return std::make_shared<GbmForecaster>(fit_gbm(x, y, params));
}

} // namespace hometwin::forecasting
