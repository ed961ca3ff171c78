#pragma once

#include "hometwin/forecasting/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace hometwin::forecasting {

struct GbmParams {
    int n_trees = 100;
    int depth = 3;
    double learning_rate = 0.1;
    double subsample = 1.0; // row fraction drawn per stage without replacement
    std::uint64_t seed = 1;
    int max_bins = 255;
    int min_leaf = 1;
};

/// Features quantized to at most max_bins histogram bins per column.
struct BinnedFeatures {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> bins;              // row-major rows x cols
    std::vector<std::vector<double>> thresholds; // per column, upper edge of each bin but the last

    std::uint8_t at(std::size_t r, std::size_t c) const { return bins[r * cols + c]; }
};

BinnedFeatures bin_features(const Eigen::MatrixXd& features, int max_bins = 255);

struct GbmTree {
    struct Node {
        int feature = -1; // -1 for leaf
        double threshold = 0.0; // go left when x <= threshold
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    std::vector<Node> nodes;

    double predict(const double* row) const;
};

class GbmModel {
public:
    double predict(const double* row) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;

    double base_value = 0.0;
    double learning_rate = 0.1;
    std::vector<GbmTree> trees;
    std::vector<double> stage_loss; // training MSE after each stage; [0] is the constant model
    std::size_t n_features = 0;
};

/// Squared-loss boosting: start at the target mean, fit a depth-limited tree to the
/// residuals per stage, add learning_rate times the tree.
/// Throws Error(invalid_argument) for bad parameters, fewer than 20 rows or non-finite data.
GbmModel fit_gbm(const Eigen::MatrixXd& features, std::span<const double> target, const GbmParams& params);
GbmModel fit_gbm(const Eigen::MatrixXd& features, const BinnedFeatures& binned, std::span<const double> target,
                 const GbmParams& params);

/// Lags used by the GBM forecaster: recent steps plus the same time one day earlier.
inline constexpr std::array<std::size_t, 7> kGbmLags = {1, 2, 3, 6, 12, 24, 288};

/// Lag features plus minute-of-day sine/cosine, for predicting values[index].
void gbm_forecast_features(const SeriesView& view, std::size_t index, double* out);
inline constexpr std::size_t kGbmForecastFeatures = kGbmLags.size() + 2;

class GbmForecaster : public Predictor {
public:
    explicit GbmForecaster(GbmModel model) : model_(std::move(model)) {}
    std::size_t lag_window() const override { return kGbmLags.back(); }
    double predict(const SeriesView& view, std::size_t index) const override;
    const GbmModel& model() const { return model_; }

private:
    GbmModel model_;
};

std::shared_ptr<const GbmForecaster> fit_gbm_forecaster(const SeriesView& view, std::span<const std::size_t> rows,
                                                        const GbmParams& params);

} // namespace hometwin::forecasting
