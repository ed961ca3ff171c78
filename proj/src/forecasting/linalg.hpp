#pragma once

#include <Eigen/Dense>

namespace hometwin::forecasting::detail {

struct LinearFit {
    Eigen::VectorXd weights;
    double intercept = 0.0;
};

/// Minimizes mean((y - b - Xw)^2) + lambda * |w|^2; the intercept is not penalized.
/// With lambda == 0 a rank-deficient design throws Error(degenerate) "degenerate design".
LinearFit ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);

/// Ordinary least squares without intercept handling; same degeneracy check.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

} // namespace hometwin::forecasting::detail
