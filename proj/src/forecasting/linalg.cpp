#include "linalg.hpp"

#include "hometwin/core/error.hpp"

#include <cmath>

namespace hometwin::forecasting::detail {

LinearFit ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
    const Eigen::Index n = x.rows();
    if (n == 0 || y.size() != n) {
        throw Error(ErrorCode::invalid_argument, "ridge needs matching non-empty design and target");
    }
    LinearFit fit;
    if (x.cols() == 0) {
        fit.weights = Eigen::VectorXd(0);
        fit.intercept = y.mean();
        return fit;
    }
    const Eigen::RowVectorXd mu = x.colwise().mean();
    const double y_mu = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - mu;
    const Eigen::VectorXd yc = y.array() - y_mu;
    const double nd = static_cast<double>(n);
    Eigen::MatrixXd gram = (xc.transpose() * xc) / nd;
    const Eigen::VectorXd rhs = (xc.transpose() * yc) / nd;
    if (lambda > 0.0) {
        gram.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
            throw Error(ErrorCode::degenerate, "degenerate design");
        }
        fit.weights = ldlt.solve(rhs);
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
        qr.setThreshold(1e-10);
        if (qr.rank() < x.cols()) {
            throw Error(ErrorCode::degenerate, "degenerate design");
        }
        fit.weights = qr.solve(yc);
    }
    if (!fit.weights.allFinite()) {
        throw Error(ErrorCode::degenerate, "degenerate design");
    }
    fit.intercept = y_mu - mu.dot(fit.weights);
    return fit;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (x.rows() < x.cols() || qr.rank() < x.cols()) {
        throw Error(ErrorCode::degenerate, "degenerate design");
    }
    Eigen::VectorXd w = qr.solve(y);
    if (!w.allFinite()) {
        throw Error(ErrorCode::degenerate, "degenerate design");
    }
    return w;
}

} // namespace hometwin::forecasting::detail
