#include "hometwin/forecasting/arima.hpp"

#include "hometwin/core/error.hpp"
#include "linalg.hpp"

#include <algorithm>

namespace hometwin::forecasting {

namespace {

std::vector<double> difference_times(std::span<const double> x, int d) {
    std::vector<double> w(x.begin(), x.end());
    for (int k = 0; k < d; ++k) {
        if (w.size() < 2) {
            return {};
        }
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            w[i] = w[i + 1] - w[i];
        }
        w.pop_back();
    }
    return w;
}

// One-step ARMA prediction of w[j] from w[<j] and e[<j]; missing lags are skipped.
double arma_step(const ArimaCoefficients& c, const std::vector<double>& w, const std::vector<double>& e, std::size_t j) {
    double y = c.intercept;
    for (std::size_t i = 1; i <= c.ar.size() && i <= j; ++i) {
        y += c.ar[i - 1] * w[j - i];
    }
    for (std::size_t k = 1; k <= c.ma.size() && k <= j; ++k) {
        y += c.ma[k - 1] * e[j - k];
    }
    return y;
}

// Residuals of the ARMA filter over w; zero until the AR lags are complete.
std::vector<double> filter_residuals(const ArimaCoefficients& c, const std::vector<double>& w) {
    std::vector<double> e(w.size(), 0.0);
    for (std::size_t j = c.ar.size(); j < w.size(); ++j) {
        e[j] = w[j] - arma_step(c, w, e, j);
    }
    return e;
}

struct Regression {
    Eigen::VectorXd coef;
    double variance = 0.0;
};

// Regresses w[j] on [1, w[j-1..j-p], e[j-1..j-q]] over the given js.
Regression regress(const std::vector<double>& w, const std::vector<double>* e, const std::vector<std::size_t>& js,
                   int p, int q) {
    const auto cols = static_cast<Eigen::Index>(1 + p + q);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(js.size()), cols);
    Eigen::VectorXd y(static_cast<Eigen::Index>(js.size()));
    for (std::size_t r = 0; r < js.size(); ++r) {
        const std::size_t j = js[r];
        const auto ri = static_cast<Eigen::Index>(r);
        x(ri, 0) = 1.0;
        for (int i = 1; i <= p; ++i) {
            x(ri, i) = w[j - static_cast<std::size_t>(i)];
        }
        for (int k = 1; k <= q; ++k) {
            x(ri, p + k) = (*e)[j - static_cast<std::size_t>(k)];
        }
        y(ri) = w[j];
    }
    Regression out;
    out.coef = detail::least_squares(x, y);
    out.variance = (y - x * out.coef).squaredNorm() / static_cast<double>(js.size());
    return out;
}

ArimaCoefficients unpack(const Regression& r, int p, int q, int d) {
    ArimaCoefficients c;
    c.d = d;
    c.intercept = r.coef(0);
    for (int i = 0; i < p; ++i) {
        c.ar.push_back(r.coef(1 + i));
    }
    for (int k = 0; k < q; ++k) {
        c.ma.push_back(r.coef(1 + p + k));
    }
    c.residual_variance = r.variance;
    return c;
}

} // namespace

ArimaPredictor::ArimaPredictor(ArimaCoefficients coefficients, std::size_t burn_in)
    : coef_(std::move(coefficients)), burn_in_(burn_in) {
    if (coef_.d < 0 || coef_.d > 2) {
        throw Error(ErrorCode::invalid_argument, "arima: d must be 0, 1 or 2");
    }
}

std::size_t ArimaPredictor::lag_window() const { return static_cast<std::size_t>(coef_.d) + coef_.ar.size(); }

double ArimaPredictor::predict(const SeriesView& view, std::size_t index) const {
    const auto d = static_cast<std::size_t>(coef_.d);
    const std::size_t p = coef_.ar.size();
    const std::size_t q = coef_.ma.size();
    if (index < d + p) {
        throw Error(ErrorCode::insufficient_data, "arima: not enough history for the lag window");
    }
    const std::size_t span = q > 0 ? burn_in_ + d + p + q : d + p;
    const std::size_t s = index > span ? index - span : 0;
    const auto xs = view.values.subspan(s, index - s);
    const std::vector<double> w = difference_times(xs, coef_.d);

    double next = 0.0;
    if (q > 0) {
        const std::vector<double> e = filter_residuals(coef_, w);
        std::vector<double> ext = w;
        ext.push_back(0.0);
        std::vector<double> eext = e;
        eext.push_back(0.0);
        next = arma_step(coef_, ext, eext, w.size());
    } else {
        next = coef_.intercept;
        for (std::size_t i = 1; i <= p; ++i) {
            next += coef_.ar[i - 1] * w[w.size() - i];
        }
    }
    if (d == 0) {
        return next;
    }
    if (d == 1) {
        return xs.back() + next;
    }
    return 2.0 * xs[xs.size() - 1] - xs[xs.size() - 2] + next;
}

std::shared_ptr<const ArimaPredictor> fit_arima_predictor(const SeriesView& view, std::span<const std::size_t> rows,
                                                          int p, int d, int q) {
    if (p < 0 || p > 8 || q < 0 || q > 8) {
        throw Error(ErrorCode::invalid_argument, "arima: p and q must lie in [0, 8]");
    }
    if (d < 0 || d > 2) {
        throw Error(ErrorCode::invalid_argument, "arima: d must be 0, 1 or 2");
    }
    const std::vector<double> w = difference_times(view.values, d);
    const auto du = static_cast<std::size_t>(d);
    const std::size_t need = 10 * static_cast<std::size_t>(p + q + 1);

    // long-AR order for the first-pass innovations
    const std::size_t m = q > 0 ? static_cast<std::size_t>(std::clamp(2 * (p + q) + 4, 10, 30)) : 0;
    const std::size_t first = std::max<std::size_t>(static_cast<std::size_t>(p), q > 0 ? m + static_cast<std::size_t>(q) : 0);

    std::vector<std::size_t> js;
    js.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= du && r - du >= first && r - du < w.size()) {
            js.push_back(r - du);
        }
    }
    if (js.size() <= need) {
        throw Error(ErrorCode::insufficient_data, "arima(" + std::to_string(p) + "," + std::to_string(d) + "," +
                                                      std::to_string(q) + ") needs more than " + std::to_string(need) +
                                                      " usable rows, have " + std::to_string(js.size()));
    }
    if (q == 0) {
        return std::make_shared<ArimaPredictor>(unpack(regress(w, nullptr, js, p, 0), p, 0, d));
    }

    // pass 1: innovations from a long autoregression
    std::vector<std::size_t> long_js;
    for (std::size_t j : js) {
        if (j >= m) {
            long_js.push_back(j);
        }
    }
    const Regression long_ar = regress(w, nullptr, long_js, static_cast<int>(m), 0);
    std::vector<double> e(w.size(), 0.0);
    for (std::size_t j = m; j < w.size(); ++j) {
        double y = long_ar.coef(0);
        for (std::size_t i = 1; i <= m; ++i) {
            y += long_ar.coef(static_cast<Eigen::Index>(i)) * w[j - i];
        }
        e[j] = w[j] - y;
    }
    ArimaCoefficients c = unpack(regress(w, &e, js, p, q), p, q, d);

    // pass 2: innovations from the fitted ARMA filter itself
    e = filter_residuals(c, w);
    c = unpack(regress(w, &e, js, p, q), p, q, d);
    return std::make_shared<ArimaPredictor>(std::move(c));
}

FittedModel fit_arima(const core::TimeSeries& train, int p, int d, int q) { return fit(arima_spec(p, d, q), train); }

FittedModel make_arima_model(ArimaCoefficients coefficients, const core::TimeSeries& reference) {
    const BaseModelSpec spec = arima_spec(static_cast<int>(coefficients.ar.size()), coefficients.d,
                                          static_cast<int>(coefficients.ma.size()));
    return wrap(spec, TransformState{}, std::make_shared<ArimaPredictor>(std::move(coefficients)), reference);
}

} // namespace hometwin::forecasting
