#pragma once

// Test-only least squares: normal equations solved by Gaussian elimination with
// partial pivoting. Shares nothing with the library's QR path.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Minimizes |y - X b|^2 over b. Rows of `x` are observations.
inline std::vector<double> ols(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
    const std::size_t k = x.front().size();
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t r = 0; r < x.size(); ++r) {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                a[i][j] += x[r][i] * x[r][j];
            }
            a[i][k] += x[r][i] * y[r];
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        if (std::abs(a[piv][c]) < 1e-300) throw std::runtime_error("singular");
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t j = c; j <= k; ++j) a[r][j] -= f * a[c][j];
        }
    }
    std::vector<double> b(k);
    for (std::size_t i = 0; i < k; ++i) b[i] = a[i][k] / a[i][i];
    return b;
}

} // namespace oracle
