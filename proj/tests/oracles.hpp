// Test-only oracles, independent of the library's implementation paths:
// a brute-force grid integration of product-of-experts densities and a
// closed-form least-squares regressor.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mmfuse/gaussian.hpp"
#include "mmfuse/matrix.hpp"

namespace oracle {

struct GridMoments {
    double mean = 0.0;
    double std = 0.0;
};

// Numeric mean/std of the normalized pointwise product of 1-D expert
// densities (optionally times the unit-Gaussian prior) on a regular grid.
inline GridMoments poe_grid_moments(const std::vector<mmfuse::GaussianExpert>& experts,
                                    bool include_prior, double lo = -10.0, double hi = 10.0,
                                    double step = 1e-3) {
    double w_sum = 0.0, x_sum = 0.0, xx_sum = 0.0;
    const auto count = static_cast<std::size_t>((hi - lo) / step) + 1;
    std::vector<double> logp(count);
    double max_logp = -1e300;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = lo + step * static_cast<double>(i);
        double lp = include_prior ? -0.5 * x * x : 0.0;
        for (const auto& e : experts) {
            const double z = (x - e.mean[0]) / e.std[0];
            lp += -0.5 * z * z - std::log(e.std[0]);
        }
        logp[i] = lp;
        if (lp > max_logp) max_logp = lp;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double x = lo + step * static_cast<double>(i);
        const double w = std::exp(logp[i] - max_logp);
        w_sum += w;
        x_sum += w * x;
        xx_sum += w * x * x;
    }
    GridMoments m;
    m.mean = x_sum / w_sum;
    m.std = std::sqrt(xx_sum / w_sum - m.mean * m.mean);
    return m;
}

// Ordinary least squares with a bias column, solved by Gaussian elimination
// on the normal equations (tiny ridge for numerical safety).
inline std::vector<double> least_squares_fit(const std::vector<mmfuse::Vec>& x,
                                             const mmfuse::Vec& y, double ridge = 1e-9) {
    const std::size_t n = x.size();
    const std::size_t d = x.front().size() + 1;  // + bias
    std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> row(d, 1.0);
        for (std::size_t j = 0; j + 1 < d; ++j) row[j] = x[s][j];
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) a[i][j] += row[i] * row[j];
            a[i][d] += row[i] * y[s];
        }
    }
    for (std::size_t i = 0; i < d; ++i) a[i][i] += ridge;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        if (std::fabs(a[col][col]) < 1e-300)
            throw std::runtime_error("least_squares_fit: singular system");
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= d; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> beta(d);
    for (std::size_t i = 0; i < d; ++i) beta[i] = a[i][d] / a[i][i];
    return beta;
}

inline double least_squares_predict(const std::vector<double>& beta, const mmfuse::Vec& x) {
    double y = beta.back();
    for (std::size_t j = 0; j + 1 < beta.size(); ++j) y += beta[j] * x[j];
    return y;
}

}  // namespace oracle
