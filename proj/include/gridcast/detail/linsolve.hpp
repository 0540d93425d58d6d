#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gridcast::detail {

/// Solves A x = b for dense row-major A by Gaussian elimination with partial
/// pivoting. A and b are consumed as workspace. Throws on a (numerically)
/// singular matrix.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    if (a.size() != n * n) throw std::invalid_argument("solve_dense: shape mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double cand = std::abs(a[row * n + col]);
            if (cand > best) {
                best = cand;
                pivot = row;
            }
        }
        if (!(best > 0.0)) throw std::runtime_error("solve_dense: singular matrix");
        if (pivot != col) {
            for (std::size_t j = col; j < n; ++j)
                std::swap(a[pivot * n + j], a[col * n + j]);
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = a[row * n + col] * inv;
            if (f == 0.0) continue;
            a[row * n + col] = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) a[row * n + j] -= f * a[col * n + j];
            b[row] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
        x[i] = s / a[i * n + i];
    }
    return x;
}

/// Max-norm residual ||A x - b||_inf for the original (unfactored) system.
inline double residual_inf(const std::vector<double>& a, const std::vector<double>& x,
                           const std::vector<double>& b) {
    const std::size_t n = b.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = -b[i];
        for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

} // namespace gridcast::detail
