#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wavecov {

/// Result of an ordinary least-squares fit of log(value) against log(grid).
struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double stderr_slope = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::size_t points = 0;
};

/// Log-log OLS over the probes inside [window_lo, window_hi] (inclusive,
/// with a relative tolerance). Requires >= 3 positive values in the window.
inline ExponentFit fit_exponent(const std::vector<double>& grid, const std::vector<double>& values,
                                double window_lo, double window_hi) {
    if (grid.size() != values.size()) throw std::invalid_argument("fit_exponent: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = grid[i];
        if (g < window_lo * (1.0 - 1e-12) || g > window_hi * (1.0 + 1e-12)) continue;
        if (!(values[i] > 0.0))
            throw std::invalid_argument("fit_exponent: nonpositive value inside the fit window");
        lx.push_back(std::log(g));
        ly.push_back(std::log(values[i]));
    }
    const std::size_t n = lx.size();
    if (n < 3) throw std::invalid_argument("fit_exponent: need at least 3 points in the window");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = lx[i] - mx, dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit_exponent: degenerate grid");

    ExponentFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (f.intercept + f.slope * lx[i]);
        ss_res += r * r;
    }
    f.r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    f.stderr_slope = (n > 2) ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx) : 0.0;
    f.window_lo = window_lo;
    f.window_hi = window_hi;
    f.points = n;
    return f;
}

inline ExponentFit fit_exponent(const std::vector<double>& grid, const std::vector<double>& values) {
    if (grid.empty()) throw std::invalid_argument("fit_exponent: empty grid");
    double lo = grid.front(), hi = grid.front();
    for (double g : grid) {
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    return fit_exponent(grid, values, lo, hi);
}

}  // namespace wavecov
