#pragma once

#include <cmath>
#include <stdexcept>

namespace wavecov {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double four_pi = 4.0 * pi;

/// Point in R^3. Components are dimensionless desk units.
struct Point3 {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    double norm2() const { return x1 * x1 + x2 * x2 + x3 * x3; }
    double norm() const { return std::sqrt(norm2()); }
    bool finite() const {
        return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3);
    }
};

inline Point3 operator+(Point3 a, Point3 b) { return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3}; }
inline Point3 operator-(Point3 a, Point3 b) { return {a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3}; }
inline Point3 operator*(double c, Point3 a) { return {c * a.x1, c * a.x2, c * a.x3}; }
inline Point3 operator-(Point3 a) { return {-a.x1, -a.x2, -a.x3}; }
inline double dot(Point3 a, Point3 b) { return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3; }

inline Point3 normalized(Point3 a) {
    const double n = a.norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return (1.0 / n) * a;
}

/// sin(x)/x with the removable singularity filled by its Taylor series.
inline double sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

/// (1 - sin(x)/x), computed without cancellation for small x.
inline double one_minus_sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 0.5) {
        const double x2 = x * x;
        // 1 - sinc = x^2/6 - x^4/120 + x^6/5040 - x^8/362880 + ...
        return x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
    }
    return 1.0 - std::sin(x) / x;
}

/// (1 - cos(x)) as 2 sin^2(x/2); exact and nonnegative for all x.
inline double one_minus_cos(double x) {
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s;
}

}  // namespace wavecov
